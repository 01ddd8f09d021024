"""Tests for the benchmark problem generators."""

import pytest

from descomp.generators import (
    BenchSpec,
    dining_philosophers,
    example3,
    generate,
    random_problem,
    transfer_line,
)
from descomp.lts import UsageError, compose_all, isomorphic


def test_generate_dispatch():
    assert len(generate(BenchSpec("DP", n=2)).parts) == 4
    assert len(generate(BenchSpec("TL", n=2, k=1)).parts) == 5
    assert len(generate(BenchSpec("RANDOM", n=3, seed=7)).parts) == 3
    assert len(generate(BenchSpec("EXAMPLE3")).parts) == 3
    with pytest.raises(UsageError):
        generate(BenchSpec("DP", n=1))
    with pytest.raises(UsageError):
        generate(BenchSpec("TL", n=1))
    with pytest.raises(UsageError):
        generate(BenchSpec("RANDOM", n=1))
    with pytest.raises(UsageError):
        generate(BenchSpec("XX"))


def test_dining_philosophers_structure():
    prob = dining_philosophers(3)
    # one philosopher and one fork per seat
    assert len(prob.parts) == 6
    assert len(prob.goal.guarantees) == 3
    tab = prob.table
    # forks are 3-state mutexes; philosophers carry the thinking chain
    assert {p.n_states for p in prob.parts} == {3, 6}
    # pick-ups controllable, thinking and release uncontrollable
    assert tab.is_controllable(tab.id_of("tl0"))
    assert tab.is_controllable(tab.id_of("eat1"))
    assert not tab.is_controllable(tab.id_of("rel2"))
    assert not tab.is_controllable(tab.id_of("th0_1"))
    # adjacent philosophers share a fork: the product is connected
    assert compose_all(list(prob.parts)).n_states > 1


def test_transfer_line_structure():
    prob = transfer_line(2, 3)
    # 2 machines, 2 buffers, 1 testing unit
    assert len(prob.parts) == 5
    buffers = [p for p in prob.parts if p.n_states == 4]
    assert len(buffers) == 2
    tab = prob.table
    assert tab.is_controllable(tab.id_of("start0"))
    assert not tab.is_controllable(tab.id_of("finish1"))
    assert tab.is_controllable(tab.id_of("accept"))
    assert len(prob.goal.guarantees) == 1


def test_random_problem_determinism_and_bounds():
    a = random_problem(3, 42)
    b = random_problem(3, 42)
    assert a.table == b.table
    assert a.goal == b.goal
    for x, y in zip(a.parts, b.parts):
        assert isomorphic(x, y)
    assert not isomorphic(a.parts[0], random_problem(3, 43).parts[0])
    for seed in range(50):
        prob = random_problem(2 + seed % 3, seed)
        assert len(prob.table) <= 8
        assert all(p.n_states <= 6 for p in prob.parts)
        assert len(prob.goal.assumptions) <= 2
        assert 1 <= len(prob.goal.guarantees) <= 2
        assert any(prob.table.controllable)


def test_example3_fixture():
    prob = example3()
    tab = prob.table
    assert len(prob.parts) == 3
    # u3 is the shared uncontrollable event joining all three parts
    u3 = tab.id_of("u3")
    assert all(u3 in p.alphabet for p in prob.parts)
    assert not tab.is_controllable(u3)
    assert all(p.is_deterministic() for p in prob.parts)
