"""Tests for the compositional synthesis loop."""

import pytest
from hypothesis import given, settings, strategies as st

from descomp.engine import (
    ControlProblem,
    MinimizationTrace,
    ResourceBudgetExceeded,
    SynthesisTuple,
    comp_synthesis,
    controlled_subplant,
    heuristic_first_two,
    local_alphabet,
    monolithic_synthesis,
    partial_synthesis,
)
from descomp.generators import dining_philosophers, example3, random_problem
from descomp.goals import EventExpr, Gr1Goal
from descomp.lts import EventTable, Unrealizable, UsageError, make_lts
from descomp.verify import check_solution


def mono_verdict(prob):
    try:
        return monolithic_synthesis(prob).realizable
    except Unrealizable:
        return False


def comp_result(prob):
    try:
        return comp_synthesis(prob)
    except Unrealizable:
        return None


def test_problem_validation():
    tab = EventTable(names=("a", "b"), controllable=(True, False))
    l = make_lts(tab, 1, {0}, [(0, 0, 0)])
    goal = Gr1Goal(guarantees=(EventExpr.literal(1),))
    with pytest.raises(UsageError):
        ControlProblem(parts=(l,), table=tab, goal=goal)  # goal outside alphabet
    with pytest.raises(UsageError):
        ControlProblem(parts=(), table=tab, goal=Gr1Goal.top())
    nondet = make_lts(tab, 2, {0}, [(0, 0, 0), (0, 0, 1)])
    with pytest.raises(UsageError):
        ControlProblem(parts=(nondet,), table=tab, goal=Gr1Goal.top())


def test_heuristic_first_two():
    h = heuristic_first_two()
    assert h([1, 2, 3]) == [0, 1]
    assert h([1, 2]) == [0, 1]
    assert h([1]) == [0]


def test_local_alphabet():
    goal = Gr1Goal(guarantees=(EventExpr.literal(3),))
    ups = local_alphabet({0, 1, 2, 3, 4}, {0}, goal, {4}, controllable={1})
    assert ups == {2}


def test_controlled_subplant_completion():
    tab = EventTable(names=("a", "u"), controllable=(True, False))
    subplant = make_lts(tab, 2, {0, 1}, [(0, 0, 1), (0, 1, 1), (1, 0, 1)])
    # safe controller: only state 0 kept, so the shared uncontrollable u was
    # pruned and must reappear as an edge into a fresh sink
    safe = make_lts(tab, 1, {0, 1}, [], origin=(0,))
    cont = controlled_subplant(safe, subplant, {1})
    assert cont.n_states == 2
    assert cont.deadlock_sink == 1
    assert (1, 1) in cont.edges[0]
    assert cont.edges[1] == ()
    # nothing pruned -> unchanged
    full = make_lts(tab, 2, {0, 1}, [(0, 0, 1), (0, 1, 1), (1, 0, 1)], origin=(0, 1))
    assert controlled_subplant(full, subplant, {1}) is full


def test_partial_synthesis_needs_proper_subplant():
    prob = random_problem(2, 0)
    t = SynthesisTuple(plant_set=list(prob.parts), safe_controllers=[], mu=frozenset())
    with pytest.raises(UsageError):
        partial_synthesis(t, [0, 1], prob)


def test_partial_synthesis_shrinks_and_records():
    prob = example3()
    t = SynthesisTuple(plant_set=list(prob.parts), safe_controllers=[], mu=frozenset())
    trace = MinimizationTrace()
    t2, stats = partial_synthesis(t, [0, 1], prob, trace=trace)
    assert len(t2.plant_set) == 2
    assert len(t2.safe_controllers) == 1
    assert stats.quotient_states <= stats.subplant_states
    assert len(trace.records) == 1


def test_budget_exceeded():
    prob = dining_philosophers(3)
    with pytest.raises(ResourceBudgetExceeded):
        monolithic_synthesis(prob, budget=10)
    with pytest.raises(ResourceBudgetExceeded):
        comp_synthesis(prob, budget=10)


def test_bad_heuristic_rejected():
    prob = random_problem(3, 1)
    with pytest.raises(UsageError):
        comp_synthesis(prob, h=lambda parts: [0])


@given(st.integers(0, 3000))
@settings(max_examples=150, deadline=None)
def test_comp_agrees_with_mono(seed):
    prob = random_problem(2 + seed % 3, seed)
    bundle = comp_result(prob)
    assert (bundle is not None) == mono_verdict(prob)
    if bundle is not None:
        assert check_solution(prob, bundle.controllers).ok


def test_comp_solution_composes_all_controllers():
    prob = example3()
    bundle = comp_synthesis(prob)
    assert len(bundle.controllers) >= 2
    assert check_solution(prob, bundle.controllers).ok
    # stats cover every iteration including the final live step
    assert bundle.stats[-1].iteration == len(bundle.stats)


def test_unrealizable_problem_raises():
    # guarantee requires e0 but an uncontrollable e1 self-loop is all there is
    tab = EventTable(names=("e0", "e1"), controllable=(True, False))
    a = make_lts(tab, 2, {0, 1}, [(0, 1, 1), (1, 1, 1)])
    b = make_lts(tab, 1, {1}, [(0, 1, 0)])
    goal = Gr1Goal(
        assumptions=(EventExpr.literal(1),),
        guarantees=(EventExpr.literal(0),),
    )
    prob = ControlProblem(parts=(a, b), table=tab, goal=goal)
    assert mono_verdict(prob) is False
    with pytest.raises(Unrealizable):
        comp_synthesis(prob)
