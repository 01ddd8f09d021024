"""Tests for goal expressions, projection, and lasso semantics."""

import random

from hypothesis import given, settings, strategies as st

from descomp.goals import (
    EventExpr,
    Gr1Goal,
    edge_satisfies,
    holds_on_lasso,
    normalized,
    project,
    wrap_mu,
)


def eval_cnf(clauses, label):
    """Truth-table oracle for the one-hot event semantics."""
    return all(
        any((e == label) == pos for e, pos in clause) for clause in clauses
    )


def random_expr(rng, n_events=5):
    clauses = []
    for _ in range(rng.randint(1, 3)):
        lits = {
            (rng.randrange(n_events), rng.random() < 0.7)
            for _ in range(rng.randint(1, 3))
        }
        clauses.append(frozenset(lits))
    return EventExpr(frozenset(clauses))


@given(st.integers(0, 5000))
@settings(max_examples=100, deadline=None)
def test_satisfied_by_matches_truth_table(seed):
    rng = random.Random(seed)
    x = random_expr(rng)
    for label in range(5):
        assert x.satisfied_by(label) == eval_cnf(x.clauses, label)


def test_constants():
    assert EventExpr.true().is_true()
    assert EventExpr.false().is_false()
    for label in range(3):
        assert EventExpr.true().satisfied_by(label)
        assert not EventExpr.false().satisfied_by(label)
    assert EventExpr.clause_of([]).is_false()


def test_literal_semantics():
    pos = EventExpr.literal(2)
    neg = EventExpr.literal(2, positive=False)
    assert pos.satisfied_by(2) and not pos.satisfied_by(1)
    assert neg.satisfied_by(1) and not neg.satisfied_by(2)


def test_conj_collapses_to_false():
    x = EventExpr.conj([EventExpr.literal(0), EventExpr.false()])
    assert x.is_false()


@given(st.integers(0, 5000))
@settings(max_examples=100, deadline=None)
def test_projection_weakens_goal_on_lassos(seed):
    """For any cycle over the target alphabet, goal satisfaction implies
    satisfaction of the projected goal (the projection admits at least the
    original solutions on target-only behaviour)."""
    rng = random.Random(seed)
    target = frozenset(rng.sample(range(5), rng.randint(1, 4)))
    goal = Gr1Goal(
        assumptions=tuple(random_expr(rng) for _ in range(rng.randint(0, 2))),
        guarantees=tuple(random_expr(rng) for _ in range(rng.randint(1, 2))),
    )
    projected = project(goal, target)
    for _ in range(20):
        cycle = [rng.choice(sorted(target)) for _ in range(rng.randint(1, 4))]
        if holds_on_lasso(goal, (), cycle):
            assert holds_on_lasso(projected, (), cycle)


def test_projection_vacuous_when_assumption_dies():
    goal = Gr1Goal(
        assumptions=(EventExpr.literal(3),),
        guarantees=(EventExpr.literal(0),),
    )
    projected = project(goal, {0, 1})
    assert projected.vacuous
    assert projected.guarantees == ()
    # a fully-false antecedent makes every lasso satisfy the goal
    assert holds_on_lasso(projected, (), [0])
    assert holds_on_lasso(projected, (), [1])


def test_projection_keeps_in_alphabet_parts():
    goal = Gr1Goal(
        assumptions=(EventExpr.clause_of([(0, True), (4, True)]),),
        guarantees=(EventExpr.literal(1), EventExpr.literal(4)),
    )
    projected = project(goal, {0, 1, 2})
    # assumption clause loses the out-of-alphabet literal
    assert projected.assumptions == (EventExpr.literal(0),)
    # guarantee on e4 becomes trivially true and is dropped
    assert projected.guarantees == (EventExpr.literal(1),)


def test_flatten_adds_single_mu_conjunction():
    goal = Gr1Goal(guarantees=(EventExpr.literal(0),))
    eff = wrap_mu(goal, {1, 2})
    flat = eff.flatten()
    assert len(flat.assumptions) == 1
    conj = flat.assumptions[0]
    # satisfied exactly by labels that are neither 1 nor 2
    assert conj.satisfied_by(0) and conj.satisfied_by(3)
    assert not conj.satisfied_by(1) and not conj.satisfied_by(2)
    assert wrap_mu(goal, frozenset()).flatten() == goal


def test_normalized_fills_constants():
    n = normalized(Gr1Goal())
    assert n.assumptions == (EventExpr.true(),)
    assert n.guarantees == (EventExpr.true(),)


def test_holds_on_lasso():
    goal = Gr1Goal(
        assumptions=(EventExpr.literal(0),),
        guarantees=(EventExpr.literal(1),),
    )
    assert holds_on_lasso(goal, (0, 1), [2])  # assumption violated
    assert holds_on_lasso(goal, (), [0, 1])  # both recur
    assert not holds_on_lasso(goal, (), [0, 2])  # assumption without guarantee
    # prefix must not matter
    assert holds_on_lasso(goal, (1, 1, 1), [2]) == holds_on_lasso(goal, (), [2])


def test_edge_satisfies_alias():
    x = EventExpr.literal(1)
    assert edge_satisfies(x, 1) and not edge_satisfies(x, 0)
