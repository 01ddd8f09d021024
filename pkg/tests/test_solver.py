"""Tests for the GR(1) game solver and controller extraction."""

import random

from hypothesis import given, settings, strategies as st

from descomp.engine import ControlProblem
from descomp.goals import EventExpr, Gr1Goal, wrap_mu
from descomp.lts import EventTable, make_lts
from descomp.solver import (
    GameArena,
    cpre,
    extract_live_controller,
    extract_safe_controller,
    solve_gr1,
)
from descomp.verify import brute_force_realizability, check_solution


def table(n, ctrl):
    return EventTable(
        names=tuple(f"e{i}" for i in range(n)),
        controllable=tuple(i in ctrl for i in range(n)),
    )


def random_instance(seed):
    rng = random.Random(seed)
    n_events = rng.randint(2, 3)
    ctrl = {i for i in range(n_events) if rng.random() < 0.5}
    tab = table(n_events, ctrl)
    n = rng.randint(1, 3)
    transitions = []
    for s in range(n):
        for e in range(n_events):
            if rng.random() < 0.6:
                transitions.append((s, e, rng.randrange(n)))
    if not any(s == 0 for s, _, _ in transitions):
        transitions.append((0, rng.randrange(n_events), rng.randrange(n)))
    plant = make_lts(tab, n, range(n_events), transitions)
    assumptions = tuple(
        EventExpr.clause_of([(rng.randrange(n_events), rng.random() < 0.8)])
        for _ in range(rng.randint(0, 1))
    )
    guarantees = tuple(
        EventExpr.clause_of([(rng.randrange(n_events), rng.random() < 0.8)])
        for _ in range(rng.randint(1, 2))
    )
    goal = Gr1Goal(assumptions=assumptions, guarantees=guarantees)
    return ControlProblem(parts=(plant,), table=tab, goal=goal)


def test_trivial_recurrence_realizable():
    tab = table(2, {0, 1})
    plant = make_lts(tab, 1, {0, 1}, [(0, 0, 0), (0, 1, 0)])
    goal = Gr1Goal(guarantees=(EventExpr.literal(0),))
    region = solve_gr1(plant, tab.controllable_set(), wrap_mu(goal, frozenset()))
    assert region.realizable
    v = extract_live_controller(region)
    prob = ControlProblem(parts=(plant,), table=tab, goal=goal)
    assert check_solution(prob, [v.controller]).ok


def test_uncontrollable_trap_unrealizable():
    # e1 uncontrollable leads to a state where the guarantee event is dead
    tab = table(2, {0})
    plant = make_lts(tab, 2, {0, 1}, [(0, 0, 0), (0, 1, 1), (1, 1, 1)])
    goal = Gr1Goal(guarantees=(EventExpr.literal(0),))
    region = solve_gr1(plant, tab.controllable_set(), wrap_mu(goal, frozenset()))
    assert not region.realizable


def test_vacuous_win_by_assumption_violation():
    # the only infinite run repeats e1, which never satisfies assume <>[] e0
    tab = table(2, {1})
    plant = make_lts(tab, 1, {1}, [(0, 1, 0)])
    goal = Gr1Goal(
        assumptions=(EventExpr.literal(0),),
        guarantees=(EventExpr.literal(0),),
    )
    region = solve_gr1(plant, tab.controllable_set(), wrap_mu(goal, frozenset()))
    assert region.realizable


def test_deadlock_is_losing():
    tab = table(2, {0})
    plant = make_lts(tab, 2, {0, 1}, [(0, 0, 1)])
    goal = Gr1Goal(guarantees=(EventExpr.literal(0),))
    region = solve_gr1(plant, tab.controllable_set(), wrap_mu(goal, frozenset()))
    assert not region.realizable


def test_sink_state_is_losing_even_without_progress():
    tab = table(2, {0})
    plant = make_lts(
        tab, 2, {0, 1}, [(0, 0, 0), (0, 1, 1)], deadlock_sink=1
    )
    goal = Gr1Goal(guarantees=(EventExpr.literal(0),))
    region = solve_gr1(
        plant, tab.controllable_set(), wrap_mu(goal, frozenset()),
        require_progress=False,
    )
    assert 1 not in region.states
    # e1 is uncontrollable here, so state 0 is dragged down too
    assert 0 not in region.states


def test_mu_stripping_and_readding():
    # uncontrollable self-loop e1 in mu: solving ignores it, the extracted
    # controller re-enables it
    tab = table(2, {0})
    plant = make_lts(tab, 1, {0, 1}, [(0, 0, 0), (0, 1, 0)])
    goal = Gr1Goal(guarantees=(EventExpr.literal(0),))
    region = solve_gr1(plant, tab.controllable_set(), wrap_mu(goal, {1}))
    assert region.realizable
    v = extract_live_controller(region)
    assert (1, 0) in v.controller.edges[0]


def test_halt_on_mu_allows_parking():
    # only move is the mu self-loop; halting there is winning exactly in the
    # halt_on_mu variant
    tab = table(2, {0})
    plant = make_lts(tab, 1, {1}, [(0, 1, 0)])
    goal = Gr1Goal(guarantees=(EventExpr.literal(0),))
    assert not solve_gr1(
        plant, tab.controllable_set(), wrap_mu(goal, {1})
    ).realizable
    assert solve_gr1(
        plant, tab.controllable_set(), wrap_mu(goal, {1}), halt_on_mu=True
    ).realizable


def test_mu_loop_can_rescue_an_assumption():
    # assumption (!e0 | e1) is satisfied by the mu label e2, so the
    # environment can satisfy it in place and a strategy may not rely on
    # violating it by spinning at that state
    tab = table(3, {0})
    plant = make_lts(
        tab, 2, {0, 1, 2},
        [(0, 0, 0), (0, 2, 0), (0, 1, 1), (1, 1, 1)],
    )
    goal = Gr1Goal(
        assumptions=(EventExpr.clause_of([(0, False), (1, True)]),),
        guarantees=(EventExpr.literal(0),),
    )
    region = solve_gr1(plant, tab.controllable_set(), wrap_mu(goal, {2}))
    if region.realizable:
        v = extract_live_controller(region)
        prob = ControlProblem(parts=(plant,), table=tab, goal=goal)
        flat = wrap_mu(goal, frozenset({2})).flatten()
        assert check_solution(prob, [v.controller], goal=wrap_mu(flat, frozenset())).ok


@given(st.integers(0, 4000))
@settings(max_examples=150, deadline=None)
def test_solver_agrees_with_brute_force(seed):
    prob = random_instance(seed)
    region = solve_gr1(
        prob.parts[0], prob.controllable, wrap_mu(prob.goal, frozenset())
    )
    assert region.realizable == brute_force_realizability(prob)


@given(st.integers(0, 4000))
@settings(max_examples=100, deadline=None)
def test_extracted_controllers_certify(seed):
    prob = random_instance(seed)
    region = solve_gr1(
        prob.parts[0], prob.controllable, wrap_mu(prob.goal, frozenset())
    )
    if region.realizable:
        v = extract_live_controller(region)
        assert check_solution(prob, [v.controller]).ok


@given(st.integers(0, 4000))
@settings(max_examples=60, deadline=None)
def test_cpre_monotone(seed):
    rng = random.Random(seed)
    prob = random_instance(seed)
    plant = prob.parts[0]
    arena = GameArena.build(plant, prob.controllable, prob.goal)
    big = frozenset(rng.sample(range(plant.n_states), rng.randint(0, plant.n_states)))
    small = frozenset(s for s in big if rng.random() < 0.6)

    def good_in(target):
        return lambda s, e, t: t in target

    assert cpre(arena, good_in(small)) <= cpre(arena, good_in(big))


def test_safe_controller_is_induced_subgraph():
    tab = table(2, {0})
    plant = make_lts(tab, 3, {0, 1}, [(0, 0, 1), (1, 0, 1), (0, 1, 2)])
    goal = Gr1Goal(guarantees=(EventExpr.literal(0),))
    v = extract_safe_controller(plant, tab.controllable_set(), wrap_mu(goal, frozenset()))
    assert v.realizable
    c = v.controller
    # every kept transition exists in the plant between the same old states
    for s in range(c.n_states):
        for e, t in c.edges[s]:
            assert (e, c.origin[t]) in plant.edges[c.origin[s]]
