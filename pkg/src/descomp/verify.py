"""Independent certification of controllers.

The verifier re-composes everything from scratch and never reads solver
internals.  Liveness refutation is SCC-based: a goal is violated iff, for
some guarantee, a reachable strongly connected subgraph of the
guarantee-free edge graph contains a cycle satisfying every assumption
infinitely often.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product as iter_product

from .engine import ControlProblem, ResourceBudgetExceeded
from .goals import EffectiveGoal, Gr1Goal, edge_satisfies, normalized, wrap_mu
from .lts import Lts, compose, compose_all


@dataclass(frozen=True)
class LassoWitness:
    """An ultimately periodic violating trace prefix.cycle^w."""

    prefix: tuple[int, ...]
    cycle: tuple[int, ...]
    violated_guarantee: int


@dataclass
class VerificationReport:
    legal: bool
    deadlock_free: bool
    goal_holds: bool
    witness: LassoWitness | None = None
    deadlock_trace: tuple[int, ...] | None = None
    legality_trace: tuple[int, ...] | None = None

    @property
    def ok(self) -> bool:
        return self.legal and self.deadlock_free and self.goal_holds


def check_legal(plant: Lts, controller: Lts, uncontrollable):
    """Legality: at every reachable joint state the closed loop enables
    exactly the plant-enabled uncontrollable events.  Returns (ok, witness
    trace to the first offending joint state)."""
    uncontrollable = frozenset(uncontrollable)
    shared_unc = uncontrollable & controller.alphabet
    init = (plant.initial, controller.initial)
    parent: dict[tuple[int, int], tuple[tuple[int, int], int] | None] = {init: None}
    work = deque([init])
    while work:
        sp, sc = pair = work.popleft()
        plant_unc = plant.enabled(sp) & uncontrollable
        loop_unc = {
            e
            for e in plant_unc
            if e not in shared_unc or controller.successor(sc, e) is not None
        }
        if loop_unc != plant_unc:
            trace = []
            node = pair
            while parent[node] is not None:
                node, e = parent[node]
                trace.append(e)
            return False, tuple(reversed(trace))
        for e in plant.enabled(sp):
            tp = plant.successor(sp, e)
            if e in controller.alphabet:
                tc = controller.successor(sc, e)
                if tc is None:
                    continue
            else:
                tc = sc
            nxt = (tp, tc)
            if nxt not in parent:
                parent[nxt] = (pair, e)
                work.append(nxt)
    return True, None


def _tarjan_sccs(n: int, succ) -> list[list[int]]:
    """Iterative Tarjan over nodes 0..n-1; succ(v) yields successors."""
    index = [0]
    low: dict[int, int] = {}
    num: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    sccs: list[list[int]] = []

    for root in range(n):
        if root in num:
            continue
        call = [(root, iter(succ(root)))]
        num[root] = low[root] = index[0]
        index[0] += 1
        stack.append(root)
        on_stack.add(root)
        while call:
            v, it = call[-1]
            advanced = False
            for w in it:
                if w not in num:
                    num[w] = low[w] = index[0]
                    index[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    call.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], num[w])
            if advanced:
                continue
            call.pop()
            if call:
                pv = call[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == num[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def _path_in(edges_of, start: int, goals: set[int]) -> tuple[list[int], int]:
    """BFS path (event labels) from start to any goal state within the given
    edge relation; returns (labels, end state)."""
    if start in goals:
        return [], start
    parent: dict[int, tuple[int, int]] = {}
    seen = {start}
    work = deque([start])
    while work:
        s = work.popleft()
        for e, t in edges_of(s):
            if t in seen:
                continue
            seen.add(t)
            parent[t] = (s, e)
            if t in goals:
                labels: list[int] = []
                node = t
                while node != start:
                    node, ev = parent[node]
                    labels.append(ev)
                return list(reversed(labels)), t
            work.append(t)
    raise RuntimeError("no path inside supposedly connected component")


def check_gr1(product: Lts, goal: EffectiveGoal):
    """True iff every infinite trace of ``product`` satisfies the goal.

    Mu-wrapped goals are verified by folding the []<>(not l) terms into the
    assumption list.  Returns (ok, LassoWitness or None).
    """
    flat = normalized(goal.flatten())
    reachable = sorted(product.reachable())
    pos = {s: i for i, s in enumerate(reachable)}

    for j, gamma in enumerate(flat.guarantees):
        gamma_free = [
            [(e, t) for e, t in product.edges[s] if not edge_satisfies(gamma, e)]
            for s in reachable
        ]

        def succ(v):
            return [pos[t] for _, t in gamma_free[v]]

        for comp in _tarjan_sccs(len(reachable), succ):
            comp_set = set(comp)
            internal = [
                (v, e, pos[t])
                for v in comp
                for e, t in gamma_free[v]
                if pos[t] in comp_set
            ]
            if not internal:
                continue
            needed: list[tuple[int, int, int]] = []
            ok = True
            for phi in flat.assumptions:
                hits = [edge for edge in internal if edge_satisfies(phi, edge[1])]
                if not hits:
                    ok = False
                    break
                needed.append(hits[0])
            if not ok:
                continue
            witness = _build_witness(product, reachable, pos, gamma_free, comp_set, needed, j)
            return False, witness
    return True, None


def _build_witness(product, reachable, pos, gamma_free, comp_set, needed, j):
    """Concrete lasso: reach the component, then a cycle covering one
    assumption-satisfying edge per assumption (and at least one edge)."""

    def comp_edges(v):
        return [(e, pos[t]) for e, t in gamma_free[v] if pos[t] in comp_set]

    # prefix: initial state to the cycle's anchor, over all product edges
    anchor = needed[0][0] if needed else next(iter(comp_set))

    def full_edges(v):
        return [(e, pos[t]) for e, t in product.edges[reachable[v]]]

    init = pos[product.initial]
    prefix, _ = _path_in(full_edges, init, {anchor})

    cycle: list[int] = []
    here = anchor
    for src, e, dst in needed:
        labels, here = _path_in(comp_edges, here, {src})
        cycle.extend(labels)
        cycle.append(e)
        here = dst
    labels, here = _path_in(comp_edges, here, {anchor})
    cycle.extend(labels)
    if not cycle:
        # no assumptions required an edge; close any nonempty cycle
        e, t = comp_edges(anchor)[0]
        cycle.append(e)
        labels, _ = _path_in(comp_edges, t, {anchor})
        cycle.extend(labels)
    return LassoWitness(prefix=tuple(prefix), cycle=tuple(cycle), violated_guarantee=j)


def check_solution(
    problem: ControlProblem,
    controllers: list[Lts],
    goal: EffectiveGoal | None = None,
    budget: int = 1 << 22,
) -> VerificationReport:
    """Full certification: legality, deadlock freedom, goal
    satisfaction of the closed loop, re-composed from scratch."""
    plant = compose_all(list(problem.parts))
    if plant.n_states > budget:
        raise ResourceBudgetExceeded("plant product exceeds verification budget")
    if controllers:
        controller = compose_all(controllers)
    else:
        raise ValueError("no controllers to verify")
    legal, legality_trace = check_legal(plant, controller, problem.uncontrollable)

    loop = compose(plant, controller)
    if loop.n_states > budget:
        raise ResourceBudgetExceeded("closed loop exceeds verification budget")
    deadlocks = loop.find_deadlocks()
    deadlock_trace = None
    if deadlocks:
        deadlock_trace = _trace_to(loop, next(iter(sorted(deadlocks))))
    if goal is None:
        goal = wrap_mu(problem.goal, frozenset())
    goal_ok, witness = check_gr1(loop, goal)
    return VerificationReport(
        legal=legal,
        deadlock_free=not deadlocks,
        goal_holds=goal_ok,
        witness=witness,
        deadlock_trace=deadlock_trace,
        legality_trace=legality_trace,
    )


def _trace_to(l: Lts, target: int) -> tuple[int, ...]:
    parent: dict[int, tuple[int, int]] = {}
    seen = {l.initial}
    work = deque([l.initial])
    while work:
        s = work.popleft()
        if s == target:
            break
        for e, t in l.edges[s]:
            if t not in seen:
                seen.add(t)
                parent[t] = (s, e)
                work.append(t)
    labels: list[int] = []
    node = target
    while node != l.initial:
        node, e = parent[node]
        labels.append(e)
    return tuple(reversed(labels))


def replay_witness(problem: ControlProblem, controllers: list[Lts], w: LassoWitness,
                   goal: EffectiveGoal | None = None) -> bool:
    """A witness replays iff prefix.cycle is a trace of the closed loop, the
    cycle loops, and the lasso falsifies the goal."""
    from .goals import holds_on_lasso

    plant = compose_all(list(problem.parts))
    loop = compose(plant, compose_all(controllers))
    s = loop.run(w.prefix)
    if s is None:
        return False
    t = s
    for e in w.cycle:
        t = loop.successor(t, e)
        if t is None:
            return False
    if t != s or not w.cycle:
        return False
    if goal is None:
        goal = wrap_mu(problem.goal, frozenset())
    return not holds_on_lasso(goal.flatten(), w.prefix, w.cycle)


def brute_force_realizability(
    problem: ControlProblem,
    memory_bound: int = 0,
    goal: EffectiveGoal | None = None,
) -> bool:
    """Exhaustive search over guarantee-counter controllers.

    Candidates are functions (product state, pending guarantee) -> subset of
    enabled controllable events; every candidate is certified through
    check_solution.  Exponential, test-only.
    """
    plant = compose_all(list(problem.parts))
    if goal is None:
        goal = wrap_mu(problem.goal, frozenset())
    flat = normalized(goal.flatten())
    m = len(flat.guarantees)
    reachable = sorted(plant.reachable())
    controllable = problem.controllable
    if memory_bound and m * plant.n_states > memory_bound:
        raise ResourceBudgetExceeded("brute-force memory bound exceeded")

    cells = [(s, j) for s in reachable for j in range(m)]
    options_per_cell = []
    for s, _ in cells:
        ctrl = sorted(plant.enabled(s) & controllable)
        subsets = []
        for bits in range(1 << len(ctrl)):
            subsets.append(frozenset(c for k, c in enumerate(ctrl) if bits >> k & 1))
        options_per_cell.append(subsets)

    total = 1
    for opts in options_per_cell:
        total *= len(opts)
    if total > 1 << 22:
        raise ResourceBudgetExceeded(f"brute-force candidate space too large ({total})")

    for combo in iter_product(*options_per_cell):
        choice = {cell: opts for cell, opts in zip(cells, combo)}
        controller = _counter_controller(plant, problem, flat, m, choice)
        if controller is None:
            continue
        report = check_solution(problem, [controller], goal=goal)
        if report.ok:
            return True
    return False


def _counter_controller(plant, problem, flat: Gr1Goal, m: int, choice) -> Lts | None:
    """Materialize a candidate as an LTS; None if it deadlocks immediately
    at some reachable cell (cheap pre-filter)."""
    from .lts import make_lts

    index: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []

    def intern(key):
        i = index.get(key)
        if i is None:
            i = len(order)
            index[key] = i
            order.append(key)
        return i

    init = (plant.initial, 0)
    intern(init)
    transitions = []
    work = [init]
    seen = {init}
    while work:
        s, j = key = work.pop()
        src = index[key]
        enabled = plant.enabled(s)
        allowed = (enabled - problem.controllable) | choice[(s, j)]
        for e in sorted(allowed):
            t = plant.successor(s, e)
            if t is None:
                continue
            j2 = (j + 1) % m if edge_satisfies(flat.guarantees[j], e) else j
            nxt = (t, j2)
            dst = intern(nxt)
            transitions.append((src, e, dst))
            if nxt not in seen:
                seen.add(nxt)
                work.append(nxt)
    return make_lts(
        table=plant.table,
        n_states=len(order),
        alphabet=plant.alphabet,
        transitions=transitions,
        initial=0,
        origin=tuple(order),
    )
