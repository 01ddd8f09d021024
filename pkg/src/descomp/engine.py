"""The compositional synthesis loop.

A synthesis tuple (plant set, accumulated safe controllers, accumulated
self-loop events) is transformed iteration by iteration: pick a subplant,
compute a maximally permissive safe controller for the projected goal with
an extended controllable alphabet, reintroduce the minimized controlled
subplant, and finish with a single live-controller step.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

from .goals import Gr1Goal, goal_alphabet, project, wrap_mu
from .lts import EventTable, Lts, Unrealizable, UsageError, compose_all, induced_subgraph
from .minimize import HidingContext, Partition, quotient_deterministic
from .solver import Verdict, extract_live_controller, extract_safe_controller, solve_gr1


class ResourceBudgetExceeded(Exception):
    """A composition grew past the configured state budget."""


DEFAULT_STATE_BUDGET = 1 << 22


@dataclass(frozen=True)
class ControlProblem:
    """Modular plant, controllable alphabet (via the event table), goal."""

    parts: tuple[Lts, ...]
    table: EventTable
    goal: Gr1Goal

    def __post_init__(self):
        if not self.parts:
            raise UsageError("a control problem needs at least one plant LTS")
        sigma = frozenset().union(*(p.alphabet for p in self.parts))
        extra = goal_alphabet(self.goal) - sigma
        if extra:
            names = ", ".join(self.table.name_of(e) for e in sorted(extra))
            raise UsageError(f"goal mentions events outside the plant alphabet: {names}")
        for p in self.parts:
            if not p.is_deterministic():
                raise UsageError("plant LTSs must be deterministic")

    @property
    def controllable(self) -> frozenset[int]:
        return self.table.controllable_set()

    @property
    def uncontrollable(self) -> frozenset[int]:
        return self.table.uncontrollable_set()


@dataclass
class SynthesisTuple:
    plant_set: list[Lts]
    safe_controllers: list[Lts]
    mu: frozenset[int]


@dataclass
class IterationStats:
    iteration: int
    subplant_states: int
    winning_states: int
    quotient_states: int
    mu_size: int
    millis: float

    def as_dict(self) -> dict:
        return {
            "iter": self.iteration,
            "subplant_states": self.subplant_states,
            "winning_states": self.winning_states,
            "quotient_states": self.quotient_states,
            "mu": self.mu_size,
            "millis": round(self.millis, 3),
        }


@dataclass
class SolutionBundle:
    """Safe controllers plus the final live controller; their parallel
    composition solves the original problem."""

    controllers: list[Lts]
    stats: list[IterationStats] = field(default_factory=list)


@dataclass
class MinimizationTrace:
    """Optional capture of per-iteration minimization artifacts, for
    validity checks in tests."""

    records: list[tuple[Lts, Partition, HidingContext, Lts]] = field(default_factory=list)


Heuristic = Callable[[list[Lts]], list[int]]


def heuristic_first_two() -> Heuristic:
    """Default heuristic: always pick the first two LTSs of the
    current plant vector (or everything when two or fewer remain)."""

    def pick(parts: list[Lts]) -> list[int]:
        if len(parts) <= 2:
            return list(range(len(parts)))
        return [0, 1]

    return pick


def _check_budget(parts: list[Lts], budget: int):
    potential = 1
    for p in parts:
        potential *= p.n_states
        if potential > budget:
            raise ResourceBudgetExceeded(
                f"potential product of {potential} states exceeds budget {budget}"
            )


def controlled_subplant(safe: Lts, subplant: Lts, omega_u) -> Lts:
    """Complete a safe controller with the shared-uncontrollable transitions
    it pruned, sending them to a fresh deadlock state.

    ``safe`` must be an induced subgraph of ``subplant`` (its ``origin``
    holds the old state indices).
    """
    if len(safe.origin) != safe.n_states:
        raise RuntimeError("safe controller lost its subplant state correspondence")
    omega_u = frozenset(omega_u)
    bottom = safe.n_states
    extra: list[tuple[int, int, int]] = []
    for s in range(safe.n_states):
        old = safe.origin[s]
        if not isinstance(old, int) or not (0 <= old < subplant.n_states):
            raise RuntimeError("safe controller state map is inconsistent")
        enabled_here = safe.enabled(s)
        for e in sorted(omega_u & subplant.enabled(old)):
            if e not in enabled_here:
                extra.append((s, e, bottom))
    if not extra:
        return safe
    edges = list(safe.edges) + [()]
    for s, e, t in extra:
        edges[s] = tuple(sorted(set(edges[s]) | {(e, t)}))
    return Lts(
        table=safe.table,
        n_states=safe.n_states + 1,
        alphabet=safe.alphabet,
        edges=tuple(edges),
        initial=safe.initial,
        deadlock_sink=bottom,
        origin=safe.origin + (None,),
    )


def local_alphabet(sp_alphabet, rest_alphabet, goal: Gr1Goal, mu, controllable=frozenset()) -> frozenset[int]:
    """Events of the subplant hidden during minimization: not shared with
    the rest of the plant, not in the goal, not in mu.

    Controllable events are kept visible even when local: a hidden
    controllable step only ever matches inside its own equivalence class,
    so hiding it blocks far more merges than it enables.
    """
    return (
        frozenset(sp_alphabet)
        - frozenset(rest_alphabet)
        - goal_alphabet(goal)
        - frozenset(mu)
        - frozenset(controllable)
    )


def partial_synthesis(
    t: SynthesisTuple,
    sp_indices: list[int],
    problem: ControlProblem,
    budget: int = DEFAULT_STATE_BUDGET,
    trace: MinimizationTrace | None = None,
) -> tuple[SynthesisTuple, IterationStats]:
    """One compositional step: safe controller, controlled subplant,
    minimization, mu update.  Raises Unrealizable when the safe-controller
    subproblem has no solution, which is sound for the whole problem."""
    started = time.perf_counter()
    picked = set(sp_indices)
    sp_parts = [t.plant_set[i] for i in sp_indices]
    rest = [p for i, p in enumerate(t.plant_set) if i not in picked]
    if not rest:
        raise UsageError("partial synthesis needs a proper subplant")

    _check_budget(sp_parts, budget)
    subplant = compose_all(sp_parts)
    if subplant.n_states > budget:
        raise ResourceBudgetExceeded("subplant exceeds state budget")

    sigma_sp = frozenset().union(*(p.alphabet for p in sp_parts))
    sigma_rest = frozenset().union(*(p.alphabet for p in rest))
    projected = project(problem.goal, sigma_sp)
    omega_u = problem.uncontrollable & sigma_sp & sigma_rest
    extended = problem.controllable | omega_u
    effective = wrap_mu(projected, t.mu & sigma_sp)

    verdict = extract_safe_controller(subplant, extended, effective)
    if not verdict.realizable:
        raise Unrealizable("safe-controller subproblem is unrealizable")
    safe = verdict.controller
    winning = safe.n_states
    # drop winning states that became unreachable inside the safe region
    safe = _trim(safe, subplant)

    cont = controlled_subplant(safe, subplant, omega_u)
    upsilon = local_alphabet(
        sigma_sp, sigma_rest, problem.goal, t.mu, problem.controllable
    )
    ctx = HidingContext(upsilon=upsilon, controllable=problem.controllable)
    quotiented, mu_prime, partition = quotient_deterministic(cont, ctx)
    if trace is not None:
        trace.records.append((cont, partition, ctx, quotiented))

    new_tuple = SynthesisTuple(
        # prepend so the first-two heuristic grows one subsystem incrementally
        plant_set=[quotiented] + rest,
        safe_controllers=t.safe_controllers + [safe],
        mu=t.mu | mu_prime,
    )
    stats = IterationStats(
        iteration=0,
        subplant_states=subplant.n_states,
        winning_states=winning,
        quotient_states=quotiented.n_states,
        mu_size=len(new_tuple.mu),
        millis=(time.perf_counter() - started) * 1000.0,
    )
    return new_tuple, stats


def _trim(safe: Lts, subplant: Lts) -> Lts:
    """Restrict an induced-subgraph controller to its reachable part while
    keeping the old-state correspondence in ``origin``."""
    reach = safe.reachable()
    if len(reach) == safe.n_states:
        return safe
    trimmed = induced_subgraph(safe, reach)
    origin = tuple(safe.origin[s] for s in trimmed.origin)
    return Lts(
        table=trimmed.table,
        n_states=trimmed.n_states,
        alphabet=trimmed.alphabet,
        edges=trimmed.edges,
        initial=trimmed.initial,
        deadlock_sink=trimmed.deadlock_sink,
        origin=origin,
    )


def monolithic_synthesis(
    problem: ControlProblem, budget: int = DEFAULT_STATE_BUDGET
) -> Verdict:
    """Compose everything, then solve the GR(1) game once."""
    _check_budget(list(problem.parts), budget)
    plant = compose_all(list(problem.parts))
    if plant.n_states > budget:
        raise ResourceBudgetExceeded("monolithic product exceeds state budget")
    region = solve_gr1(plant, problem.controllable, wrap_mu(problem.goal, frozenset()))
    return extract_live_controller(region)


def comp_synthesis(
    problem: ControlProblem,
    h: Heuristic | None = None,
    budget: int = DEFAULT_STATE_BUDGET,
    trace: MinimizationTrace | None = None,
) -> SolutionBundle:
    """Iterated partial synthesis followed by a live-controller step.

    Raises Unrealizable exactly when the problem has no solution, and
    ResourceBudgetExceeded when a composition blows past the budget.
    """
    if h is None:
        h = heuristic_first_two()
    t = SynthesisTuple(plant_set=list(problem.parts), safe_controllers=[], mu=frozenset())
    stats: list[IterationStats] = []
    iteration = 0
    while True:
        iteration += 1
        picked = h(t.plant_set)
        if len(picked) < 2 and len(t.plant_set) > 1:
            raise UsageError("heuristic returned a size-1 subplant of a larger plant")
        if set(picked) == set(range(len(t.plant_set))):
            started = time.perf_counter()
            _check_budget(t.plant_set, budget)
            plant = compose_all(t.plant_set)
            if plant.n_states > budget:
                raise ResourceBudgetExceeded("final composition exceeds state budget")
            region = solve_gr1(plant, problem.controllable, wrap_mu(problem.goal, t.mu))
            verdict = extract_live_controller(region)
            if not verdict.realizable:
                raise Unrealizable("live-controller problem is unrealizable")
            stats.append(
                IterationStats(
                    iteration=iteration,
                    subplant_states=plant.n_states,
                    winning_states=len(region.states),
                    quotient_states=plant.n_states,
                    mu_size=len(t.mu),
                    millis=(time.perf_counter() - started) * 1000.0,
                )
            )
            return SolutionBundle(
                controllers=t.safe_controllers + [verdict.controller],
                stats=stats,
            )
        t, step_stats = partial_synthesis(t, picked, problem, budget=budget, trace=trace)
        step_stats.iteration = iteration
        stats.append(step_stats)
