"""Explicit-state GR(1) game engine over a single plant LTS.

The game uses discrete-event semantics: the controller picks, at every plant
state, a set of events to enable.  It may disable controllable events only,
and must leave at least one event enabled.  The environment resolves the
remaining nondeterminism.  Recurrence formulas are evaluated on transition
labels, so the fixpoint carries per-event edge masks instead of state labels.
"""

from __future__ import annotations

from dataclasses import dataclass

from .goals import EffectiveGoal, EventExpr, Gr1Goal, normalized
from .lts import Lts, add_self_loops, induced_subgraph, make_lts, remove_self_loops


@dataclass
class GameArena:
    """Plant plus per-formula edge masks (label -> bool caches).

    ``halt_states`` marks states where the controller may disable every
    event: states whose uncontrollable self-loops were stripped before the
    fixpoint but survive in the actual plant, so halting there is not a
    deadlock (the loop spins and the wrapped goal excuses the trace).
    """

    plant: Lts
    controllable: frozenset[int]
    assumption_masks: list[dict[int, bool]]
    guarantee_masks: list[dict[int, bool]]
    halt_states: frozenset[int] = frozenset()

    @staticmethod
    def build(
        plant: Lts, controllable, goal: Gr1Goal, halt_states=frozenset()
    ) -> "GameArena":
        controllable = frozenset(controllable)
        n = normalized(goal)

        def mask(expr: EventExpr) -> dict[int, bool]:
            return {e: expr.satisfied_by(e) for e in plant.alphabet}

        return GameArena(
            plant=plant,
            controllable=controllable,
            assumption_masks=[mask(x) for x in n.assumptions],
            guarantee_masks=[mask(x) for x in n.guarantees],
            halt_states=frozenset(halt_states),
        )


def cpre(arena: GameArena, good_edge, require_progress: bool = True) -> frozenset[int]:
    """One-step controllable predecessor.

    A state qualifies iff every enabled uncontrollable edge is good and,
    when ``require_progress`` is set, at least one event can stay enabled:
    either some uncontrollable is enabled, or some enabled controllable
    edge is good.  States in ``arena.halt_states`` are exempt from the
    progress requirement.  Without the progress requirement the controller
    may disable everything, modelling a subplant that is allowed to halt
    while the rest of the system runs on; only uncontrollable edges
    constrain.
    """
    plant = arena.plant
    result = set()
    for s in range(plant.n_states):
        has_unc = False
        unc_ok = True
        good_ctrl = False
        for e, t in plant.edges[s]:
            if e in arena.controllable:
                if good_edge(s, e, t):
                    good_ctrl = True
            else:
                has_unc = True
                if not good_edge(s, e, t):
                    unc_ok = False
                    break
        progress_ok = (
            not require_progress or s in arena.halt_states or has_unc or good_ctrl
        )
        if unc_ok and progress_ok:
            result.add(s)
    return frozenset(result)


@dataclass
class WinningRegion:
    """Exact winning states plus the bookkeeping needed to extract a
    strategy: per guarantee j, the onion rings of the inner least fixpoint
    and, per ring, the nu-X set of the justifying assumption."""

    states: frozenset[int]
    plant: Lts
    controllable: frozenset[int]
    goal: Gr1Goal  # base goal actually solved (mu already stripped)
    mu_ledger: list[tuple[int, int]]  # self-loops removed before solving
    rank: list[dict[int, int]]  # per guarantee j: state -> ring index
    witness: list[dict[int, int]]  # per guarantee j: state -> assumption idx
    x_sets: list[dict[tuple[int, int], frozenset[int]]]  # (ring, i) -> X
    assumption_masks: list[dict[int, bool]]
    guarantee_masks: list[dict[int, bool]]
    # per assumption i: states barred from the stay-forever disjunct
    rescue_bad: list[frozenset[int]] = None

    @property
    def realizable(self) -> bool:
        return self.plant.initial in self.states


def _solve_region(
    arena: GameArena,
    require_progress: bool = True,
    loop_labels: dict[int, frozenset[int]] | None = None,
) -> WinningRegion:
    plant = arena.plant
    m = len(arena.guarantee_masks)
    n_assume = len(arena.assumption_masks)
    all_states = frozenset(range(plant.n_states))
    # The deadlock sink stands for a subplant that already lost its safety
    # game; it is losing by fiat even in the halting-allowed variant.
    if plant.deadlock_sink is not None:
        all_states -= {plant.deadlock_sink}

    # A state whose stripped self-loop label satisfies assumption i cannot
    # stay forever in the violate-assumption-i mode: the environment can
    # spin the loop there and satisfy the assumption without changing
    # state.  Such states may still pass through X on guarantee or
    # attractor edges.
    loop_labels = loop_labels or {}
    rescue_bad: list[frozenset[int]] = []
    for i in range(n_assume):
        amask = arena.assumption_masks[i]
        rescue_bad.append(
            frozenset(
                s for s, labels in loop_labels.items() if any(amask[e] for e in labels)
            )
        )

    z = all_states
    rank: list[dict[int, int]] = [{} for _ in range(m)]
    witness: list[dict[int, int]] = [{} for _ in range(m)]
    x_sets: list[dict[tuple[int, int], frozenset[int]]] = [{} for _ in range(m)]

    while True:
        z_next = z
        for j in range(m):
            gmask = arena.guarantee_masks[j]
            rank_j: dict[int, int] = {}
            witness_j: dict[int, int] = {}
            x_j: dict[tuple[int, int], frozenset[int]] = {}

            y: frozenset[int] = frozenset()
            ring = 0
            while True:
                ring += 1
                y_new = set(y)
                for i in range(n_assume):
                    amask = arena.assumption_masks[i]

                    # nu X. cpre(gamma_j-edge into Z, or edge into Y, or
                    #            not-phi_i-edge into X)
                    bad = rescue_bad[i]
                    x = all_states
                    while True:
                        def good(s, e, t, x=x, amask=amask, gmask=gmask, y=y, bad=bad):
                            if gmask[e] and t in z:
                                return True
                            if t in y:
                                return True
                            return s not in bad and (not amask[e]) and t in x

                        x_next = cpre(arena, good, require_progress) & all_states
                        if x_next == x:
                            break
                        x = x_next
                    x_j[(ring, i)] = x
                    for s in x:
                        if s not in y:
                            y_new.add(s)
                            if s not in rank_j:
                                rank_j[s] = ring
                                witness_j[s] = i
                if frozenset(y_new) == y:
                    break
                y = frozenset(y_new)
            z_next = z_next & y
            rank[j] = rank_j
            witness[j] = witness_j
            x_sets[j] = x_j
        if z_next == z:
            break
        z = z_next

    # With Z at its fixpoint the per-guarantee structures computed in the
    # last sweep are consistent with Z and reused for extraction.
    return WinningRegion(
        states=z,
        plant=plant,
        controllable=arena.controllable,
        goal=Gr1Goal(),  # caller fills in
        mu_ledger=[],
        rank=rank,
        witness=witness,
        x_sets=x_sets,
        assumption_masks=arena.assumption_masks,
        guarantee_masks=arena.guarantee_masks,
        rescue_bad=rescue_bad,
    )


def solve_gr1(
    plant: Lts,
    controllable,
    goal: EffectiveGoal,
    require_progress: bool = True,
    halt_on_mu: bool = False,
) -> WinningRegion:
    """Winning region of the DES GR(1) game.

    Self-loops labelled with goal.mu are removed up front; the removal
    ledger is kept so live-controller extraction can re-add the
    uncontrollable ones and stay legal.  Loop labels satisfying an
    assumption bar their state from winning by violating that assumption
    forever (the environment can spin the loop and satisfy it in place).

    ``require_progress=False`` plays the halting-allowed variant used for
    safe controllers, where only forced uncontrollable violations lose.
    ``halt_on_mu=True`` allows halting exactly at states that carried a
    stripped self-loop: in the unstripped plant such a halt spins the loop
    forever, which the wrapped goal excuses.  Leave it off when the loops
    abstract finite local behaviour that eventually demands progress.
    """
    stripped, ledger = remove_self_loops(plant, goal.mu)
    loop_labels: dict[int, frozenset[int]] = {}
    for s, e in ledger:
        loop_labels[s] = loop_labels.get(s, frozenset()) | {e}
    halt_states = frozenset(loop_labels) if halt_on_mu else frozenset()
    arena = GameArena.build(stripped, controllable, goal.base, halt_states)
    region = _solve_region(arena, require_progress, loop_labels)
    region.goal = goal.base
    region.mu_ledger = ledger
    return region


@dataclass(frozen=True)
class Verdict:
    """Outcome of controller extraction."""

    controller: Lts | None

    @property
    def realizable(self) -> bool:
        return self.controller is not None


UNREALIZABLE = Verdict(controller=None)


def _strategy_choice(region: WinningRegion, s: int, j: int) -> frozenset[int] | None:
    """Events the controller enables at plant state ``s`` with memory ``j``.

    Enables every enabled uncontrollable event plus, if one exists, the
    lowest-id controllable event whose edge is good for the current ring.
    Returns None if ``s`` fell outside the memory-j attractor (cannot occur
    on strategy-reachable states).
    """
    plant = region.plant
    rank_j = region.rank[j]
    if s not in rank_j:
        return None
    k = rank_j[s]
    i = region.witness[j][s]
    x = region.x_sets[j][(k, i)]
    gmask = region.guarantee_masks[j]
    amask = region.assumption_masks[i]
    bad = region.rescue_bad[i] if region.rescue_bad else frozenset()

    def good(e: int, t: int) -> bool:
        if gmask[e] and t in region.states:
            return True
        if rank_j.get(t, 1 << 30) < k:
            return True
        return s not in bad and (not amask[e]) and t in x

    chosen: set[int] = set()
    best_ctrl: int | None = None
    for e, t in plant.edges[s]:
        if e in region.controllable:
            if good(e, t) and (best_ctrl is None or e < best_ctrl):
                best_ctrl = e
        else:
            chosen.add(e)
    if best_ctrl is not None:
        chosen.add(best_ctrl)
    return frozenset(chosen)


def extract_live_controller(region: WinningRegion) -> Verdict:
    """Deterministic controller from a winning region.

    Controller states are (plant state, guarantee counter) pairs; the
    counter advances on edges satisfying the pending guarantee.  The
    uncontrollable self-loops stripped for the mu preprocessing are re-added
    at every controller state whose plant image carries them.
    """
    if not region.realizable:
        return UNREALIZABLE
    plant = region.plant
    m = len(region.guarantee_masks)
    unc_loops = {
        (s, e)
        for s, e in region.mu_ledger
        if e not in region.controllable
    }
    loops_at: dict[int, set[int]] = {}
    for s, e in unc_loops:
        loops_at.setdefault(s, set()).add(e)

    index: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []

    def intern(key: tuple[int, int]) -> int:
        i = index.get(key)
        if i is None:
            i = len(order)
            index[key] = i
            order.append(key)
        return i

    init = (plant.initial, 0)
    intern(init)
    transitions: list[tuple[int, int, int]] = []
    frontier = [init]
    seen = {init}
    while frontier:
        s, j = key = frontier.pop()
        src = index[key]
        choice = _strategy_choice(region, s, j)
        assert choice is not None, "strategy left its attractor"
        for e, t in plant.edges[s]:
            if e not in choice:
                continue
            # Credit the pending guarantee only when the target stays in the
            # winning region; a guarantee-labelled edge that was good purely
            # by ring descent must not advance the counter.
            if region.guarantee_masks[j][e] and t in region.states:
                j2 = (j + 1) % m
            else:
                j2 = j
            nxt = (t, j2)
            dst = intern(nxt)
            transitions.append((src, e, dst))
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
        # removed uncontrollable self-loops come back so the controller stays legal
        for e in loops_at.get(s, ()):
            transitions.append((src, e, src))

    controller = make_lts(
        table=plant.table,
        n_states=len(order),
        alphabet=plant.alphabet,
        transitions=transitions,
        initial=0,
        origin=tuple(order),
    )
    return Verdict(controller=controller)


def extract_safe_controller(
    plant: Lts, extended_controllable, goal: EffectiveGoal
) -> Verdict:
    """Maximally permissive safety controller confining the plant to the
    winning states of ``goal``: the induced subgraph of the plant on exactly
    those states (all transitions between winning states are kept, which
    also restores any mu self-loops at winning states).

    The underlying game allows the subplant to halt: a state is pruned only
    when local uncontrollable behaviour forces a goal violation, so the
    kept states are a superset of the strict winning states and no globally
    viable state is lost."""
    region = solve_gr1(plant, extended_controllable, goal, require_progress=False)
    if not region.realizable:
        return UNREALIZABLE
    return Verdict(controller=induced_subgraph(plant, region.states))
