"""Finite labelled transition systems and their algebra.

States are dense integer indices.  Events are interned in a problem-wide
:class:`EventTable`; every LTS of a problem carries the same table so that
synchronization in parallel composition is by global event identity.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field


class ConfigurationError(Exception):
    """Raised when LTSs with inconsistent event tables are combined."""


class UsageError(Exception):
    """Raised on invalid arguments (empty composition lists etc.)."""


@dataclass(frozen=True)
class EventTable:
    """Problem-wide alphabet: event names plus controllability flags."""

    names: tuple[str, ...]
    controllable: tuple[bool, ...]

    def __post_init__(self):
        if len(self.names) != len(set(self.names)):
            raise UsageError("duplicate event names in event table")
        if len(self.names) != len(self.controllable):
            raise UsageError("controllable flags must match event names")

    def __len__(self) -> int:
        return len(self.names)

    def id_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name) from None

    def name_of(self, event: int) -> str:
        return self.names[event]

    def is_controllable(self, event: int) -> bool:
        return self.controllable[event]

    def controllable_set(self) -> frozenset[int]:
        return frozenset(e for e, c in enumerate(self.controllable) if c)

    def uncontrollable_set(self) -> frozenset[int]:
        return frozenset(e for e, c in enumerate(self.controllable) if not c)


@dataclass(frozen=True)
class Lts:
    """A finite LTS over a shared event table.

    ``edges[s]`` is a sorted tuple of ``(event, target)`` pairs.  The optional
    ``deadlock_sink`` tags the artificial deadlock state of a controlled
    subplant; it has no outgoing transitions and no special semantics beyond
    being reported in diagnostics.
    """

    table: EventTable
    n_states: int
    alphabet: frozenset[int]
    edges: tuple[tuple[tuple[int, int], ...], ...]
    initial: int = 0
    deadlock_sink: int | None = None
    # provenance of product / subgraph states, for diagnostics only
    origin: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if not (0 <= self.initial < self.n_states):
            raise UsageError("initial state out of range")
        if len(self.edges) != self.n_states:
            raise UsageError("edge table size mismatch")
        for s, outs in enumerate(self.edges):
            for e, t in outs:
                if e not in self.alphabet:
                    raise UsageError(
                        f"transition on {self.table.name_of(e)} at state {s} "
                        "not in declared alphabet"
                    )
                if not (0 <= t < self.n_states):
                    raise UsageError(f"transition target {t} out of range")

    # -- basic queries ----------------------------------------------------

    def enabled(self, s: int) -> frozenset[int]:
        """Events with an outgoing transition at ``s``."""
        return frozenset(e for e, _ in self.edges[s])

    def successors(self, s: int, event: int) -> tuple[int, ...]:
        return tuple(t for e, t in self.edges[s] if e == event)

    def successor(self, s: int, event: int) -> int | None:
        """Single successor of a deterministic LTS, or None if disabled."""
        for e, t in self.edges[s]:
            if e == event:
                return t
        return None

    def is_deterministic(self) -> bool:
        for outs in self.edges:
            seen = set()
            for e, _ in outs:
                if e in seen:
                    return False
                seen.add(e)
        return True

    def transition_count(self) -> int:
        return sum(len(outs) for outs in self.edges)

    def reachable(self) -> frozenset[int]:
        seen = {self.initial}
        work = deque([self.initial])
        while work:
            s = work.popleft()
            for _, t in self.edges[s]:
                if t not in seen:
                    seen.add(t)
                    work.append(t)
        return frozenset(seen)

    def find_deadlocks(self) -> frozenset[int]:
        """Reachable states with no outgoing transition."""
        return frozenset(s for s in self.reachable() if not self.edges[s])

    def run(self, trace) -> int | None:
        """Deterministic run of a trace from the initial state; None if stuck."""
        s = self.initial
        for e in trace:
            s = self.successor(s, e)
            if s is None:
                return None
        return s


def make_lts(
    table: EventTable,
    n_states: int,
    alphabet,
    transitions,
    initial: int = 0,
    deadlock_sink: int | None = None,
    origin: tuple = (),
) -> Lts:
    """Build an Lts from an iterable of (state, event, target) triples."""
    outs: list[set[tuple[int, int]]] = [set() for _ in range(n_states)]
    for s, e, t in transitions:
        outs[s].add((e, t))
    return Lts(
        table=table,
        n_states=n_states,
        alphabet=frozenset(alphabet),
        edges=tuple(tuple(sorted(o)) for o in outs),
        initial=initial,
        deadlock_sink=deadlock_sink,
        origin=origin,
    )


def compose(a: Lts, b: Lts) -> Lts:
    """Reachable part of the synchronous product of ``a`` and ``b``.

    Shared events synchronize, non-shared events interleave.  Product states
    are re-densified on the fly; the pair provenance is kept in ``origin``.
    """
    if a.table is not b.table and a.table != b.table:
        raise ConfigurationError("composed LTSs must share one event table")
    shared = a.alphabet & b.alphabet
    only_a = a.alphabet - shared
    only_b = b.alphabet - shared

    # Every pair containing a factor's deadlock sink collapses into one
    # product sink: the sink marks a subplant that lost its safety game, so
    # anything beyond it is irrelevant and it must stay a dead end.
    SINK = (-1, -1)

    def norm(pair: tuple[int, int]) -> tuple[int, int]:
        sa, sb = pair
        if sa == a.deadlock_sink or sb == b.deadlock_sink:
            return SINK
        return pair

    index: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []

    def intern(pair: tuple[int, int]) -> int:
        i = index.get(pair)
        if i is None:
            i = len(order)
            index[pair] = i
            order.append(pair)
        return i

    init = norm((a.initial, b.initial))
    intern(init)
    edges: list[list[tuple[int, int]]] = []
    work = deque([init])
    while work:
        sa, sb = pair = work.popleft()
        i = index[pair]
        while len(edges) <= i:
            edges.append([])
        if pair == SINK:
            edges[i] = []
            continue
        out: list[tuple[int, int]] = []

        def step(tgt: tuple[int, int], e: int):
            tgt = norm(tgt)
            if tgt not in index:
                work.append(tgt)
            out.append((e, intern(tgt)))

        for e, ta in a.edges[sa]:
            if e in only_a:
                step((ta, sb), e)
            else:  # shared: b must also move
                for e2, tb in b.edges[sb]:
                    if e2 == e:
                        step((ta, tb), e)
        for e, tb in b.edges[sb]:
            if e in only_b:
                step((sa, tb), e)
        edges[i] = out

    while len(edges) < len(order):
        edges.append([])
    sink = index.get(SINK)
    return Lts(
        table=a.table,
        n_states=len(order),
        alphabet=a.alphabet | b.alphabet,
        edges=tuple(tuple(sorted(set(o))) for o in edges),
        initial=0,
        deadlock_sink=sink,
        origin=tuple(order),
    )


def compose_all(parts: list[Lts]) -> Lts:
    """Left fold of :func:`compose` over a nonempty list."""
    if not parts:
        raise UsageError("compose_all needs at least one LTS")
    result = parts[0]
    for p in parts[1:]:
        result = compose(result, p)
    return result


class Unrealizable(Exception):
    """Signal that a control problem (or subproblem) has no solution."""


def induced_subgraph(l: Lts, keep) -> Lts:
    """Restrict ``l`` to the states in ``keep``, re-densifying indices.

    The old->new correspondence is kept in ``origin`` (tuple of old indices).
    Raises :class:`Unrealizable` when the initial state is not kept.
    """
    keep = frozenset(keep)
    if l.initial not in keep:
        raise Unrealizable("initial state pruned from induced subgraph")
    old_order = sorted(keep)
    new_of = {s: i for i, s in enumerate(old_order)}
    edges = tuple(
        tuple(sorted((e, new_of[t]) for e, t in l.edges[s] if t in keep))
        for s in old_order
    )
    sink = new_of.get(l.deadlock_sink) if l.deadlock_sink in keep else None
    return Lts(
        table=l.table,
        n_states=len(old_order),
        alphabet=l.alphabet,
        edges=edges,
        initial=new_of[l.initial],
        deadlock_sink=sink,
        origin=tuple(old_order),
    )


def remove_self_loops(l: Lts, labels) -> tuple[Lts, list[tuple[int, int]]]:
    """Drop transitions (s, e, s) with e in ``labels``; return the ledger."""
    labels = frozenset(labels)
    removed: list[tuple[int, int]] = []
    edges = []
    for s, outs in enumerate(l.edges):
        kept = []
        for e, t in outs:
            if t == s and e in labels:
                removed.append((s, e))
            else:
                kept.append((e, t))
        edges.append(tuple(kept))
    stripped = Lts(
        table=l.table,
        n_states=l.n_states,
        alphabet=l.alphabet,
        edges=tuple(edges),
        initial=l.initial,
        deadlock_sink=l.deadlock_sink,
        origin=l.origin,
    )
    return stripped, removed


def add_self_loops(l: Lts, loops) -> Lts:
    """Re-add (s, e, s) loops; idempotent on loops already present."""
    extra: dict[int, set[tuple[int, int]]] = {}
    for s, e in loops:
        if not (0 <= s < l.n_states):
            raise UsageError(f"self-loop state {s} out of range")
        extra.setdefault(s, set()).add((e, s))
    if not extra:
        return l
    edges = []
    for s, outs in enumerate(l.edges):
        if s in extra:
            edges.append(tuple(sorted(set(outs) | extra[s])))
        else:
            edges.append(outs)
    return Lts(
        table=l.table,
        n_states=l.n_states,
        alphabet=l.alphabet,
        edges=tuple(edges),
        initial=l.initial,
        deadlock_sink=l.deadlock_sink,
        origin=l.origin,
    )


def canonical_key(l: Lts):
    """Canonical form of the reachable part of a deterministic LTS.

    BFS from the initial state, exploring events in id order, yields a
    numbering invariant under state renaming, so two deterministic LTSs are
    isomorphic (on reachable parts) iff their keys are equal.
    """
    number = {l.initial: 0}
    order = [l.initial]
    work = deque([l.initial])
    while work:
        s = work.popleft()
        for e, t in sorted(l.edges[s]):
            if t not in number:
                number[t] = len(order)
                order.append(t)
                work.append(t)
    edges = tuple(
        tuple(sorted((e, number[t]) for e, t in l.edges[s]))
        for s in order
    )
    return (len(order), tuple(sorted(l.alphabet)), edges)


def isomorphic(a: Lts, b: Lts) -> bool:
    return canonical_key(a) == canonical_key(b)
