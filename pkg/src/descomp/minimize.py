"""Synthesis observational equivalence and quotient construction.

The equivalence is controllability-aware: uncontrollable steps must be
matched up to local uncontrollable detours, controllable steps up to local
paths whose controllable intermediate states are equivalent to the source.

We compute *a* valid equivalence (not necessarily the coarsest one) by
partition refinement against a monotone restriction of the definition:
local uncontrollable events act as silent steps, shared events are matched
through silent closures, and a local controllable step may only stay inside
its own block.  Every partition stable under these conditions satisfies the
full definition, which ``verify_soe`` re-checks independently.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .lts import Lts


@dataclass(frozen=True)
class HidingContext:
    """Local (hidden) events plus the controllability flags in force."""

    upsilon: frozenset[int]
    controllable: frozenset[int]

    def is_local(self, e: int) -> bool:
        return e in self.upsilon

    def is_controllable(self, e: int) -> bool:
        return e in self.controllable

    def is_silent(self, e: int) -> bool:
        return e in self.upsilon and e not in self.controllable


@dataclass(frozen=True)
class Partition:
    """Partition of the reachable states of one LTS."""

    block_of: dict[int, int]
    blocks: tuple[frozenset[int], ...]

    @staticmethod
    def identity(states) -> "Partition":
        order = sorted(states)
        return Partition(
            block_of={s: i for i, s in enumerate(order)},
            blocks=tuple(frozenset([s]) for s in order),
        )

    @staticmethod
    def single(states) -> "Partition":
        states = frozenset(states)
        return Partition(
            block_of={s: 0 for s in states},
            blocks=(states,),
        )

    @staticmethod
    def from_blocks(blocks) -> "Partition":
        blocks = tuple(frozenset(b) for b in blocks if b)
        block_of = {}
        for i, b in enumerate(blocks):
            for s in b:
                block_of[s] = i
        return Partition(block_of=block_of, blocks=blocks)

    def same(self, a: int, b: int) -> bool:
        return self.block_of[a] == self.block_of[b]


class _MatchTables:
    """Static per-state reachability data for the refinement conditions.

    ``closure[s]``: states reachable via silent (local uncontrollable)
    transitions.  ``moves[s][e]``: states reachable as closure, one e-step,
    and (for uncontrollable e) a trailing closure.
    """

    def __init__(self, l: Lts, ctx: HidingContext):
        self.l = l
        self.ctx = ctx
        self.closure: dict[int, frozenset[int]] = {}
        for s in l.reachable():
            seen = {s}
            work = deque([s])
            while work:
                z = work.popleft()
                for e, t in l.edges[z]:
                    if ctx.is_silent(e) and t not in seen:
                        seen.add(t)
                        work.append(t)
            self.closure[s] = frozenset(seen)
        self.moves: dict[int, dict[int, frozenset[int]]] = {}
        for s, cl in self.closure.items():
            per_event: dict[int, set[int]] = {}
            for z in cl:
                for e, t in l.edges[z]:
                    if ctx.is_silent(e):
                        continue
                    per_event.setdefault(e, set()).add(t)
            for e, targets in per_event.items():
                if not ctx.is_controllable(e):
                    widened = set()
                    for t in targets:
                        widened |= self.closure[t]
                    per_event[e] = widened
            self.moves[s] = {e: frozenset(ts) for e, ts in per_event.items()}


_TAU = -1  # pseudo-event for silent matching in need/have signatures


def _signatures(tables: _MatchTables, p: Partition):
    """Per-state (need, have, in_block_ok) under the current partition.

    need: the (event, target block) pairs this state's own edges demand.
    have: the pairs this state can offer through silent closures.
    in_block_ok: no local controllable edge leaves the state's own block.
    """
    l, ctx = tables.l, tables.ctx
    need: dict[int, frozenset] = {}
    have: dict[int, frozenset] = {}
    ok: dict[int, bool] = {}
    for s in tables.closure:
        my_block = p.block_of[s]
        n = set()
        good = True
        for e, t in l.edges[s]:
            if ctx.is_silent(e):
                n.add((_TAU, p.block_of[t]))
            elif ctx.is_local(e):  # local controllable: must stay in-block
                if p.block_of[t] != my_block:
                    good = False
            else:
                n.add((e, p.block_of[t]))
        h = {(_TAU, p.block_of[t]) for t in tables.closure[s]}
        for e, targets in tables.moves[s].items():
            h.update((e, p.block_of[t]) for t in targets)
        need[s] = frozenset(n)
        have[s] = frozenset(h)
        ok[s] = good
    return need, have, ok


def _forbidden_pairs(l: Lts, ctx: HidingContext) -> frozenset[frozenset[int]]:
    """Distinct state pairs connected by a non-hidden transition.

    Merging such a pair would turn a shared (or goal-relevant) event into a
    quotient self-loop, breaking the invariant that introduced self-loops
    carry hidden events only; hidden events never resynchronize later, so
    their self-loops stay self-loops in every future composition.
    """
    out = set()
    for s in l.reachable():
        for e, t in l.edges[s]:
            if s != t and not ctx.is_local(e):
                out.add(frozenset((s, t)))
    return frozenset(out)


def _refine(l: Lts, p: Partition, ctx: HidingContext, tables: _MatchTables | None = None) -> Partition:
    """Greatest-fixpoint refinement: split blocks until every same-block
    pair mutually covers the other's needs and no same-block pair is
    connected by a visible transition."""
    if tables is None:
        tables = _MatchTables(l, ctx)
    forbidden = _forbidden_pairs(l, ctx)
    while True:
        need, have, in_block_ok = _signatures(tables, p)
        new_blocks: list[frozenset[int]] = []
        changed = False
        for block in p.blocks:
            if len(block) == 1:
                new_blocks.append(block)
                continue
            members = sorted(block)
            groups: list[list[int]] = []
            for s in members:
                if not in_block_ok[s]:
                    groups.append([s])
                    changed = True
                    continue
                placed = False
                for g in groups:
                    if len(g) == 1 and not in_block_ok[g[0]]:
                        continue
                    if all(
                        need[s] <= have[t]
                        and need[t] <= have[s]
                        and frozenset((s, t)) not in forbidden
                        for t in g
                    ):
                        g.append(s)
                        placed = True
                        break
                if not placed:
                    groups.append([s])
            if len(groups) > 1:
                changed = True
            new_blocks.extend(frozenset(g) for g in groups)
        if not changed:
            return p
        p = Partition.from_blocks(new_blocks)


def compute_soe(l: Lts, ctx: HidingContext, start: Partition | None = None) -> Partition:
    """A synthesis observational equivalence on the reachable states of
    ``l`` (not necessarily the coarsest one)."""
    if start is None:
        reach = l.reachable()
        div = _divergent(l, ctx)
        # Merging a state where the environment can take hidden steps
        # forever with one where it cannot leaves the quotient self-loop
        # without a single meaning (real spin vs finite chain), so states
        # only merge within a divergence class.  The deadlock sink is losing
        # by fiat and additionally stays in its own block.
        groups: dict[tuple, set[int]] = {}
        for s in reach:
            groups.setdefault((s in div, s == l.deadlock_sink), set()).add(s)
        start = Partition.from_blocks(groups.values())
    return _refine(l, start, ctx)


def _divergent(l: Lts, ctx: HidingContext) -> frozenset[int]:
    """States from which an infinite path of silent transitions exists:
    those that reach a cycle of the silent (hidden uncontrollable) edges."""
    succ: dict[int, set[int]] = {}
    for s in l.reachable():
        for e, t in l.edges[s]:
            if ctx.is_silent(e):
                succ.setdefault(s, set()).add(t)
    # states on a silent cycle, by iterated pruning of silent-terminal nodes
    alive = set(succ)
    changed = True
    while changed:
        changed = False
        for s in list(alive):
            if not any(t in alive for t in succ.get(s, ())):
                alive.discard(s)
                changed = True
    # backward closure over silent edges
    div = set(alive)
    work = list(alive)
    rev: dict[int, set[int]] = {}
    for s, ts in succ.items():
        for t in ts:
            rev.setdefault(t, set()).add(s)
    while work:
        t = work.pop()
        for s in rev.get(t, ()):
            if s not in div:
                div.add(s)
                work.append(s)
    return frozenset(div)


def verify_soe(l: Lts, p: Partition, ctx: HidingContext) -> bool:
    """Independent checker: every same-block ordered pair must satisfy both
    matching conditions of the full definition via bounded path search."""
    reachable = l.reachable()
    covered = set()
    for block in p.blocks:
        covered |= block
        members = sorted(block)
        for a in members:
            for b in members:
                if a == b:
                    continue
                if not _verify_pair(l, a, b, p, ctx):
                    return False
    return reachable <= covered


def _verify_pair(l: Lts, x1: int, x2: int, p: Partition, ctx: HidingContext) -> bool:
    """Direct re-implementation of the pair conditions, kept free of the
    refinement machinery so it can serve as its oracle."""
    for e, y1 in l.edges[x1]:
        want = p.block_of[y1]
        if not ctx.is_controllable(e):
            # x2 --(local unc)*-- [e if shared] --(local unc)*--> same block
            frontier = {x2}
            seen = set(frontier)
            for _ in range(l.n_states + 1):
                nxt = set()
                for s in frontier:
                    for f, t in l.edges[s]:
                        if ctx.is_local(f) and not ctx.is_controllable(f) and t not in seen:
                            nxt.add(t)
                seen |= nxt
                frontier = nxt
                if not frontier:
                    break
            if ctx.is_local(e):
                landing = set(seen)
            else:
                landing = set()
                for s in seen:
                    for f, t in l.edges[s]:
                        if f == e:
                            landing.add(t)
                extra = set(landing)
                while extra:
                    grow = set()
                    for s in extra:
                        for f, t in l.edges[s]:
                            if ctx.is_local(f) and not ctx.is_controllable(f) and t not in landing:
                                grow.add(t)
                    landing |= grow
                    extra = grow
            if not any(p.block_of.get(t) == want for t in landing):
                return False
        else:
            # x2 --(local, controllable steps must re-enter x1's block)*--> ...
            anchor = p.block_of[x1]
            seen = {x2}
            work = [x2]
            while work:
                s = work.pop()
                for f, t in l.edges[s]:
                    if not ctx.is_local(f) or t in seen:
                        continue
                    if ctx.is_controllable(f) and p.block_of.get(t) != anchor:
                        continue
                    seen.add(t)
                    work.append(t)
            if ctx.is_local(e):
                ok = any(p.block_of.get(t) == want for t in seen)
            else:
                ok = any(
                    f == e and p.block_of.get(t) == want
                    for s in seen
                    for f, t in l.edges[s]
                )
            if not ok:
                return False
    return True


def quotient(
    l: Lts, p: Partition, ctx: HidingContext | None = None
) -> tuple[Lts, frozenset[int]]:
    """Quotient LTS over the blocks of ``p`` plus the labels of self-loops
    the quotient introduced by collapsing acyclic in-block transitions.

    A self-loop label is reported in mu only when it lies on no cycle of
    the hidden uncontrollable transitions of ``l``: the loop then abstracts
    a finite chain the environment must eventually leave, and solving
    treats it with the eventual-silence assumption.  Labels the environment
    can genuinely repeat forever somewhere stay ordinary edges, because mu
    stripping is global per label and must not deny real spinning.
    """
    reachable = l.reachable()
    transitions = set()
    collapsed: set[int] = set()
    for s in reachable:
        bs = p.block_of[s]
        for e, t in l.edges[s]:
            bt = p.block_of[t]
            transitions.add((bs, e, bt))
            if bs == bt and s != t:
                collapsed.add(e)
    mu_prime = collapsed - _spin_labels(l, ctx)
    edges: list[set[tuple[int, int]]] = [set() for _ in p.blocks]
    for bs, e, bt in transitions:
        edges[bs].add((e, bt))
    sink = None
    if l.deadlock_sink is not None and l.deadlock_sink in p.block_of:
        sink = p.block_of[l.deadlock_sink]
    q = Lts(
        table=l.table,
        n_states=len(p.blocks),
        alphabet=l.alphabet,
        edges=tuple(tuple(sorted(o)) for o in edges),
        initial=p.block_of[l.initial],
        deadlock_sink=sink,
        origin=tuple(tuple(sorted(b)) for b in p.blocks),
    )
    return q, frozenset(mu_prime)


def _spin_labels(l: Lts, ctx: HidingContext | None) -> frozenset[int]:
    """Labels of hidden uncontrollable edges lying on a hidden cycle."""

    def silent(e: int) -> bool:
        return ctx.is_silent(e) if ctx is not None else True

    edges = [
        (s, e, t)
        for s in l.reachable()
        for e, t in l.edges[s]
        if silent(e)
    ]
    succ: dict[int, set[int]] = {}
    for s, _, t in edges:
        succ.setdefault(s, set()).add(t)

    def reaches(src: int, dst: int) -> bool:
        seen = set()
        work = [src]
        while work:
            z = work.pop()
            for w in succ.get(z, ()):
                if w == dst:
                    return True
                if w not in seen:
                    seen.add(w)
                    work.append(w)
        return False

    return frozenset(e for s, e, t in edges if s == t or reaches(t, s))


def _split_for_determinism(l: Lts, p: Partition) -> Partition:
    """Split every block whose members disagree on the blocks their
    same-label transitions reach; this removes one cause of quotient
    nondeterminism per round."""
    new_blocks = []
    for block in p.blocks:
        if len(block) == 1:
            new_blocks.append(block)
            continue
        groups: dict[tuple, set[int]] = {}
        for s in block:
            sig: dict[int, set[int]] = {}
            for e, t in l.edges[s]:
                sig.setdefault(e, set()).add(p.block_of[t])
            key = tuple(sorted((e, tuple(sorted(ts))) for e, ts in sig.items()))
            groups.setdefault(key, set()).add(s)
        new_blocks.extend(frozenset(g) for g in groups.values())
    return Partition.from_blocks(new_blocks)


def quotient_deterministic(
    l: Lts, ctx: HidingContext
) -> tuple[Lts, frozenset[int], Partition]:
    """Quotient by a valid equivalence, guaranteed deterministic.

    If the quotient by the computed equivalence is nondeterministic, blocks
    are split by successor-block signature and the equivalence is
    re-stabilized, terminating at the identity partition in the worst case.
    """
    p = compute_soe(l, ctx)
    while True:
        q, mu_prime = quotient(l, p, ctx)
        if q.is_deterministic():
            return q, mu_prime, p
        split = _split_for_determinism(l, p)
        if split.blocks == p.blocks:
            # signature split made no progress; fall back to identity
            split = Partition.identity(l.reachable())
        p = _refine(l, split, ctx)
