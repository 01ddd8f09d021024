"""GR(1) goals over event labels.

A goal is a pair of lists of boolean event expressions: recurrence
assumptions and recurrence guarantees.  Expressions are kept in CNF and are
evaluated per transition label under the convention that at every trace
position exactly the occurring event is true.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lts import EventTable

# A literal is (event, polarity); an expression is a frozenset of clauses,
# each clause a frozenset of literals.  TRUE is the empty CNF, FALSE is the
# CNF containing one empty clause.

Literal = tuple[int, bool]
Clause = frozenset
Cnf = frozenset


@dataclass(frozen=True)
class EventExpr:
    """Boolean combination of events in CNF."""

    clauses: frozenset[frozenset[Literal]]

    @staticmethod
    def true() -> "EventExpr":
        return EventExpr(frozenset())

    @staticmethod
    def false() -> "EventExpr":
        return EventExpr(frozenset([frozenset()]))

    @staticmethod
    def literal(event: int, positive: bool = True) -> "EventExpr":
        return EventExpr(frozenset([frozenset([(event, positive)])]))

    @staticmethod
    def conj(parts) -> "EventExpr":
        clauses = frozenset().union(*(p.clauses for p in parts)) if parts else frozenset()
        expr = EventExpr(clauses)
        return EventExpr.false() if expr.is_false() else expr

    @staticmethod
    def clause_of(literals) -> "EventExpr":
        """Disjunction of literals as a single clause."""
        lits = frozenset(literals)
        if not lits:
            return EventExpr.false()
        return EventExpr(frozenset([lits]))

    def is_true(self) -> bool:
        return not self.clauses

    def is_false(self) -> bool:
        return any(not c for c in self.clauses)

    def events(self) -> frozenset[int]:
        return frozenset(e for c in self.clauses for e, _ in c)

    def satisfied_by(self, label: int) -> bool:
        """Evaluate under {label -> true, every other event -> false}."""
        if self.is_false():
            return False
        return all(
            any((e == label) == pos for e, pos in clause)
            for clause in self.clauses
        )

    def render(self, table: EventTable) -> str:
        if self.is_true():
            return "true"
        if self.is_false():
            return "false"
        parts = []
        for clause in sorted(self.clauses, key=lambda c: sorted(c)):
            lits = [
                ("" if pos else "!") + table.name_of(e)
                for e, pos in sorted(clause)
            ]
            text = " | ".join(lits)
            parts.append(f"({text})" if len(lits) > 1 and len(self.clauses) > 1 else text)
        return " & ".join(parts)


def edge_satisfies(e: EventExpr, label: int) -> bool:
    return e.satisfied_by(label)


@dataclass(frozen=True)
class Gr1Goal:
    """Conjunction of recurrence assumptions implying recurrence guarantees.

    An empty assumption list is the trivially true antecedent; an empty
    guarantee list is the trivially true goal.  ``vacuous`` marks goals whose
    antecedent became unsatisfiable under projection.
    """

    assumptions: tuple[EventExpr, ...] = ()
    guarantees: tuple[EventExpr, ...] = ()
    vacuous: bool = False

    @staticmethod
    def top() -> "Gr1Goal":
        return Gr1Goal()

    def alphabet(self) -> frozenset[int]:
        evs: frozenset[int] = frozenset()
        for x in self.assumptions + self.guarantees:
            evs |= x.events()
        return evs

    def render(self, table: EventTable) -> str:
        g = ", ".join(x.render(table) for x in self.guarantees) or "true"
        if not self.assumptions:
            return f"guarantee {g}"
        a = ", ".join(x.render(table) for x in self.assumptions)
        return f"assume {a} guarantee {g}"


def goal_alphabet(g: Gr1Goal) -> frozenset[int]:
    return g.alphabet()


def project(g: Gr1Goal, target_alphabet) -> Gr1Goal:
    """Weaken ``g`` so it only mentions events of ``target_alphabet``.

    Literals of events outside the target become false inside assumptions
    (strengthening the antecedent) and true inside guarantees (weakening the
    consequent), then the CNF is simplified.  An assumption collapsing to
    false makes the goal vacuously true: guarantees are dropped and the
    ``vacuous`` flag is set.
    """
    target = frozenset(target_alphabet)

    def strip_assumption(x: EventExpr) -> EventExpr:
        clauses = []
        for clause in x.clauses:
            kept = frozenset(l for l in clause if l[0] in target)
            if not kept:
                return EventExpr.false()
            clauses.append(kept)
        return EventExpr(frozenset(clauses))

    def strip_guarantee(x: EventExpr) -> EventExpr:
        if x.is_false():
            return x
        kept = frozenset(c for c in x.clauses if all(l[0] in target for l in c))
        return EventExpr(kept)

    assumptions = tuple(strip_assumption(x) for x in g.assumptions)
    if any(x.is_false() for x in assumptions):
        return Gr1Goal(assumptions=assumptions, guarantees=(), vacuous=True)
    guarantees = tuple(
        x for x in (strip_guarantee(y) for y in g.guarantees) if not x.is_true()
    )
    return Gr1Goal(assumptions=assumptions, guarantees=guarantees, vacuous=g.vacuous)


@dataclass(frozen=True)
class EffectiveGoal:
    """A goal together with the self-loop events whose eventual silence is
    assumed: denotes ``[]<>(/\\ not l for l in mu) => base``."""

    base: Gr1Goal
    mu: frozenset[int] = field(default_factory=frozenset)

    def flatten(self) -> Gr1Goal:
        """Fold the mu assumption into the base assumption list.

        The wrapper is a single recurrence of the conjunction (a position
        where no mu event occurs), not one recurrence per event.
        """
        if not self.mu:
            return self.base
        conj = EventExpr.conj(
            [EventExpr.literal(l, positive=False) for l in sorted(self.mu)]
        )
        return Gr1Goal(
            assumptions=self.base.assumptions + (conj,),
            guarantees=self.base.guarantees,
            vacuous=self.base.vacuous,
        )


def wrap_mu(g: Gr1Goal, mu) -> EffectiveGoal:
    return EffectiveGoal(base=g, mu=frozenset(mu))


def normalized(g: Gr1Goal) -> Gr1Goal:
    """Replace empty assumption/guarantee lists with the explicit constant
    true, so solver and verifier can iterate uniformly."""
    assumptions = g.assumptions or (EventExpr.true(),)
    guarantees = g.guarantees or (EventExpr.true(),)
    return Gr1Goal(assumptions=assumptions, guarantees=guarantees)


def holds_on_lasso(g: Gr1Goal, prefix, cycle) -> bool:
    """GR(1) satisfaction on the ultimately periodic trace prefix.cycle^w.

    A recurrence []<>x holds iff some label of the cycle satisfies x; the
    prefix is irrelevant.  This evaluator is the shared semantic reference
    for solver and verifier tests.
    """
    del prefix
    n = normalized(g)
    assumptions_hold = all(
        any(edge_satisfies(x, l) for l in cycle) for x in n.assumptions
    )
    if not assumptions_hold:
        return True
    return all(any(edge_satisfies(x, l) for l in cycle) for x in n.guarantees)
