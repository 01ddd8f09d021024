"""Problem-file parsing, printing, and DOT export.

The format is line-oriented with ``#`` comments:

    events <name>...
    controllable <name>...
    lts <Name> { init <state>; alphabet <name>...; <state> -<event>-> <state>; ... }

The optional ``alphabet`` line lists events the LTS observes beyond the
labels of its transitions; a controller that permanently disables an event
still synchronizes on it.
    goal assume <expr> [, <expr>...] guarantee <expr> [, <expr>...]

Expressions are boolean combinations of event names with ``! & |`` and
parentheses.  ``assume`` may be omitted (trivially true antecedent).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .engine import ControlProblem
from .goals import EventExpr, Gr1Goal
from .lts import EventTable, Lts, make_lts


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # word, punct, end
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|->|[{};,()!&|]|-|\S")
_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _tokenize(text: str) -> list[Token]:
    tokens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        for m in _TOKEN_RE.finditer(line):
            t = m.group(0)
            kind = "word" if _WORD_RE.match(t) else "punct"
            tokens.append(Token(kind, t, lineno, m.start() + 1))
    tokens.append(Token("end", "", len(text.splitlines()) + 1, 1))
    return tokens


class _Stream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "end":
            self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected '{text}', found '{t.text or 'end of file'}'", t.line, t.col)
        return t

    def expect_word(self, what: str) -> Token:
        t = self.next()
        if t.kind != "word":
            raise ParseError(f"expected {what}, found '{t.text or 'end of file'}'", t.line, t.col)
        return t

    def error(self, message: str):
        t = self.peek()
        raise ParseError(message, t.line, t.col)


@dataclass
class ProblemFile:
    """A parsed problem plus the names needed to print it back."""

    problem: ControlProblem
    lts_names: tuple[str, ...]
    state_names: tuple[tuple[str, ...], ...]
    goal_present: bool = True


# -- boolean expressions -------------------------------------------------

def _parse_expr(s: _Stream, table: EventTable) -> EventExpr:
    return _parse_or(s, table)


def _parse_or(s: _Stream, table: EventTable):
    left = _parse_and(s, table)
    while s.peek().text == "|":
        s.next()
        right = _parse_and(s, table)
        left = _cnf_or(left, right)
    return left


def _parse_and(s: _Stream, table: EventTable):
    left = _parse_atom(s, table)
    while s.peek().text == "&":
        s.next()
        right = _parse_atom(s, table)
        left = EventExpr.conj([left, right])
    return left


def _parse_atom(s: _Stream, table: EventTable) -> EventExpr:
    t = s.peek()
    if t.text == "(":
        s.next()
        inner = _parse_or(s, table)
        s.expect(")")
        return inner
    if t.text == "!":
        s.next()
        return _cnf_not(_parse_atom(s, table))
    if t.kind == "word":
        s.next()
        if t.text == "true":
            return EventExpr.true()
        if t.text == "false":
            return EventExpr.false()
        try:
            return EventExpr.literal(table.id_of(t.text))
        except KeyError:
            raise ParseError(f"undeclared event '{t.text}'", t.line, t.col) from None
    s.error(f"expected expression, found '{t.text or 'end of file'}'")


def _cnf_or(a: EventExpr, b: EventExpr) -> EventExpr:
    if a.is_true() or b.is_true():
        return EventExpr.true()
    if a.is_false():
        return b
    if b.is_false():
        return a
    clauses = frozenset(ca | cb for ca in a.clauses for cb in b.clauses)
    return EventExpr(clauses)


def _cnf_not(a: EventExpr) -> EventExpr:
    if a.is_true():
        return EventExpr.false()
    if a.is_false():
        return EventExpr.true()
    # negate clause by clause: not(AND of clauses) = OR of negated clauses
    result = EventExpr.false()
    for clause in a.clauses:
        negated = EventExpr.conj(
            [EventExpr.literal(e, not pos) for e, pos in clause]
        )
        result = _cnf_or(result, negated)
    return result


# -- problem files -------------------------------------------------------

def parse_problem(text: str, require_goal: bool = False) -> ProblemFile:
    s = _Stream(_tokenize(text))
    event_names: list[str] = []
    controllable_names: set[str] = set()
    raw_ltss: list[tuple[str, str, list[tuple[str, Token, str]], dict[str, int], Token]] = []
    goal: Gr1Goal | None = None
    table: EventTable | None = None
    lts_list: list[Lts] = []
    lts_names: list[str] = []
    state_names: list[tuple[str, ...]] = []

    def finished_table() -> EventTable:
        nonlocal table
        if table is None:
            table = EventTable(
                names=tuple(event_names),
                controllable=tuple(n in controllable_names for n in event_names),
            )
        return table

    while True:
        t = s.peek()
        if t.kind == "end":
            break
        if t.text == "events":
            if table is not None:
                s.error("'events' must precede all lts and goal sections")
            s.next()
            while s.peek().kind == "word" and s.peek().line == t.line:
                name = s.next().text
                if name in event_names:
                    raise ParseError(f"duplicate event '{name}'", t.line, t.col)
                event_names.append(name)
        elif t.text == "controllable":
            if table is not None:
                s.error("'controllable' must precede all lts and goal sections")
            s.next()
            while s.peek().kind == "word" and s.peek().line == t.line:
                tok = s.next()
                if tok.text not in event_names:
                    raise ParseError(f"undeclared event '{tok.text}'", tok.line, tok.col)
                controllable_names.add(tok.text)
        elif t.text == "lts":
            lts, name, snames = _parse_lts_block(s, finished_table())
            if name in lts_names:
                raise ParseError(f"duplicate lts '{name}'", t.line, t.col)
            lts_list.append(lts)
            lts_names.append(name)
            state_names.append(snames)
        elif t.text == "goal":
            if goal is not None:
                s.error("duplicate goal section")
            s.next()
            goal = _parse_goal(s, finished_table())
        else:
            s.error(f"unexpected '{t.text}'")

    if not event_names:
        raise ParseError("no events declared", 1, 1)
    if not lts_list:
        raise ParseError("no lts blocks declared", 1, 1)
    if goal is None:
        if require_goal:
            raise ParseError("missing goal section", 1, 1)
        goal = Gr1Goal.top()
    problem = ControlProblem(parts=tuple(lts_list), table=finished_table(), goal=goal)
    return ProblemFile(
        problem=problem,
        lts_names=tuple(lts_names),
        state_names=tuple(state_names),
        goal_present=goal is not None,
    )


def _parse_lts_block(s: _Stream, table: EventTable):
    s.expect("lts")
    name = s.expect_word("lts name").text
    s.expect("{")
    states: dict[str, int] = {}
    order: list[str] = []

    def intern(tok: Token) -> int:
        if tok.text not in states:
            states[tok.text] = len(order)
            order.append(tok.text)
        return states[tok.text]

    initial: int | None = None
    declared_alphabet: set[int] = set()
    transitions: list[tuple[int, int, int]] = []
    seen_edges: set[tuple[int, int, int]] = set()
    det_guard: dict[tuple[int, int], int] = {}
    while True:
        t = s.peek()
        if t.text == "}":
            s.next()
            break
        if t.text == "init":
            s.next()
            tok = s.expect_word("state name")
            if initial is not None:
                raise ParseError("duplicate init declaration", tok.line, tok.col)
            initial = intern(tok)
            s.expect(";")
            continue
        if t.text == "alphabet":
            s.next()
            while s.peek().kind == "word":
                tok = s.next()
                try:
                    declared_alphabet.add(table.id_of(tok.text))
                except KeyError:
                    raise ParseError(
                        f"undeclared event '{tok.text}'", tok.line, tok.col
                    ) from None
            s.expect(";")
            continue
        src_tok = s.expect_word("state name")
        src = intern(src_tok)
        s.expect("-")
        ev_tok = s.expect_word("event name")
        try:
            ev = table.id_of(ev_tok.text)
        except KeyError:
            raise ParseError(f"undeclared event '{ev_tok.text}'", ev_tok.line, ev_tok.col) from None
        s.expect("->")
        dst_tok = s.expect_word("state name")
        dst = intern(dst_tok)
        s.expect(";")
        edge = (src, ev, dst)
        if edge in seen_edges:
            raise ParseError("duplicate transition", src_tok.line, src_tok.col)
        seen_edges.add(edge)
        prior = det_guard.get((src, ev))
        if prior is not None and prior != dst:
            raise ParseError(
                f"nondeterministic transitions on '{ev_tok.text}' from '{src_tok.text}'",
                src_tok.line,
                src_tok.col,
            )
        det_guard[(src, ev)] = dst
        transitions.append(edge)
    if initial is None:
        s.error(f"lts '{name}' has no init declaration")
    alphabet = {e for _, e, _ in transitions} | declared_alphabet
    lts = make_lts(
        table=table,
        n_states=max(len(order), 1),
        alphabet=alphabet,
        transitions=transitions,
        initial=initial,
    )
    return lts, name, tuple(order)


def _parse_goal(s: _Stream, table: EventTable) -> Gr1Goal:
    assumptions: list[EventExpr] = []
    if s.peek().text == "assume":
        s.next()
        assumptions.append(_parse_expr(s, table))
        while s.peek().text == ",":
            s.next()
            assumptions.append(_parse_expr(s, table))
    s.expect("guarantee")
    guarantees = [_parse_expr(s, table)]
    while s.peek().text == ",":
        s.next()
        guarantees.append(_parse_expr(s, table))
    return Gr1Goal(assumptions=tuple(assumptions), guarantees=tuple(guarantees))


# -- printing ------------------------------------------------------------

def print_problem(pf: ProblemFile) -> str:
    table = pf.problem.table
    lines = [f"events {' '.join(table.names)}"]
    ctrl = [n for n, c in zip(table.names, table.controllable) if c]
    if ctrl:
        lines.append(f"controllable {' '.join(ctrl)}")
    for lts, name, snames in zip(pf.problem.parts, pf.lts_names, pf.state_names):
        lines.append(format_lts(lts, name, snames))
    goal = pf.problem.goal
    if goal.assumptions or goal.guarantees:
        lines.append("goal " + goal.render(table))
    return "\n".join(lines) + "\n"


def format_lts(lts: Lts, name: str, state_names: tuple[str, ...] | None = None) -> str:
    if state_names is None or len(state_names) != lts.n_states:
        state_names = tuple(f"s{i}" for i in range(lts.n_states))
    parts = [f"lts {name} {{", f"  init {state_names[lts.initial]};"]
    used = {e for outs in lts.edges for e, _ in outs}
    silent = sorted(lts.alphabet - used)
    if silent:
        names = " ".join(lts.table.name_of(e) for e in silent)
        parts.append(f"  alphabet {names};")
    for s in range(lts.n_states):
        for e, t in lts.edges[s]:
            parts.append(
                f"  {state_names[s]} -{lts.table.name_of(e)}-> {state_names[t]};"
            )
    parts.append("}")
    return "\n".join(parts)


def format_controllers(controllers: list[Lts], table: EventTable) -> str:
    """Serialize controllers as a standalone parseable file."""
    lines = [f"events {' '.join(table.names)}"]
    ctrl = [n for n, c in zip(table.names, table.controllable) if c]
    if ctrl:
        lines.append(f"controllable {' '.join(ctrl)}")
    for i, c in enumerate(controllers):
        lines.append(format_lts(c, f"C{i}"))
    return "\n".join(lines) + "\n"


def parse_controllers(text: str, table: EventTable) -> list[Lts]:
    """Parse a controller file and re-intern it over an existing table."""
    pf = parse_problem(text)
    other = pf.problem.table
    if other.names != table.names or other.controllable != table.controllable:
        raise ParseError("controller file event table does not match the problem", 1, 1)
    return list(pf.problem.parts)


# -- DOT export ----------------------------------------------------------

def to_dot(lts: Lts, name: str = "lts") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  node [shape=circle];']
    for s in range(lts.n_states):
        shape = "doublecircle" if s == lts.deadlock_sink else "circle"
        lines.append(f'  n{s} [label="{s}", shape={shape}];')
    lines.append(f"  init [shape=point]; init -> n{lts.initial};")
    for s in range(lts.n_states):
        for e, t in lts.edges[s]:
            style = "solid" if lts.table.is_controllable(e) else "dashed"
            lines.append(
                f'  n{s} -> n{t} [label="{lts.table.name_of(e)}", style={style}];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
