"""Benchmark problem families.

Encodings are documented in docs/benchmarks.md.  Every generator is
deterministic; RANDOM is additionally parameterized by a seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .engine import ControlProblem
from .goals import EventExpr, Gr1Goal
from .lts import EventTable, Lts, UsageError, make_lts


@dataclass(frozen=True)
class BenchSpec:
    family: str  # DP, TL, RANDOM, EXAMPLE3
    n: int = 0
    k: int | None = None
    seed: int | None = None


def generate(spec: BenchSpec) -> ControlProblem:
    family = spec.family.upper()
    if family == "DP":
        if spec.n < 2:
            raise UsageError("DP needs n >= 2 philosophers")
        return dining_philosophers(spec.n)
    if family == "TL":
        if spec.n < 1 or spec.k is None or spec.k < 1:
            raise UsageError("TL needs n >= 1 machines and buffer capacity k >= 1")
        return transfer_line(spec.n, spec.k)
    if family == "RANDOM":
        if spec.n < 1 or spec.seed is None:
            raise UsageError("RANDOM needs n >= 1 parts and a seed")
        return random_problem(spec.n, spec.seed)
    if family == "EXAMPLE3":
        return example3()
    raise UsageError(f"unknown benchmark family '{spec.family}'")


def dining_philosophers(n: int, think: int = 2) -> ControlProblem:
    """n philosophers and n forks in a ring.

    Philosopher p thinks through a short private chain, picks up the left
    fork, then the right fork, eats, and releases both.  Pick-ups and
    eating are controllable; thinking and the release are uncontrollable.  Fork f is
    the left fork of philosopher f and the right fork of philosopher
    (f-1) mod n.  Goal: every philosopher eats infinitely often.

    The thinking chain (length ``think``) is fully local to one
    philosopher, so the compositional engine can hide and collapse it while
    the monolithic product pays for it in every factor.
    """
    names: list[str] = []
    flags: list[bool] = []
    for p in range(n):
        names += [f"tl{p}", f"tr{p}", f"eat{p}", f"rel{p}"]
        flags += [True, True, True, False]
        for i in range(think):
            names.append(f"th{p}_{i}")
            flags.append(False)
    table = EventTable(names=tuple(names), controllable=tuple(flags))
    ev = {name: i for i, name in enumerate(names)}

    def philosopher(p: int) -> Lts:
        alphabet = {ev[f"tl{p}"], ev[f"tr{p}"], ev[f"eat{p}"], ev[f"rel{p}"]}
        transitions = []
        for i in range(think):
            alphabet.add(ev[f"th{p}_{i}"])
            transitions.append((i, ev[f"th{p}_{i}"], i + 1))
        base = think  # state after the thinking chain
        transitions += [
            (base, ev[f"tl{p}"], base + 1),
            (base + 1, ev[f"tr{p}"], base + 2),
            (base + 2, ev[f"eat{p}"], base + 3),
            (base + 3, ev[f"rel{p}"], 0),
        ]
        return make_lts(
            table=table,
            n_states=base + 4,
            alphabet=alphabet,
            transitions=transitions,
        )

    def fork(f: int) -> Lts:
        left_user = f  # picks fork f up as its left fork
        right_user = (f - 1) % n  # picks fork f up as its right fork
        return make_lts(
            table=table,
            n_states=3,
            alphabet={
                ev[f"tl{left_user}"],
                ev[f"rel{left_user}"],
                ev[f"tr{right_user}"],
                ev[f"rel{right_user}"],
            },
            transitions=[
                (0, ev[f"tl{left_user}"], 1),
                (1, ev[f"rel{left_user}"], 0),
                (0, ev[f"tr{right_user}"], 2),
                (2, ev[f"rel{right_user}"], 0),
            ],
        )

    # Interleave along the ring so successive parts share events: fork f+1
    # joins philosophers f and f+1, and fork 0 closes the ring.
    parts: list[Lts] = []
    for p in range(n):
        parts.append(philosopher(p))
        parts.append(fork((p + 1) % n))
    goal = Gr1Goal(
        guarantees=tuple(EventExpr.literal(ev[f"eat{p}"]) for p in range(n)),
    )
    return ControlProblem(parts=tuple(parts), table=table, goal=goal)


def transfer_line(n: int, k: int) -> ControlProblem:
    """A pipeline of n machines with capacity-k buffers and a testing unit.

    Machine i starts (controllable) and finishes (uncontrollable); finishing
    deposits a part in buffer i, starting machine i+1 withdraws from buffer
    i.  The testing unit takes from the last buffer and accepts; both steps
    controllable.  Goal: parts are accepted infinitely often.
    """
    names: list[str] = []
    flags: list[bool] = []
    for i in range(n):
        names += [f"start{i}", f"finish{i}"]
        flags += [True, False]
    names += ["take", "accept"]
    flags += [True, True]
    table = EventTable(names=tuple(names), controllable=tuple(flags))
    ev = {name: i for i, name in enumerate(names)}

    parts: list[Lts] = []
    for i in range(n):
        parts.append(
            make_lts(
                table=table,
                n_states=2,
                alphabet={ev[f"start{i}"], ev[f"finish{i}"]},
                transitions=[
                    (0, ev[f"start{i}"], 1),
                    (1, ev[f"finish{i}"], 0),
                ],
            )
        )
    for i in range(n):
        fill = ev[f"finish{i}"]
        drain = ev[f"start{i + 1}"] if i + 1 < n else ev["take"]
        transitions = []
        for c in range(k):
            transitions.append((c, fill, c + 1))
        for c in range(1, k + 1):
            transitions.append((c, drain, c - 1))
        parts.append(
            make_lts(
                table=table,
                n_states=k + 1,
                alphabet={fill, drain},
                transitions=transitions,
            )
        )
    parts.append(
        make_lts(
            table=table,
            n_states=2,
            alphabet={ev["take"], ev["accept"]},
            transitions=[(0, ev["take"], 1), (1, ev["accept"], 0)],
        )
    )
    goal = Gr1Goal(guarantees=(EventExpr.literal(ev["accept"]),))
    return ControlProblem(parts=tuple(parts), table=table, goal=goal)


def random_problem(n: int, seed: int) -> ControlProblem:
    """Seeded random modular problem: n parts with <= 6 states each over a
    <= 8 event alphabet with controlled overlap, and a random goal with at
    most 2 assumptions and 2 guarantees."""
    rng = random.Random(seed)
    n_events = rng.randint(max(3, n), 8)
    names = tuple(f"e{i}" for i in range(n_events))
    flags = tuple(rng.random() < 0.5 for _ in range(n_events))
    if not any(flags):
        flags = (True,) + flags[1:]
    table = EventTable(names=names, controllable=flags)
    all_events = list(range(n_events))

    parts: list[Lts] = []
    for _ in range(n):
        n_states = rng.randint(2, 6)
        sz = rng.randint(2, min(5, n_events))
        alphabet = rng.sample(all_events, sz)
        transitions = []
        for s in range(n_states):
            for e in alphabet:
                if rng.random() < 0.55:
                    transitions.append((s, e, rng.randrange(n_states)))
        # keep the initial state alive so the plant is not trivially dead
        if not any(s == 0 for s, _, _ in transitions):
            transitions.append((0, rng.choice(alphabet), rng.randrange(n_states)))
        parts.append(
            make_lts(
                table=table,
                n_states=n_states,
                alphabet=set(alphabet),
                transitions=transitions,
            )
        )

    used = sorted(set().union(*(p.alphabet for p in parts)))

    def rand_expr() -> EventExpr:
        lits = rng.sample(used, min(len(used), rng.randint(1, 2)))
        return EventExpr.clause_of(
            (e, rng.random() < 0.8) for e in lits
        )

    assumptions = tuple(rand_expr() for _ in range(rng.randint(0, 2)))
    guarantees = tuple(rand_expr() for _ in range(rng.randint(1, 2)))
    goal = Gr1Goal(assumptions=assumptions, guarantees=guarantees)
    return ControlProblem(parts=tuple(parts), table=table, goal=goal)


def example3() -> ControlProblem:
    """Built-in 3-part fixture with one shared uncontrollable event.

    Two tightly coupled parts A and B share the uncontrollable u3 with a
    third part D; the goal asks for recurring cG1 and cG2 provided the
    uncontrollable uA1 keeps recurring.  The first compositional step
    synthesizes over A || B only and minimization shrinks it below the full
    composition.
    """
    names = ("uA1", "cG1", "cG2", "u3", "cA2", "cB1", "uB0", "cD1")
    flags = (False, True, True, False, True, True, False, True)
    table = EventTable(names=names, controllable=flags)
    ev = {name: i for i, name in enumerate(names)}

    # Part A: local work cA2 alternates with uA1; cG1 available after uA1;
    # u3 resets from anywhere past the start.
    a = make_lts(
        table=table,
        n_states=4,
        alphabet={ev["uA1"], ev["cG1"], ev["cA2"], ev["u3"]},
        transitions=[
            (0, ev["cA2"], 1),
            (1, ev["uA1"], 2),
            (2, ev["cG1"], 3),
            (3, ev["cA2"], 3),
            (3, ev["u3"], 0),
            (2, ev["u3"], 0),
            (1, ev["u3"], 0),
        ],
    )
    # Part B: produces cG2 after an internal uncontrollable warm-up uB0;
    # synchronizes on u3 and on cG1.  uB0 is local to B, so the first
    # compositional step can hide and collapse it.
    b = make_lts(
        table=table,
        n_states=4,
        alphabet={ev["cG1"], ev["cG2"], ev["cB1"], ev["uB0"], ev["u3"]},
        transitions=[
            (0, ev["cB1"], 1),
            (1, ev["uB0"], 2),
            (2, ev["cG1"], 2),
            (2, ev["cG2"], 3),
            (3, ev["cB1"], 3),
            (3, ev["u3"], 0),
        ],
    )
    # Part D: independent worker that also observes u3.
    d = make_lts(
        table=table,
        n_states=2,
        alphabet={ev["cD1"], ev["u3"]},
        transitions=[
            (0, ev["cD1"], 1),
            (1, ev["u3"], 0),
            (1, ev["cD1"], 1),
        ],
    )
    goal = Gr1Goal(
        assumptions=(EventExpr.literal(ev["uA1"]),),
        guarantees=(EventExpr.literal(ev["cG1"]), EventExpr.literal(ev["cG2"])),
    )
    return ControlProblem(parts=(a, b, d), table=table, goal=goal)
