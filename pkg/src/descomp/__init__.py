"""Explicit-state compositional controller synthesis for modular discrete
event systems with GR(1) liveness goals."""

from .engine import (
    ControlProblem,
    ResourceBudgetExceeded,
    SolutionBundle,
    comp_synthesis,
    heuristic_first_two,
    monolithic_synthesis,
    partial_synthesis,
)
from .goals import EffectiveGoal, EventExpr, Gr1Goal, holds_on_lasso, project, wrap_mu
from .generators import BenchSpec, generate
from .lts import (
    ConfigurationError,
    EventTable,
    Lts,
    Unrealizable,
    UsageError,
    compose,
    compose_all,
    isomorphic,
    make_lts,
)
from .minimize import HidingContext, Partition, compute_soe, quotient, verify_soe
from .solver import extract_live_controller, extract_safe_controller, solve_gr1
from .textio import ParseError, parse_problem, print_problem, to_dot
from .verify import VerificationReport, brute_force_realizability, check_solution

__all__ = [
    "BenchSpec",
    "ConfigurationError",
    "ControlProblem",
    "EffectiveGoal",
    "EventExpr",
    "EventTable",
    "Gr1Goal",
    "HidingContext",
    "Lts",
    "ParseError",
    "Partition",
    "ResourceBudgetExceeded",
    "SolutionBundle",
    "Unrealizable",
    "UsageError",
    "VerificationReport",
    "brute_force_realizability",
    "check_solution",
    "comp_synthesis",
    "compose",
    "compose_all",
    "compute_soe",
    "extract_live_controller",
    "extract_safe_controller",
    "generate",
    "heuristic_first_two",
    "holds_on_lasso",
    "isomorphic",
    "make_lts",
    "monolithic_synthesis",
    "parse_problem",
    "partial_synthesis",
    "print_problem",
    "project",
    "quotient",
    "solve_gr1",
    "to_dot",
    "verify_soe",
    "wrap_mu",
]
