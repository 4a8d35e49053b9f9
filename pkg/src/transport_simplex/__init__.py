"""Exact transportation-problem solver: revised simplex with a catalogue of
initialization rules and pivot strategies, the Shortlist Method, and a
benchmark harness for runtime scaling."""

from .exceptions import InvalidProblemError, ParseError, SolverAbort, StructuralError
from .problem import (
    Problem,
    TransportPlan,
    format_plan,
    format_problem,
    objective,
    parse_plan,
    parse_problem,
    plan_residual,
    read_problem,
    validate,
    write_problem,
)
from .initial import INIT_RULES, InitRule, build_initial_plan, potential_estimates, repair_degeneracy
from .simplex import (
    PIVOT_STRATEGIES,
    Cycle,
    DualPrices,
    PivotStrategy,
    SolveStats,
    apply_pivot,
    compute_duals,
    find_cycle,
    relative_cost,
    select_pivot,
    solve_to_optimality,
)
from .shortlist import (
    ShortlistParams,
    Shortlists,
    build_shortlists,
    default_params,
    shortlist_initial_plan,
    shortlist_phase3,
    solve_shortlist,
)
from .verify import Certificate, brute_force_optimum, check_certificate, is_optimal
from .bench import (
    BenchRecord,
    FitResult,
    InstanceSpec,
    fit_power_law,
    generate_instance,
    read_csv,
    run_benchmark,
    write_csv,
)

__version__ = "0.1.0"


def solve(problem, method="modrowmin", pivot="modrow"):
    """Optimal plan of ``problem``; ``method`` is an init rule or ``"shortlist"``."""
    if method == "shortlist":
        return solve_shortlist(problem, pivot=pivot)[0]
    return solve_to_optimality(problem, build_initial_plan(problem, method), pivot, copy=False)[0]
