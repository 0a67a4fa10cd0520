"""Deterministic simulator and analysis harness for consensus played as
a game by correct, rational, crash and Byzantine players under partial
synchrony.

The package splits into model (configurations, messages, signatures),
engine (scheduler game loop and traces), protocol/hardening (the voting
protocol and its accountable extension), analysis (utilities, deviation
menus, equilibrium checkers, budget calculators), suites (named
invariant grids and sweeps), corpus (bundled scenarios), and a thin
HTTP/CLI surface.
"""

from .analysis import (
    NO_VIOLATION,
    VIOLATION,
    Deviation,
    EquilibriumReport,
    assign_utilities,
    byz_menu,
    check_crash_robustness,
    check_effective_baiting,
    check_k_resilience,
    check_kt_robustness,
    check_strong_baiting,
    check_t_crash_immunity,
    check_tt_immunity,
    clique_deviation,
    crash_menu,
    equivocation_deviation,
    feasible_disagreement,
    joint_deviation,
    map_crash_robust_to_immune,
    map_crash_robust_to_robust,
    map_immune_to_crash_robust,
    map_robust_to_crash_robust,
    min_baiters,
    probe_utilities,
)
from .corpus import build_scenario, corpus_names, load_scenario, scenario_path
from .engine import (
    AGREEMENT,
    DISAGREEMENT,
    NON_TERMINATION,
    RunResult,
    parse_trace,
    replay,
    run,
    write_trace,
)
from .errors import (
    CapExceeded,
    ConstraintUnsatisfiable,
    InvalidBudget,
    InvalidTrace,
    NoEvidence,
    NoImmuneQuorum,
    NotApplicable,
    PreconditionFailed,
    RclError,
    ReplayDivergence,
    ScenarioError,
)
from .model import (
    VALUATIONS,
    ByzSpec,
    BaitSpec,
    CorrectSpec,
    CrashSpec,
    DisagreeSpec,
    PartitionSpec,
    PunishSpec,
    RandomSpec,
    RationalFollowSpec,
    RoleKind,
    RoundRobinSpec,
    ScenarioConfig,
    UtilityParams,
    make_config,
    valuation,
)
from .protocol import ProtocolParams, default_params, immune_params
from .service import create_app
from .suites import (
    CSV_HEADER,
    PROPERTIES,
    THEOREMS,
    boundary_cells,
    check_theorem,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AGREEMENT",
    "BaitSpec",
    "ByzSpec",
    "CSV_HEADER",
    "CapExceeded",
    "ConstraintUnsatisfiable",
    "CorrectSpec",
    "CrashSpec",
    "DISAGREEMENT",
    "Deviation",
    "DisagreeSpec",
    "EquilibriumReport",
    "InvalidBudget",
    "InvalidTrace",
    "NON_TERMINATION",
    "NO_VIOLATION",
    "NoEvidence",
    "NoImmuneQuorum",
    "NotApplicable",
    "PROPERTIES",
    "PartitionSpec",
    "PreconditionFailed",
    "ProtocolParams",
    "PunishSpec",
    "RandomSpec",
    "RationalFollowSpec",
    "RclError",
    "ReplayDivergence",
    "RoleKind",
    "RoundRobinSpec",
    "RunResult",
    "ScenarioConfig",
    "ScenarioError",
    "THEOREMS",
    "UtilityParams",
    "VALUATIONS",
    "VIOLATION",
    "assign_utilities",
    "boundary_cells",
    "build_scenario",
    "byz_menu",
    "check_crash_robustness",
    "check_effective_baiting",
    "check_k_resilience",
    "check_kt_robustness",
    "check_strong_baiting",
    "check_t_crash_immunity",
    "check_theorem",
    "check_tt_immunity",
    "clique_deviation",
    "corpus_names",
    "crash_menu",
    "create_app",
    "default_params",
    "equivocation_deviation",
    "feasible_disagreement",
    "immune_params",
    "joint_deviation",
    "load_scenario",
    "make_config",
    "map_crash_robust_to_immune",
    "map_crash_robust_to_robust",
    "map_immune_to_crash_robust",
    "map_robust_to_crash_robust",
    "min_baiters",
    "parse_trace",
    "probe_utilities",
    "replay",
    "run",
    "scenario_path",
    "sweep",
    "valuation",
    "write_trace",
    "__version__",
]
