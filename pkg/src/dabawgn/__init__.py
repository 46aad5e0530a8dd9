"""Finite-support capacity-achieving input distributions for AWGN channels.

Dynamic-assignment Blahut-Arimoto solvers for the amplitude-constrained
channel (capacity bracketed by achieved rate and a relative-entropy upper
bound) and for the power-constrained channel at fixed input cardinality,
together with the sweep/selection tooling and classical reference curves.
"""

from .baselines import equilattice, equilattice_rate, shannon_capacity_bits
from .ba import (
    BaOptions,
    BaOutcome,
    ba_fixed_support,
    ba_power_constrained,
    solve_multiplier_secant,
)
from .dab_ac import (
    DabAcOptions,
    DabAcResult,
    ac_optimum_fixed_cardinality,
    add_mass_point,
    dab_ac_solve,
    find_x_max,
    improve_locations,
)
from .dab_pc import (
    DabPcOptions,
    DabPcResult,
    FlowDecomposition,
    dab_pc_solve,
    decompose_flow,
    power_preserving_move,
    round_robin_pairs,
)
from .errors import (
    BracketInvalid,
    DabError,
    Infeasible,
    InfeasibleFlow,
    MaxItersExceeded,
    MaxOuterItersExceeded,
    NoMovableIndex,
    NoSatisfyingCardinality,
    NumericalUnderflow,
    SecantDivergence,
)
from .numerics import (
    DEFAULT_QUADRATURE,
    AwgnChannel,
    FinitePmf,
    QuadratureScheme,
    mutual_information,
    output_density,
    peak_snr_db,
    pmf_entropy,
    pmf_mean,
    pmf_power,
    relative_entropy_at,
    relative_entropy_profile,
    true_snr_db,
)
from .sweep import (
    AcSweepRecord,
    PcSweepRecord,
    SelectionRecord,
    ac_sweep,
    detect_transition,
    min_cardinality_selection,
    pc_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AwgnChannel",
    "AcSweepRecord",
    "BaOptions",
    "BaOutcome",
    "BracketInvalid",
    "DEFAULT_QUADRATURE",
    "DabAcOptions",
    "DabAcResult",
    "DabError",
    "DabPcOptions",
    "DabPcResult",
    "FinitePmf",
    "FlowDecomposition",
    "Infeasible",
    "InfeasibleFlow",
    "MaxItersExceeded",
    "MaxOuterItersExceeded",
    "NoMovableIndex",
    "NoSatisfyingCardinality",
    "NumericalUnderflow",
    "PcSweepRecord",
    "QuadratureScheme",
    "SecantDivergence",
    "SelectionRecord",
    "ac_optimum_fixed_cardinality",
    "ac_sweep",
    "add_mass_point",
    "ba_fixed_support",
    "ba_power_constrained",
    "dab_ac_solve",
    "dab_pc_solve",
    "decompose_flow",
    "detect_transition",
    "equilattice",
    "equilattice_rate",
    "find_x_max",
    "improve_locations",
    "min_cardinality_selection",
    "mutual_information",
    "output_density",
    "pc_sweep",
    "peak_snr_db",
    "pmf_entropy",
    "pmf_mean",
    "pmf_power",
    "power_preserving_move",
    "relative_entropy_at",
    "relative_entropy_profile",
    "round_robin_pairs",
    "shannon_capacity_bits",
    "solve_multiplier_secant",
    "true_snr_db",
]
