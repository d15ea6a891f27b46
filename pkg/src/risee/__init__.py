"""Energy-efficiency optimization of RIS-assisted MIMO links under exposure constraints."""

from .model import (
    ChannelPair,
    DimensionError,
    EvalResult,
    ExposureCoefficients,
    FeasibilityReport,
    LinkConfig,
    PreconditionError,
    SystemParams,
    evaluate,
    is_feasible,
    wrap_phases,
)
from .subsolvers import (
    ConicLinearProblem,
    PowerProblem,
    align_and_solve_beamformer,
    align_and_solve_combiner,
    optimize_phases,
    optimize_power,
    select_single_antenna,
    solve_conic_linear,
    solve_conic_linear_kkt,
)
from .algorithms import (
    SCHEMES,
    AlternatingOptions,
    SchemeRun,
    SolveTrace,
    alternating_max,
    global_special_case,
    random_phases,
    run_scheme,
)
from .channel import ChannelModel, channel_digest, derive_seed, dump_channel, load_channel, sample
from .experiments import (
    AggregateRow,
    SweepSpec,
    SweepTable,
    TrialRecord,
    read_csv,
    run_sweep,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateRow",
    "AlternatingOptions",
    "ChannelModel",
    "ChannelPair",
    "ConicLinearProblem",
    "DimensionError",
    "EvalResult",
    "ExposureCoefficients",
    "FeasibilityReport",
    "LinkConfig",
    "PowerProblem",
    "PreconditionError",
    "SCHEMES",
    "SchemeRun",
    "SolveTrace",
    "SweepSpec",
    "SweepTable",
    "SystemParams",
    "TrialRecord",
    "align_and_solve_beamformer",
    "align_and_solve_combiner",
    "alternating_max",
    "random_phases",
    "channel_digest",
    "derive_seed",
    "dump_channel",
    "evaluate",
    "global_special_case",
    "is_feasible",
    "load_channel",
    "optimize_phases",
    "optimize_power",
    "read_csv",
    "run_scheme",
    "run_sweep",
    "sample",
    "select_single_antenna",
    "solve_conic_linear",
    "solve_conic_linear_kkt",
    "wrap_phases",
    "write_csv",
]
