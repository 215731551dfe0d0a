"""Paired two-sample tests for the equality of many functional means.

Per-channel squared-L2 statistics with a global maximum, Gaussian
multiplier bootstrap calibration with family-wise error control, two
competitor statistics, and a Monte Carlo simulation harness.
"""

from .bootstrap import (
    BootstrapDistribution,
    MultiplierPlan,
    TestReport,
    bootstrap_draw,
    bootstrap_quantile,
    decide,
    ecdf_tail,
    fwer_estimate,
    run_bootstrap,
    run_bootstrap_multi,
)
from .errors import (
    BasisError,
    DomainError,
    FuncmaxError,
    GridError,
    GridMismatch,
    IngestError,
    IoError,
    MethodError,
    SpecError,
)
from .experiments import (
    Cell,
    CellResult,
    ExperimentSpec,
    read_results,
    run_channelwise_fwer,
    run_level,
    run_power,
    write_power_long,
    write_results,
)
from .sample import (
    CsvSchema,
    DifferenceMatrix,
    InterpolatedCurve,
    PairedFunctionalSample,
    TimeGrid,
    difference,
    export_csv,
    ingest_csv,
    interpolate,
)
from .simulate import (
    DgpConfig,
    EquicorrelationRoot,
    apply_alternative,
    draw_scores,
    equicorrelation_root,
    generate_null,
)
from .stats import (
    ChannelStats,
    ProjectionBasis,
    StatisticKind,
    async_channel_stat,
    async_stats,
    channel_stat,
    compute_stats,
    default_projection_basis,
    max_stat,
    projection_stat,
    proposed_stats,
)

__version__ = "0.1.0"
