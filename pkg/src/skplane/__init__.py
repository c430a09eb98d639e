"""Weekly higher moments of asset panels, S-K plane bounds, and panel fits."""

from .ingest import (
    CsvSchema,
    Observation,
    RawPanel,
    ReturnSeries,
    assemble_panel,
    compute_returns,
    parse_observations,
)
from .moments import (
    DeltaRegime,
    MomentPanel,
    MomentRecord,
    Stats,
    delta,
    delta_regime,
    descriptive_stats,
    kurtosis,
    skewness,
    weekly_moments,
)
from .plane import (
    cristelli_power_law,
    export_heatmap,
    export_plane,
    klaassen_lower_bound,
    pearson_lower_bound,
    quadratic_curve,
)
from .econometrics import (
    DesignMatrix,
    FitResult,
    Model,
    ModelSpec,
    TestResult,
    build_design,
    f_joint_test,
    fit_pooled_ols,
    fit_random_effects,
    wald_joint_test,
)
from .synth import SynthConfig, generate_moment_panel, generate_raw_csv

__version__ = "0.1.0"
