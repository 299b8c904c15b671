"""Rate coverage analysis for aerial-terrestrial uplink NOMA.

A moving aerial user and a ground user share one uplink resource block
through power-domain NOMA with successive interference cancellation at
the base station. The package provides the closed-form coverage
probabilities of the joint decoding events, a Monte Carlo oracle for the
decoding tree, probabilistic LoS models, trajectory generators and a
minimum-height QoS planner, plus a CSV/figure-emitting CLI.
"""

from .analysis import (
    ANALYTIC,
    MONTE_CARLO,
    SEMI_ANALYTIC,
    CoverageReport,
    DecodingThresholds,
    NakagamiLinkParams,
    QuadratureError,
    coverage_report,
    link_params,
    p1,
    p2,
    p3,
    p3_paper_closed_form,
    p4,
    threshold_from_rate,
    upper_gamma_int,
)
from .channel import (
    BuiltUpEnvironment,
    FixedLos,
    IturLos,
    LosModel,
    SystemParams,
    ThreeGppUrbanLos,
    a2c_path_loss,
    aue_3d_distance,
    aue_power_cdf,
    aue_power_pdf,
    los_probability,
    tue_3d_distance,
    tue_distance_pdf,
    tue_power_cdf,
    tue_power_pdf,
    tue_transmit_power,
)
from .config import (
    ENVIRONMENT_PRESETS,
    ConfigError,
    RunConfig,
    default_system_params,
    load_config,
)
from .montecarlo import (
    DecodeEvent,
    McConfig,
    TrialOutcome,
    estimate,
    run_trial,
    sample_aue_received_power,
    sample_tue_received_power,
    simulate_counts,
    stream_rng,
)
from .planner import HeightResult, HeightSearchConfig, best_height, min_height
from .trajectory import (
    ChordWalkConfig,
    SpiralConfig,
    TrajectoryPoint,
    chord_walk_path,
    chord_walk_points,
    read_trajectory_csv,
    spiral_point_count,
    spiral_points,
    write_trajectory_csv,
)

__version__ = "0.1.0"
