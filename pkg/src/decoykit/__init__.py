"""Decoy-state QKD toolkit.

Quantifies how distinguishable a source's intensity settings are, bounds
the secure key rate under three security analyses (standard, imperfect
source, calibrated receiver), and simulates the windowed
photon-number-splitting attack that exploits the distinguishability.
"""

from .attack import (
    AttackOutcome,
    AttackWindows,
    BreachPoint,
    EveStrategy,
    GuessMatrix,
    breach_scan,
    eve_statistics,
    eve_yields,
    first_breach_distance,
    guess_matrix,
    honest_yields,
    solve_strategy,
    sweep_windows,
)
from .bounds import (
    REGIMES,
    BoundResult,
    bounds_calibrated,
    bounds_for_regime,
    e1_upper_general,
    e1_upper_weak_vacuum,
    weak_vacuum_bounds,
    y0_lower_general,
    y1_lower_general,
    y1_lower_weak_vacuum,
)
from .channel import (
    GYS,
    PRESETS,
    DetectorParams,
    ObservedStatistics,
    detector_from_config,
    expected_gain,
    expected_qber,
    simulate_statistics,
    transmittance,
)
from .distinguishability import (
    DECOY,
    SIGNAL,
    VACUUM,
    IntensityLevel,
    MismatchSpec,
    SideChannelDistribution,
    WaveformTrace,
    ingest_waveform,
    normalize,
    poisson_pn,
    poisson_tail,
    product_joint,
    trace_distance,
)
from .keyrate import (
    IntensityGrid,
    RateCurve,
    binary_entropy,
    default_distance_grid,
    max_distance,
    optimize_intensities,
    rate_from_bounds,
    rate_vs_distance,
    secure_rate,
)
from .simplex import LPResult, SolverError, solve_lp

__version__ = "0.1.0"

__all__ = [
    "AttackOutcome",
    "AttackWindows",
    "BoundResult",
    "BreachPoint",
    "DetectorParams",
    "EveStrategy",
    "GuessMatrix",
    "GYS",
    "IntensityGrid",
    "IntensityLevel",
    "LPResult",
    "MismatchSpec",
    "ObservedStatistics",
    "PRESETS",
    "RateCurve",
    "REGIMES",
    "SideChannelDistribution",
    "SolverError",
    "WaveformTrace",
    "binary_entropy",
    "bounds_calibrated",
    "bounds_for_regime",
    "breach_scan",
    "default_distance_grid",
    "detector_from_config",
    "e1_upper_general",
    "e1_upper_weak_vacuum",
    "eve_statistics",
    "eve_yields",
    "expected_gain",
    "expected_qber",
    "first_breach_distance",
    "guess_matrix",
    "honest_yields",
    "ingest_waveform",
    "max_distance",
    "normalize",
    "optimize_intensities",
    "poisson_pn",
    "poisson_tail",
    "product_joint",
    "rate_from_bounds",
    "rate_vs_distance",
    "secure_rate",
    "simulate_statistics",
    "solve_lp",
    "solve_strategy",
    "sweep_windows",
    "trace_distance",
    "transmittance",
    "weak_vacuum_bounds",
    "y0_lower_general",
    "y1_lower_general",
    "y1_lower_weak_vacuum",
    "DECOY",
    "SIGNAL",
    "VACUUM",
]
