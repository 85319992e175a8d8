"""Secure key rate evaluation and rate-versus-distance curves.

The asymptotic rate credits privacy only to single-photon detections:

    R = q * ( -Q_mu H2(E_mu) f_EC  +  Y1 mu e^{-mu} [1 - H2(e1)] )

with Y1 bounded from below and e1 from above by the chosen regime's
decoy-state analysis, and negative values reported as zero. Intensities
are optimized by exhaustive grid search, which is exact on the grid and
reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .bounds import REGIMES, BoundResult, bounds_for_regime
from .channel import DetectorParams, ObservedStatistics, transmittance
from .distinguishability import DECOY, SIGNAL, VACUUM, IntensityLevel, MismatchSpec


def binary_entropy(x: float) -> float:
    """Binary Shannon entropy, zero at both endpoints by continuity."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy domain is [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def secure_rate(
    stats: ObservedStatistics,
    mu: float,
    y1_lower: float,
    e1_upper: float,
    params: DetectorParams,
) -> float:
    """Key rate per pulse from the signal statistics and the bound pair.

    An error bound at or above 1/2 removes all single-photon credit; the
    result is clamped at zero and scaled by the sifting factor.
    """
    q_mu = stats.gain(SIGNAL)
    e_mu = stats.error_rate(SIGNAL)
    return _rate_terms(q_mu, e_mu, mu, y1_lower, e1_upper, params)


def _rate_terms(
    q_mu: float, e_mu: float, mu: float, y1_lower: float, e1_upper: float, params: DetectorParams
) -> float:
    ec = q_mu * binary_entropy(e_mu) * params.f_ec
    e1 = min(e1_upper, 0.5)
    pa = y1_lower * mu * math.exp(-mu) * (1.0 - binary_entropy(e1))
    return params.q * max(pa - ec, 0.0)


def rate_from_bounds(
    stats: ObservedStatistics, mu: float, result: BoundResult, params: DetectorParams
) -> float:
    """Rate with the no-key conventions applied.

    Zero single-photon yield or an inconsistent error bound (negative raw
    candidate term) both yield zero key.
    """
    if result.y1_lower <= 0.0 or not result.consistent:
        return 0.0
    return secure_rate(stats, mu, result.y1_lower, result.e1_upper, params)


def evaluate_rate(
    params: DetectorParams,
    length_km: float,
    mu: float,
    nu: float,
    mismatch: MismatchSpec,
    regime: str,
) -> float:
    """Honest-model rate at one (distance, mu, nu) point under a regime."""
    stats = _honest_statistics(params, length_km, mu, nu)
    result = bounds_for_regime(stats, mu, nu, mismatch.d_mu_nu, params, regime)
    return rate_from_bounds(stats, mu, result, params)


def _honest_statistics(params: DetectorParams, length_km: float, mu: float, nu: float) -> ObservedStatistics:
    eta = transmittance(params, length_km)
    y0 = params.y0
    gains = {}
    errors = {}
    for label, omega in ((SIGNAL, mu), (DECOY, nu), (VACUUM, 0.0)):
        decay = -math.expm1(-eta * omega)
        gain = min(1.0, y0 + decay)
        gains[label] = gain
        errors[label] = min((params.e0 * y0 + params.e_detector * decay) / gain, 1.0)
    return ObservedStatistics(gains=gains, error_rates=errors)


@dataclass(frozen=True)
class IntensityGrid:
    """Search ranges (low, high, step) for the signal and decoy intensities."""

    mu_range: tuple[float, float, float] = (0.01, 0.5, 0.01)
    nu_range: tuple[float, float, float] = (0.01, 0.2, 0.01)

    def __post_init__(self) -> None:
        for name in ("mu_range", "nu_range"):
            lo, hi, step = getattr(self, name)
            if lo <= 0 or step <= 0 or hi < lo:
                raise ValueError(f"{name} must satisfy lo > 0, step > 0, hi >= lo")

    @staticmethod
    def _values(rng: tuple[float, float, float]) -> list[float]:
        lo, hi, step = rng
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [lo + k * step for k in range(count)]

    def mu_values(self) -> list[float]:
        return self._values(self.mu_range)

    def nu_values(self) -> list[float]:
        return self._values(self.nu_range)


@dataclass(frozen=True)
class RatePoint:
    length_km: float
    rate: float
    mu: float
    nu: float


@dataclass(frozen=True)
class RateCurve:
    """Optimized rate per distance for one (regime, mismatch) setting."""

    points: tuple[RatePoint, ...]
    regime: str
    mismatch: MismatchSpec

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        last = -math.inf
        for point in self.points:
            if point.length_km <= last:
                raise ValueError("curve lengths must be strictly increasing")
            if point.rate < 0:
                raise ValueError("curve rates must be >= 0")
            last = point.length_km


def optimize_intensities(
    params: DetectorParams,
    length_km: float,
    mismatch: MismatchSpec,
    regime: str,
    grid: IntensityGrid | None = None,
) -> tuple[float, float, float]:
    """Exhaustive grid search over (mu, nu) with mu > nu.

    Ties are broken toward the smaller mu, then the smaller nu, so the
    all-zero case reports the smallest grid point. Returns (mu, nu, rate).
    """
    grid = grid or IntensityGrid()
    eta = transmittance(params, length_km)
    best_rate = -1.0
    best_mu = best_nu = 0.0
    for mu in grid.mu_values():
        for nu in grid.nu_values():
            if mu <= nu:
                continue
            stats = _honest_stats_fast(params, eta, mu, nu)
            result = bounds_for_regime(stats, mu, nu, mismatch.d_mu_nu, params, regime)
            rate = rate_from_bounds(stats, mu, result, params)
            if rate > best_rate:
                best_rate, best_mu, best_nu = rate, mu, nu
    if best_rate < 0.0:
        raise ValueError("intensity grid contains no point with mu > nu")
    return best_mu, best_nu, best_rate


def _honest_stats_fast(params: DetectorParams, eta: float, mu: float, nu: float) -> ObservedStatistics:
    y0 = params.y0
    e0y0 = params.e0 * y0
    decay_mu = -math.expm1(-eta * mu)
    decay_nu = -math.expm1(-eta * nu)
    q_mu = min(1.0, y0 + decay_mu)
    q_nu = min(1.0, y0 + decay_nu)
    return ObservedStatistics(
        gains={SIGNAL: q_mu, DECOY: q_nu, VACUUM: y0},
        error_rates={
            SIGNAL: min((e0y0 + params.e_detector * decay_mu) / q_mu, 1.0),
            DECOY: min((e0y0 + params.e_detector * decay_nu) / q_nu, 1.0),
            VACUUM: params.e0,
        },
    )


def rate_vs_distance(
    params: DetectorParams,
    mismatch: MismatchSpec,
    regime: str,
    l_grid: Sequence[float],
    grid: IntensityGrid | None = None,
) -> RateCurve:
    """Per-distance optimized rates over an increasing distance grid."""
    lengths = list(l_grid)
    if any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise ValueError("l_grid must be strictly increasing")
    points = []
    for length in lengths:
        mu, nu, rate = optimize_intensities(params, length, mismatch, regime, grid)
        points.append(RatePoint(length_km=length, rate=rate, mu=mu, nu=nu))
    return RateCurve(points=tuple(points), regime=regime, mismatch=mismatch)


def default_distance_grid(stop_km: float = 160.0, step_km: float = 1.0) -> list[float]:
    count = int(math.floor(stop_km / step_km + 1e-9)) + 1
    return [k * step_km for k in range(count)]


def max_distance(curve: RateCurve) -> float:
    """Largest distance with a positive rate; zero when the curve is flat."""
    best = 0.0
    for point in curve.points:
        if point.rate > 0.0:
            best = point.length_km
    return best


def simulated_observation(
    params: DetectorParams, length_km: float, mu: float, nu: float
) -> ObservedStatistics:
    """Honest three-intensity statistics at one distance (public helper)."""
    return _honest_statistics(params, length_km, mu, nu)


def intensity_levels(mu: float, nu: float, nu1: float = 0.0) -> tuple[IntensityLevel, ...]:
    return (
        IntensityLevel(SIGNAL, mu),
        IntensityLevel(DECOY, nu),
        IntensityLevel(VACUUM, nu1),
    )
