"""Yield and error-rate bounds for decoy-state protocols.

Three regimes are covered, all for a three-intensity (signal, weak decoy,
vacuum) source:

* ``standard``: the usual weak+vacuum estimate, valid when the intensity
  settings are perfectly indistinguishable.
* ``imperfect``: the settings leak through a side channel with trace
  distance ``D``; every yield and error product may then drift by up to
  ``2 D`` between settings, which widens the bounds.
* ``calibrated``: additionally assumes the receiver transmittance is
  calibrated, capping the n-photon yield at ``1 - (1 - eta_cal)**n`` and
  tightening the drift terms accordingly.

All bounds are clamped to [0, 1]. A single-photon yield bound of zero
means the observations admit no secure key; a negative raw error-bound
numerator means the observations are inconsistent with the model, which
callers treat the same way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .channel import DetectorParams, ObservedStatistics
from .distinguishability import DECOY, SIGNAL, VACUUM, IntensityLevel, MismatchSpec

REGIMES = ("standard", "imperfect", "calibrated")

K_MU = "K_mu"
K_NU = "K_nu"
K_NU1 = "K_nu1"
K_MU_NU = "K_mu_nu"
K_MU_NU1 = "K_mu_nu1"


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


@dataclass(frozen=True)
class BoundResult:
    """Bounds plus the intermediate quantities they were built from.

    ``k_terms`` holds the raw (unclamped) candidate error bounds that were
    populated for the run; ``e1_upper`` is their minimum clamped to [0, 1].
    An empty ``k_terms`` marks an undefined error bound (zero single-photon
    yield), in which case ``e1_upper`` is the vacuous 1.
    """

    y0_lower: float
    y1_lower: float
    e1_upper: float
    k_terms: Mapping[str, float] = field(default_factory=dict)
    g_term: float = 0.0
    g_prime_term: float = 0.0

    def __post_init__(self) -> None:
        for name in ("y0_lower", "y1_lower", "e1_upper"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} outside [0, 1]: {value}")
        if self.k_terms:
            expected = _clamp01(min(self.k_terms.values()))
            if abs(expected - self.e1_upper) > 1e-9:
                raise ValueError("e1_upper does not match the minimum of k_terms")

    @property
    def consistent(self) -> bool:
        """False when a raw error-bound numerator went negative."""
        return not self.k_terms or min(self.k_terms.values()) >= 0.0


def _three_intensities(
    intensities: Iterable[IntensityLevel],
) -> tuple[float, float, float]:
    by_label = {level.label: level.mean_photon_number for level in intensities}
    missing = {SIGNAL, DECOY, VACUUM} - set(by_label)
    if missing:
        raise ValueError(f"missing intensity levels: {sorted(missing)}")
    mu, nu, nu1 = by_label[SIGNAL], by_label[DECOY], by_label[VACUUM]
    if not mu > nu > nu1 >= 0.0:
        raise ValueError(f"need mu > nu > nu1 >= 0, got {mu}, {nu}, {nu1}")
    if mu < nu + nu1:
        raise ValueError(f"need mu >= nu + nu1, got {mu} < {nu} + {nu1}")
    return mu, nu, nu1


def y0_lower_general(
    stats: ObservedStatistics,
    intensities: Iterable[IntensityLevel],
    mismatch: MismatchSpec,
) -> float:
    """Lower bound on the background yield from the two weaker settings.

    With a vanishing third intensity this reduces to the measured vacuum
    gain. The drift correction ``g'`` accounts for the side channel.
    """
    mu, nu, nu1 = _three_intensities(intensities)
    q_nu = stats.gain(DECOY)
    q_nu1 = stats.gain(VACUUM)
    g_prime = 2.0 * mismatch.d_mu_nu1 * nu * (math.exp(nu1) - 1.0) + 2.0 * mismatch.d_mu_nu * nu1 * (
        math.exp(nu) - 1.0
    )
    bracket = nu * math.exp(nu1) * q_nu1 - nu1 * math.exp(nu) * q_nu - g_prime
    return _clamp01(max(bracket / (nu - nu1), 0.0))


def _g_prime(mu: float, nu: float, nu1: float, mismatch: MismatchSpec) -> float:
    return 2.0 * mismatch.d_mu_nu1 * nu * (math.exp(nu1) - 1.0) + 2.0 * mismatch.d_mu_nu * nu1 * (
        math.exp(nu) - 1.0
    )


def y1_lower_general(
    stats: ObservedStatistics,
    intensities: Iterable[IntensityLevel],
    mismatch: MismatchSpec,
    y0_lower: float,
) -> float:
    """Single-photon yield lower bound for a three-intensity source."""
    mu, nu, nu1 = _three_intensities(intensities)
    q_mu = stats.gain(SIGNAL)
    q_nu = stats.gain(DECOY)
    q_nu1 = stats.gain(VACUUM)
    denom = mu * (nu - nu1) - (nu * nu - nu1 * nu1)
    big_g = (
        mu
        * (
            math.exp(nu) * q_nu
            - math.exp(nu1) * q_nu1
            - (nu * nu - nu1 * nu1) / (mu * mu) * (math.exp(mu) * q_mu - y0_lower)
        )
        / denom
    )
    small_g = (
        2.0
        * mu
        * (mismatch.d_mu_nu * (math.exp(nu) - 1.0) + mismatch.d_mu_nu1 * (math.exp(nu1) - 1.0))
        / denom
    )
    return _clamp01(big_g - small_g)


def y1_lower_weak_vacuum(stats: ObservedStatistics, mu: float, nu: float, d_mu_nu: float) -> float:
    """Weak+vacuum specialization (vacuum intensity exactly zero)."""
    if not mu > nu > 0.0:
        raise ValueError(f"need mu > nu > 0, got {mu}, {nu}")
    q_mu = stats.gain(SIGNAL)
    q_nu = stats.gain(DECOY)
    q_vac = stats.gain(VACUUM)
    value = (
        mu
        / (mu * nu - nu * nu)
        * (
            math.exp(nu) * q_nu
            - (nu * nu) / (mu * mu) * math.exp(mu) * q_mu
            - (mu * mu - nu * nu) / (mu * mu) * q_vac
            - 2.0 * d_mu_nu * (math.exp(nu) - 1.0)
        )
    )
    return _clamp01(value)


def e1_upper_general(
    stats: ObservedStatistics,
    intensities: Iterable[IntensityLevel],
    mismatch: MismatchSpec,
    y0_lower: float,
    y1_lower: float,
    e0: float = 0.5,
) -> tuple[float, dict[str, float]]:
    """Single-photon error-rate upper bound: minimum over the candidate terms.

    For a vanishing third intensity its candidate term is vacuous and
    omitted. Returns the clamped bound and the raw candidate terms.
    """
    mu, nu, nu1 = _three_intensities(intensities)
    if y1_lower <= 0.0:
        raise ValueError("e1 bound undefined for y1_lower = 0; no key is possible")
    eq_mu = math.exp(mu) * stats.gain(SIGNAL) * stats.error_rate(SIGNAL)
    eq_nu = math.exp(nu) * stats.gain(DECOY) * stats.error_rate(DECOY)
    eq_nu1 = math.exp(nu1) * stats.gain(VACUUM) * stats.error_rate(VACUUM)
    k: dict[str, float] = {}
    k[K_MU] = (eq_mu - e0 * y0_lower) / (mu * y1_lower)
    k[K_NU] = (eq_nu - e0 * y0_lower + 2.0 * nu * mismatch.d_mu_nu) / (nu * y1_lower)
    if nu1 > 0.0:
        k[K_NU1] = (eq_nu1 - e0 * y0_lower + 2.0 * nu1 * mismatch.d_mu_nu1) / (nu1 * y1_lower)
    k[K_MU_NU] = (eq_mu - eq_nu + 2.0 * mismatch.d_mu_nu * (math.exp(nu) - 1.0)) / ((mu - nu) * y1_lower)
    k[K_MU_NU1] = (eq_mu - eq_nu1 + 2.0 * mismatch.d_mu_nu1 * (math.exp(nu1) - 1.0)) / (
        (mu - nu1) * y1_lower
    )
    return _clamp01(min(k.values())), k


def _k_terms_weak_vacuum(
    stats: ObservedStatistics, mu: float, nu: float, d_mu_nu: float, y1_lower: float, e0: float
) -> dict[str, float]:
    y0_l = stats.gain(VACUUM)
    eq_mu = math.exp(mu) * stats.gain(SIGNAL) * stats.error_rate(SIGNAL)
    eq_nu = math.exp(nu) * stats.gain(DECOY) * stats.error_rate(DECOY)
    return {
        K_MU: (eq_mu - e0 * y0_l) / (mu * y1_lower),
        K_NU: (eq_nu - e0 * y0_l + 2.0 * nu * d_mu_nu) / (nu * y1_lower),
        K_MU_NU: (eq_mu - eq_nu + 2.0 * d_mu_nu * (math.exp(nu) - 1.0)) / ((mu - nu) * y1_lower),
    }


def e1_upper_weak_vacuum(
    stats: ObservedStatistics, mu: float, nu: float, d_mu_nu: float, y1_lower: float, e0: float = 0.5
) -> float:
    """Weak+vacuum error bound: min over the three populated terms."""
    if y1_lower <= 0.0:
        raise ValueError("e1 bound undefined for y1_lower = 0; no key is possible")
    k = _k_terms_weak_vacuum(stats, mu, nu, d_mu_nu, y1_lower, e0)
    return _clamp01(min(k.values()))


def weak_vacuum_bounds(
    stats: ObservedStatistics, mu: float, nu: float, d_mu_nu: float, e0: float = 0.5
) -> BoundResult:
    """Complete weak+vacuum bound set for one observation."""
    y0_l = _clamp01(stats.gain(VACUUM))
    y1_l = y1_lower_weak_vacuum(stats, mu, nu, d_mu_nu)
    g_term = 2.0 * mu * d_mu_nu * (math.exp(nu) - 1.0) / (mu * nu - nu * nu)
    if y1_l <= 0.0:
        return BoundResult(y0_lower=y0_l, y1_lower=0.0, e1_upper=1.0, g_term=g_term)
    k = _k_terms_weak_vacuum(stats, mu, nu, d_mu_nu, y1_l, e0)
    return BoundResult(
        y0_lower=y0_l,
        y1_lower=y1_l,
        e1_upper=_clamp01(min(k.values())),
        k_terms=k,
        g_term=g_term,
    )


def bounds_calibrated(
    stats: ObservedStatistics, mu: float, nu: float, d_mu_nu: float, params: DetectorParams
) -> BoundResult:
    """Weak+vacuum bounds tightened by a calibrated receiver transmittance.

    Single-photon yields can then differ between settings by at most
    ``2 D eta_cal`` rather than ``2 D``, and the exponential drift factors
    shrink from ``exp(nu) - 1`` to ``exp(nu) - exp(nu (1 - eta_cal))``.
    """
    if not mu > nu > 0.0:
        raise ValueError(f"need mu > nu > 0, got {mu}, {nu}")
    eta_cal = params.eta_bob_cal
    e0 = params.e0
    q_mu = stats.gain(SIGNAL)
    q_nu = stats.gain(DECOY)
    q_vac = stats.gain(VACUUM)
    drift = math.exp(nu) - math.exp(nu * (1.0 - eta_cal))
    y0_l = _clamp01(q_vac)
    y1_l = _clamp01(
        mu
        / (mu * nu - nu * nu)
        * (
            math.exp(nu) * q_nu
            - (nu * nu) / (mu * mu) * math.exp(mu) * q_mu
            - (mu * mu - nu * nu) / (mu * mu) * q_vac
            - 2.0 * d_mu_nu * drift
        )
    )
    g_term = 2.0 * mu * d_mu_nu * drift / (mu * nu - nu * nu)
    if y1_l <= 0.0:
        return BoundResult(y0_lower=y0_l, y1_lower=0.0, e1_upper=1.0, g_term=g_term)
    eq_mu = math.exp(mu) * q_mu * stats.error_rate(SIGNAL)
    eq_nu = math.exp(nu) * q_nu * stats.error_rate(DECOY)
    k = {
        K_MU: (eq_mu - e0 * y0_l) / (mu * y1_l),
        K_NU: (eq_nu - e0 * y0_l + 2.0 * nu * d_mu_nu * eta_cal) / (nu * y1_l),
        K_MU_NU: (eq_mu - eq_nu + 2.0 * d_mu_nu * drift) / ((mu - nu) * y1_l),
    }
    return BoundResult(
        y0_lower=y0_l,
        y1_lower=y1_l,
        e1_upper=_clamp01(min(k.values())),
        k_terms=k,
        g_term=g_term,
    )


def bounds_for_regime(
    stats: ObservedStatistics,
    mu: float,
    nu: float,
    d_mu_nu: float,
    params: DetectorParams,
    regime: str,
) -> BoundResult:
    """Dispatch to the bound set matching the chosen security analysis."""
    if regime == "standard":
        return weak_vacuum_bounds(stats, mu, nu, 0.0, e0=params.e0)
    if regime == "imperfect":
        return weak_vacuum_bounds(stats, mu, nu, d_mu_nu, e0=params.e0)
    if regime == "calibrated":
        return bounds_calibrated(stats, mu, nu, d_mu_nu, params)
    raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")
