"""Windowed photon-number-splitting attack against a distinguishable source.

The eavesdropper watches each pulse's side channel and sorts it into an
"observed signal" window, an "observed decoy" window, or neither. Inside a
window she blocks single photons or forwards them over a lossless line at a
chosen per-photon-number yield, keeps one photon of every multiphoton pulse,
and forwards out-of-window multiphoton pulses untouched. Guessing wrong
inside a window produces random clicks, so half of those detections are
errors; everything else is error-free.

With the windows fixed, her per-photon-number yields are the only free
variables, every disguise constraint is affine in them, and minimizing the
surviving single-photon signal yield is a linear program. Sweeping candidate
windows over likelihood-ratio thresholds then yields her best strategy, and
comparing the resulting key-rate upper bound against what the legitimate
parties believe they can distill decides whether the attack breaches
security.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bounds import bounds_for_regime
from .channel import DetectorParams, ObservedStatistics, transmittance
from .distinguishability import (
    DECOY,
    SIGNAL,
    IntensityLevel,
    SideChannelDistribution,
    poisson_pn,
    poisson_tail,
)
from .keyrate import rate_from_bounds, simulated_observation
from .simplex import solve_lp

#: Poisson tail mass ignored beyond the photon-number truncation.
TAIL_TOL = 1e-12
#: Objective at or below this counts as a fully blocked single-photon flow.
ZERO_OBJECTIVE = 1e-15


@dataclass(frozen=True)
class AttackWindows:
    """Disjoint bin-index sets observed as "signal" and "decoy"."""

    w_s: frozenset[int]
    w_d: frozenset[int]

    def __post_init__(self) -> None:
        if self.w_s & self.w_d:
            raise ValueError("observation windows must be disjoint")


@dataclass(frozen=True)
class GuessMatrix:
    """Window-sum probabilities P(guess | sent): p_ij = sum over W_i of f_j."""

    p_ss: float
    p_ds: float
    p_sd: float
    p_dd: float

    def __post_init__(self) -> None:
        for name in ("p_ss", "p_ds", "p_sd", "p_dd"):
            value = getattr(self, name)
            if not -1e-12 <= value <= 1.0 + 1e-12:
                raise ValueError(f"{name} outside [0, 1]: {value}")
        if self.p_ss + self.p_ds > 1.0 + 1e-9 or self.p_sd + self.p_dd > 1.0 + 1e-9:
            raise ValueError("window probabilities for one sent state exceed 1")


@dataclass(frozen=True)
class EveStrategy:
    """In-window yields per photon number, n = 1 .. n_max."""

    z_mu: tuple[float, ...]
    z_nu: tuple[float, ...]
    n_max: int

    def __post_init__(self) -> None:
        if len(self.z_mu) != self.n_max or len(self.z_nu) != self.n_max:
            raise ValueError("yield arrays must have length n_max")
        for z in (*self.z_mu, *self.z_nu):
            if not 0.0 <= z <= 1.0:
                raise ValueError(f"yields must lie in [0, 1], got {z}")


@dataclass(frozen=True)
class AttackOutcome:
    """Best feasible strategy found by a window sweep, if any."""

    feasible: bool
    y1_mu_eve: float | None
    r_upper: float | None
    windows: AttackWindows | None
    guess: GuessMatrix | None
    strategy: EveStrategy | None
    achieved_stats: ObservedStatistics | None


@dataclass(frozen=True)
class BreachPoint:
    length_km: float
    r_lower: float
    r_upper: float | None
    breached: bool
    outcome: AttackOutcome


def n_max_for(intensities: Sequence[IntensityLevel], tol: float = TAIL_TOL) -> int:
    """Smallest truncation with Poisson tail below ``tol`` for every intensity."""
    omega = max(level.mean_photon_number for level in intensities)
    n = 1
    while poisson_tail(omega, n) >= tol:
        n += 1
        if n > 200:
            raise ValueError(f"photon-number truncation did not converge for omega={omega}")
    return n


def honest_yields(params: DetectorParams, length_km: float, n_max: int) -> tuple[float, ...]:
    """Channel-model yields Y_n = Y0 + 1 - (1 - eta)^n for n = 0 .. n_max."""
    eta = transmittance(params, length_km)
    return tuple(params.y0 + 1.0 - (1.0 - eta) ** n for n in range(n_max + 1))


def guess_matrix(
    f_signal: SideChannelDistribution,
    f_decoy: SideChannelDistribution,
    windows: AttackWindows,
) -> GuessMatrix:
    """Observation probabilities obtained by summing each window's bins."""
    if not f_signal.same_grid(f_decoy):
        raise ValueError("signal and decoy distributions must share a bin grid")
    fs = f_signal.probabilities.ravel()
    fd = f_decoy.probabilities.ravel()
    n_bins = fs.size
    for idx in (*windows.w_s, *windows.w_d):
        if not 0 <= idx < n_bins:
            raise ValueError(f"window bin index {idx} outside grid of {n_bins} bins")
    ws = sorted(windows.w_s)
    wd = sorted(windows.w_d)
    return GuessMatrix(
        p_ss=float(fs[ws].sum()),
        p_ds=float(fs[wd].sum()),
        p_sd=float(fd[ws].sum()),
        p_dd=float(fd[wd].sum()),
    )


def eve_yields(
    strategy: EveStrategy,
    guess: GuessMatrix,
    honest: Sequence[float],
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Per-photon-number yields seen on the signal and decoy slots.

    Index n runs 0 .. n_max. Single photons outside the windows are blocked;
    multiphoton pulses outside the windows keep their honest yields.
    """
    if len(honest) < strategy.n_max + 1:
        raise ValueError("honest yields must cover n = 0 .. n_max")
    y0 = honest[0]
    out_mu = 1.0 - guess.p_ss - guess.p_ds
    out_nu = 1.0 - guess.p_sd - guess.p_dd
    y_mu = [y0]
    y_nu = [y0]
    for n in range(1, strategy.n_max + 1):
        z_mu = strategy.z_mu[n - 1]
        z_nu = strategy.z_nu[n - 1]
        forwarded = honest[n] if n >= 2 else 0.0
        y_mu.append(guess.p_ss * z_mu + guess.p_ds * z_nu + out_mu * forwarded)
        y_nu.append(guess.p_sd * z_mu + guess.p_dd * z_nu + out_nu * forwarded)
    return tuple(y_mu), tuple(y_nu)


def eve_statistics(
    strategy: EveStrategy,
    guess: GuessMatrix,
    honest: Sequence[float],
    intensities: Sequence[IntensityLevel],
    y0: float,
) -> ObservedStatistics:
    """Gains and QBERs produced by a strategy, recomputed from first principles.

    The Poisson sum is truncated at n_max; the out-of-window multiphoton
    tail is added with yield 1, an upper bound that keeps the disguise
    check conservative.
    """
    mu = _intensity(intensities, SIGNAL)
    nu = _intensity(intensities, DECOY)
    y_mu, y_nu = eve_yields(strategy, guess, honest)
    gains = {}
    errors = {}
    for label, omega, yields, out_prob, wrong_p, wrong_z in (
        (SIGNAL, mu, y_mu, 1.0 - guess.p_ss - guess.p_ds, guess.p_ds, strategy.z_nu),
        (DECOY, nu, y_nu, 1.0 - guess.p_sd - guess.p_dd, guess.p_sd, strategy.z_mu),
    ):
        pn = [poisson_pn(omega, n) for n in range(strategy.n_max + 1)]
        gain = y0 * pn[0] + sum(yields[n] * pn[n] for n in range(1, strategy.n_max + 1))
        gain += out_prob * poisson_tail(omega, strategy.n_max)
        # Wrong guesses produce random clicks: half of them are errors.
        eq = 0.5 * y0 * pn[0] + sum(
            0.5 * wrong_p * wrong_z[n - 1] * pn[n] for n in range(1, strategy.n_max + 1)
        )
        gains[label] = min(gain, 1.0)
        errors[label] = min(eq / gain, 1.0) if gain > 0 else 0.0
    return ObservedStatistics(gains=gains, error_rates=errors)


def _intensity(intensities: Sequence[IntensityLevel], label: str) -> float:
    for level in intensities:
        if level.label == label:
            return level.mean_photon_number
    raise ValueError(f"missing intensity level {label!r}")


def solve_strategy(
    guess: GuessMatrix,
    targets: ObservedStatistics,
    honest: Sequence[float],
    intensities: Sequence[IntensityLevel],
    y0: float,
) -> tuple[EveStrategy, float] | None:
    """Minimize the surviving single-photon signal yield for fixed windows.

    Variables are the in-window yields ``Z_n`` for both settings. Gains must
    match the targets exactly and the error products must not exceed them.
    Returns None when no strategy satisfies the disguise constraints.

    Raises:
        SolverError: If the LP solver fails to converge (never returns a
            silently suboptimal strategy).
    """
    mu = _intensity(intensities, SIGNAL)
    nu = _intensity(intensities, DECOY)
    n_max = len(honest) - 1
    pn_mu = np.array([poisson_pn(mu, n) for n in range(1, n_max + 1)])
    pn_nu = np.array([poisson_pn(nu, n) for n in range(1, n_max + 1)])
    hy = np.asarray(honest[1:], dtype=float)

    out_mu = 1.0 - guess.p_ss - guess.p_ds
    out_nu = 1.0 - guess.p_sd - guess.p_dd
    forwarded_mu = out_mu * (float(pn_mu[1:] @ hy[1:]) + poisson_tail(mu, n_max))
    forwarded_nu = out_nu * (float(pn_nu[1:] @ hy[1:]) + poisson_tail(nu, n_max))

    n = n_max
    c = np.zeros(2 * n)
    c[0] = guess.p_ss
    c[n] = guess.p_ds
    a_eq = np.zeros((2, 2 * n))
    a_eq[0, :n] = guess.p_ss * pn_mu
    a_eq[0, n:] = guess.p_ds * pn_mu
    a_eq[1, :n] = guess.p_sd * pn_nu
    a_eq[1, n:] = guess.p_dd * pn_nu
    b_eq = np.array(
        [
            targets.gain(SIGNAL) - y0 * math.exp(-mu) - forwarded_mu,
            targets.gain(DECOY) - y0 * math.exp(-nu) - forwarded_nu,
        ]
    )
    a_ub = np.zeros((2, 2 * n))
    a_ub[0, n:] = 0.5 * guess.p_ds * pn_mu
    a_ub[1, :n] = 0.5 * guess.p_sd * pn_nu
    b_ub = np.array(
        [
            targets.gain(SIGNAL) * targets.error_rate(SIGNAL) - 0.5 * y0 * math.exp(-mu),
            targets.gain(DECOY) * targets.error_rate(DECOY) - 0.5 * y0 * math.exp(-nu),
        ]
    )

    result = solve_lp(c, a_eq=a_eq, b_eq=b_eq, a_ub=a_ub, b_ub=b_ub, upper=1.0)
    if not result.optimal:
        return None
    z = result.x
    strategy = EveStrategy(z_mu=tuple(z[:n]), z_nu=tuple(z[n:]), n_max=n_max)
    y1_mu_eve = guess.p_ss * strategy.z_mu[0] + guess.p_ds * strategy.z_nu[0]
    return strategy, y1_mu_eve


def log_likelihood_ratios(
    f_signal: SideChannelDistribution, f_decoy: SideChannelDistribution
) -> np.ndarray:
    """Per-bin log(f_signal / f_decoy); +-inf where one side vanishes, NaN where both do."""
    fs = f_signal.probabilities.ravel()
    fd = f_decoy.probabilities.ravel()
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(fs) - np.log(fd)


def candidate_windows(
    f_signal: SideChannelDistribution, f_decoy: SideChannelDistribution
) -> list[AttackWindows]:
    """Threshold-pair window family ordered deterministically.

    Candidates are W_s = {ratio >= theta_s}, W_d = {ratio <= theta_d} for
    every ordered pair of observed log-likelihood-ratio values with
    theta_s > theta_d. Bins where both distributions vanish never enter a
    window. Identical distributions admit no candidate at all.
    """
    if not f_signal.same_grid(f_decoy):
        raise ValueError("signal and decoy distributions must share a bin grid")
    ell = log_likelihood_ratios(f_signal, f_decoy)
    finite_mask = ~np.isnan(ell)
    values = np.unique(ell[finite_mask])
    out: list[AttackWindows] = []
    for i in range(len(values)):
        upper = frozenset(np.flatnonzero(finite_mask & (ell >= values[i])).tolist())
        for j in range(i):
            lower = frozenset(np.flatnonzero(finite_mask & (ell <= values[j])).tolist())
            out.append(AttackWindows(w_s=upper, w_d=lower))
    return out


def sweep_windows(
    f_signal: SideChannelDistribution,
    f_decoy: SideChannelDistribution,
    targets: ObservedStatistics,
    honest: Sequence[float],
    intensities: Sequence[IntensityLevel],
    y0: float,
) -> AttackOutcome:
    """Optimize the attack over the whole threshold-pair window family.

    Returns the feasible outcome with the smallest surviving single-photon
    yield; a zero objective ends the sweep early since it cannot be beaten.
    """
    mu = _intensity(intensities, SIGNAL)
    best: tuple[float, AttackWindows, GuessMatrix, EveStrategy] | None = None
    for windows in candidate_windows(f_signal, f_decoy):
        guess = guess_matrix(f_signal, f_decoy, windows)
        solved = solve_strategy(guess, targets, honest, intensities, y0)
        if solved is None:
            continue
        strategy, y1 = solved
        if best is None or y1 < best[0]:
            best = (y1, windows, guess, strategy)
            if y1 <= ZERO_OBJECTIVE:
                break
    if best is None:
        return AttackOutcome(
            feasible=False,
            y1_mu_eve=None,
            r_upper=None,
            windows=None,
            guess=None,
            strategy=None,
            achieved_stats=None,
        )
    y1, windows, guess, strategy = best
    achieved = eve_statistics(strategy, guess, honest, intensities, y0)
    return AttackOutcome(
        feasible=True,
        y1_mu_eve=y1,
        r_upper=y1 * mu * math.exp(-mu),
        windows=windows,
        guess=guess,
        strategy=strategy,
        achieved_stats=achieved,
    )


def breach_scan(
    params: DetectorParams,
    f_signal: SideChannelDistribution,
    f_decoy: SideChannelDistribution,
    mu: float,
    nu: float,
    l_grid: Sequence[float],
) -> list[BreachPoint]:
    """Compare the believed key rate against the attack bound per distance.

    The legitimate parties estimate their rate with the standard decoy
    analysis (they are unaware of the mismatch); the attacker's bound is
    ``Y1_eve * mu * exp(-mu)``. The attack breaches security wherever the
    latter drops below the former. An infeasible attack never breaches.
    """
    if not mu > nu:
        raise ValueError(f"need mu > nu, got {mu} <= {nu}")
    intensities = (IntensityLevel(SIGNAL, mu), IntensityLevel(DECOY, nu))
    n_max = n_max_for(intensities)
    points: list[BreachPoint] = []
    for length in l_grid:
        stats = _attack_targets(params, length, mu, nu)
        bound = bounds_for_regime(stats, mu, nu, 0.0, params, "standard")
        r_lower = rate_from_bounds(stats, mu, bound, params)
        honest = honest_yields(params, length, n_max)
        outcome = sweep_windows(f_signal, f_decoy, stats, honest, intensities, params.y0)
        breached = bool(
            outcome.feasible and r_lower > 0.0 and outcome.r_upper is not None and outcome.r_upper < r_lower
        )
        points.append(
            BreachPoint(
                length_km=length,
                r_lower=r_lower,
                r_upper=outcome.r_upper,
                breached=breached,
                outcome=outcome,
            )
        )
    return points


def _attack_targets(params: DetectorParams, length_km: float, mu: float, nu: float) -> ObservedStatistics:
    return simulated_observation(params, length_km, mu, nu)


def first_breach_distance(points: Sequence[BreachPoint]) -> float | None:
    for point in points:
        if point.breached:
            return point.length_km
    return None


def describe_windows(windows: AttackWindows, dist: SideChannelDistribution) -> str:
    """Human-readable window intervals in axis coordinates."""
    axis = dist.axes[0]
    edges = axis.edges

    def runs(bins: frozenset[int]) -> str:
        if not bins:
            return "(empty)"
        ordered = sorted(bins)
        spans = []
        start = prev = ordered[0]
        for b in ordered[1:]:
            if b == prev + 1:
                prev = b
                continue
            spans.append((start, prev))
            start = prev = b
        spans.append((start, prev))
        return " + ".join(f"[{edges[a]:g}, {edges[b + 1]:g}]" for a, b in spans)

    return f"W_s {axis.name}: {runs(windows.w_s)}; W_d {axis.name}: {runs(windows.w_d)}"
