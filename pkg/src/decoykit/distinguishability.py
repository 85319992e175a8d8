"""Side-channel distributions and trace-distance distinguishability.

A pulsed source that encodes the signal/decoy choice leaks that choice
through auxiliary degrees of freedom (arrival time, frequency, ...).
This module turns measured pulse waveforms into normalized probability
distributions over such an observable and quantifies how well two
intensity settings can be told apart via the trace distance, which for
diagonal (classical) distributions is half the L1 distance.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

SIGNAL = "signal"
DECOY = "decoy"
VACUUM = "vacuum"
INTENSITY_LABELS = (SIGNAL, DECOY, VACUUM)

#: Normalization slack tolerated on a probability distribution.
NORMALIZATION_TOL = 1e-9


class WaveformError(ValueError):
    """Raised when a waveform file or trace violates its invariants."""


class GridMismatchError(ValueError):
    """Raised when two distributions do not share the same bin grid."""


@dataclass(frozen=True)
class WaveformTrace:
    """A sampled pulse envelope: amplitude versus a monotone coordinate.

    Args:
        coordinates: Sample positions, strictly increasing (e.g. picoseconds).
        amplitudes: Sampled amplitudes, arbitrary units; may contain noise
            excursions below zero.
        axis_label: Name of the coordinate axis, e.g. ``"time"``.
    """

    coordinates: tuple[float, ...]
    amplitudes: tuple[float, ...]
    axis_label: str = "time"

    def __post_init__(self) -> None:
        if len(self.coordinates) != len(self.amplitudes):
            raise WaveformError("coordinates and amplitudes differ in length")
        if len(self.coordinates) < 2:
            raise WaveformError("a waveform needs at least 2 samples")
        coords = np.asarray(self.coordinates, dtype=float)
        if not np.all(np.diff(coords) > 0):
            raise WaveformError("waveform coordinates must be strictly increasing")

    def __len__(self) -> int:
        return len(self.coordinates)


@dataclass(frozen=True)
class Axis:
    """A named binning of one observable."""

    name: str
    edges: tuple[float, ...]

    def __post_init__(self) -> None:
        edges = np.asarray(self.edges, dtype=float)
        if edges.size < 2 or not np.all(np.diff(edges) > 0):
            raise ValueError("axis edges must be strictly increasing with >= 2 entries")

    @property
    def n_bins(self) -> int:
        return len(self.edges) - 1


@dataclass(frozen=True)
class SideChannelDistribution:
    """Normalized probability distribution over a binned observable grid.

    ``probabilities`` has one dimension per axis; entries are nonnegative
    and sum to 1 within ``NORMALIZATION_TOL``.
    """

    axes: tuple[Axis, ...]
    probabilities: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        probs = np.asarray(self.probabilities, dtype=float)
        object.__setattr__(self, "probabilities", probs)
        expected = tuple(ax.n_bins for ax in self.axes)
        if probs.shape != expected:
            raise ValueError(f"probability grid shape {probs.shape} != bin shape {expected}")
        if np.any(probs < 0):
            raise ValueError("probabilities must be nonnegative")
        total = float(probs.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"probabilities sum to {total}, expected 1")

    @property
    def ndim(self) -> int:
        return len(self.axes)

    def same_grid(self, other: "SideChannelDistribution") -> bool:
        if len(self.axes) != len(other.axes):
            return False
        return all(
            a.name == b.name and a.edges == b.edges
            for a, b in zip(self.axes, other.axes)
        )


@dataclass(frozen=True)
class IntensityLevel:
    """One source intensity setting (mean photon number of the pulse)."""

    label: str
    mean_photon_number: float

    def __post_init__(self) -> None:
        if self.label not in INTENSITY_LABELS:
            raise ValueError(f"label must be one of {INTENSITY_LABELS}, got {self.label!r}")
        if self.mean_photon_number < 0:
            raise ValueError("mean photon number must be >= 0")


@dataclass(frozen=True)
class MismatchSpec:
    """Trace-distance mismatch between the signal and each weaker setting."""

    d_mu_nu: float
    d_mu_nu1: float = 0.0

    def __post_init__(self) -> None:
        for name in ("d_mu_nu", "d_mu_nu1"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


def ingest_waveform(path: str | Path, axis_label: str = "time") -> WaveformTrace:
    """Read a waveform CSV with header ``coordinate,amplitude``.

    Rows must hold two decimal numbers; coordinates must be strictly
    increasing and at least two rows must be present.
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise WaveformError(f"{path}: empty file") from None
            if [col.strip() for col in header] != ["coordinate", "amplitude"]:
                raise WaveformError(f"{path}: expected header 'coordinate,amplitude'")
            coords: list[float] = []
            amps: list[float] = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 2:
                    raise WaveformError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
                try:
                    coords.append(float(row[0]))
                    amps.append(float(row[1]))
                except ValueError:
                    raise WaveformError(f"{path}:{lineno}: non-numeric value") from None
    except OSError as exc:
        raise WaveformError(f"{path}: {exc}") from exc
    return WaveformTrace(tuple(coords), tuple(amps), axis_label=axis_label)


def native_bin_edges(trace: WaveformTrace) -> tuple[float, ...]:
    """Default binning: the trace's own sample coordinates as bin edges."""
    return trace.coordinates


def normalize(trace: WaveformTrace, bin_edges: Sequence[float] | None = None) -> SideChannelDistribution:
    """Turn a waveform into a probability distribution over bins.

    Negative amplitudes are clamped to zero (measurement noise), the
    clamped envelope is integrated by the trapezoid rule within each bin,
    and the bin masses are divided by their total.

    Args:
        trace: The measured waveform.
        bin_edges: Strictly increasing edges covering the trace's
            coordinate range. Defaults to the native sample spacing.

    Raises:
        ValueError: If the edges do not cover the trace, or if the clamped
            waveform has zero total area.
    """
    if bin_edges is None:
        bin_edges = native_bin_edges(trace)
    edges = np.asarray(bin_edges, dtype=float)
    if edges.size < 2 or not np.all(np.diff(edges) > 0):
        raise ValueError("bin edges must be strictly increasing with >= 2 entries")
    coords = np.asarray(trace.coordinates, dtype=float)
    if edges[0] > coords[0] or edges[-1] < coords[-1]:
        raise ValueError("bin edges must cover the waveform's coordinate range")

    amps = np.clip(np.asarray(trace.amplitudes, dtype=float), 0.0, None)

    # Integrate the piecewise-linear envelope on the union grid so each
    # trapezoid segment falls inside exactly one bin. The envelope is zero
    # outside the sampled range.
    grid = np.union1d(coords, edges)
    grid = grid[(grid >= coords[0]) & (grid <= coords[-1])]
    values = np.interp(grid, coords, amps)
    seg_mass = 0.5 * (values[:-1] + values[1:]) * np.diff(grid)
    midpoints = 0.5 * (grid[:-1] + grid[1:])
    bin_index = np.searchsorted(edges, midpoints, side="right") - 1
    bin_index = np.clip(bin_index, 0, edges.size - 2)
    masses = np.bincount(bin_index, weights=seg_mass, minlength=edges.size - 1)

    total = float(masses.sum())
    if total <= 0.0:
        raise ValueError("waveform has no positive area; cannot normalize")
    axis = Axis(name=trace.axis_label, edges=tuple(edges.tolist()))
    return SideChannelDistribution(axes=(axis,), probabilities=masses / total)


def trace_distance(f: SideChannelDistribution, g: SideChannelDistribution) -> float:
    """Half the L1 distance between two distributions on the same grid."""
    if not f.same_grid(g):
        raise GridMismatchError("distributions are defined on different bin grids")
    return 0.5 * float(np.abs(f.probabilities - g.probabilities).sum())


def product_joint(
    f_axis1: SideChannelDistribution, f_axis2: SideChannelDistribution
) -> SideChannelDistribution:
    """Joint distribution under the independence assumption p(i,j) = p1(i) p2(j)."""
    if f_axis1.ndim != 1 or f_axis2.ndim != 1:
        raise ValueError("product_joint expects two 1-D distributions")
    joint = np.outer(f_axis1.probabilities, f_axis2.probabilities)
    return SideChannelDistribution(axes=(f_axis1.axes[0], f_axis2.axes[0]), probabilities=joint)


def poisson_pn(omega: float, n: int) -> float:
    """Probability of an n-photon pulse from a phase-randomized source.

    ``P_n = exp(-omega) * omega**n / n!`` for mean photon number omega.
    """
    if omega < 0:
        raise ValueError("omega must be >= 0")
    if n < 0:
        raise ValueError("n must be >= 0")
    if omega == 0.0:
        return 1.0 if n == 0 else 0.0
    if n == 0:
        return math.exp(-omega)
    if n < 30:
        return math.exp(-omega) * omega**n / math.factorial(n)
    return math.exp(-omega + n * math.log(omega) - math.lgamma(n + 1))


def poisson_tail(omega: float, n_max: int) -> float:
    """Probability mass beyond ``n_max`` photons."""
    return max(0.0, 1.0 - sum(poisson_pn(omega, n) for n in range(n_max + 1)))


def export_distribution_csv(dist: SideChannelDistribution, path: str | Path) -> None:
    """Write a 1-D distribution as ``bin_low,bin_high,probability`` rows."""
    if dist.ndim != 1:
        raise ValueError("CSV export is defined for 1-D distributions")
    edges = dist.axes[0].edges
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_low", "bin_high", "probability"])
        for lo, hi, p in zip(edges[:-1], edges[1:], dist.probabilities):
            writer.writerow([repr(float(lo)), repr(float(hi)), repr(float(p))])
