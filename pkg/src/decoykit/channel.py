"""Honest channel and receiver model for a fibre BB84 link.

Gains and error rates below serve two roles: ground truth when simulating
what Alice and Bob would observe without an eavesdropper, and the target
statistics an attacker must reproduce to stay hidden.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping

from .distinguishability import IntensityLevel


@dataclass(frozen=True)
class DetectorParams:
    """Receiver and channel constants.

    Args:
        y0: Dark-count rate per pulse.
        eta_bob: Transmittance of the receiver unit, detector included.
        eta_bob_cal: Calibrated receiver transmittance used by the
            calibrated security analysis; at most ``eta_bob``.
        e_detector: Probability a photon ends up in the wrong detector
            (misalignment).
        e0: Error fraction of dark counts; 0.5 for random clicks.
        f_ec: Error-correction inefficiency, >= 1 (1 is the Shannon limit).
        alpha_db_per_km: Fibre loss.
        q: Sifting factor multiplying the key rate.
    """

    y0: float = 1.7e-6
    eta_bob: float = 0.045
    eta_bob_cal: float = 0.045
    e_detector: float = 0.033
    e0: float = 0.5
    f_ec: float = 1.22
    alpha_db_per_km: float = 0.21
    q: float = 1.0

    def __post_init__(self) -> None:
        if self.y0 < 0:
            raise ValueError("y0 must be >= 0")
        if not 0.0 < self.eta_bob <= 1.0:
            raise ValueError("eta_bob must lie in (0, 1]")
        if not 0.0 < self.eta_bob_cal <= self.eta_bob:
            raise ValueError("eta_bob_cal must lie in (0, eta_bob]")
        if not 0.0 <= self.e_detector <= 0.5:
            raise ValueError("e_detector must lie in [0, 0.5]")
        if not 0.0 <= self.e0 <= 1.0:
            raise ValueError("e0 must lie in [0, 1]")
        if self.f_ec < 1.0:
            raise ValueError("f_ec must be >= 1")
        if self.alpha_db_per_km < 0:
            raise ValueError("alpha_db_per_km must be >= 0")
        if not 0.0 < self.q <= 1.0:
            raise ValueError("q must lie in (0, 1]")


#: Standard fibre-system parameter set used throughout the bundled examples.
GYS = DetectorParams()

PRESETS: Mapping[str, DetectorParams] = {"gys": GYS}


def detector_from_config(spec: str | Mapping[str, float]) -> DetectorParams:
    """Build parameters from a preset name or a ``detector`` config mapping."""
    if isinstance(spec, str):
        try:
            return PRESETS[spec.lower()]
        except KeyError:
            raise ValueError(f"unknown detector preset {spec!r}; known: {sorted(PRESETS)}") from None
    unknown = set(spec) - {f.name for f in DetectorParams.__dataclass_fields__.values()}
    if unknown:
        raise ValueError(f"unknown detector fields: {sorted(unknown)}")
    return DetectorParams(**spec)


def load_detector_json(path: str | Path) -> DetectorParams:
    """Load the ``detector`` section of a JSON config file."""
    with Path(path).open() as fh:
        doc = json.load(fh)
    if "detector" not in doc:
        raise ValueError(f"{path}: missing 'detector' section")
    return detector_from_config(doc["detector"])


def with_preset_overrides(base: DetectorParams, **overrides: float) -> DetectorParams:
    return replace(base, **overrides)


@dataclass(frozen=True)
class ObservedStatistics:
    """Per-intensity gains and error rates, honest or under attack."""

    gains: Mapping[str, float]
    error_rates: Mapping[str, float]

    def __post_init__(self) -> None:
        if set(self.gains) != set(self.error_rates):
            raise ValueError("gains and error_rates must cover the same intensities")
        for label, gain in self.gains.items():
            if not 0.0 <= gain <= 1.0:
                raise ValueError(f"gain for {label!r} outside [0, 1]: {gain}")
            err = self.error_rates[label]
            if not 0.0 <= err <= 1.0:
                raise ValueError(f"error rate for {label!r} outside [0, 1]: {err}")

    def gain(self, label: str) -> float:
        try:
            return self.gains[label]
        except KeyError:
            raise KeyError(f"no gain recorded for intensity {label!r}") from None

    def error_rate(self, label: str) -> float:
        try:
            return self.error_rates[label]
        except KeyError:
            raise KeyError(f"no error rate recorded for intensity {label!r}") from None

    def labels(self) -> tuple[str, ...]:
        return tuple(self.gains)


def transmittance(params: DetectorParams, length_km: float) -> float:
    """Overall system transmittance: receiver times fibre loss."""
    if length_km < 0:
        raise ValueError("length_km must be >= 0")
    return params.eta_bob * 10.0 ** (-params.alpha_db_per_km * length_km / 10.0)


def expected_gain(omega: float, eta: float, y0: float) -> float:
    """Detection probability for a pulse of mean photon number omega."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    if omega < 0:
        raise ValueError("omega must be >= 0")
    # expm1 keeps the small 1 - exp(-eta*omega) term exact.
    return min(1.0, y0 - math.expm1(-eta * omega))


def expected_qber(omega: float, eta: float, params: DetectorParams) -> float:
    """Error rate among detections: dark counts plus misalignment."""
    gain = expected_gain(omega, eta, params.y0)
    if gain <= 0.0:
        raise ValueError("zero gain; QBER undefined")
    err = (params.e0 * params.y0 - params.e_detector * math.expm1(-eta * omega)) / gain
    return min(err, 1.0)


def simulate_statistics(
    params: DetectorParams,
    length_km: float,
    intensities: Iterable[IntensityLevel],
) -> ObservedStatistics:
    """Honest gains and QBERs for each intensity at the given distance."""
    eta = transmittance(params, length_km)
    gains: dict[str, float] = {}
    errors: dict[str, float] = {}
    for level in intensities:
        if level.label in gains:
            raise ValueError(f"duplicate intensity label {level.label!r}")
        gains[level.label] = expected_gain(level.mean_photon_number, eta, params.y0)
        errors[level.label] = expected_qber(level.mean_photon_number, eta, params)
    return ObservedStatistics(gains=gains, error_rates=errors)
