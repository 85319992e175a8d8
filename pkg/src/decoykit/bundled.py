"""Access to the synthetic waveform fixtures shipped with the package."""

from __future__ import annotations

from pathlib import Path

_FIXTURE_DIR = Path(__file__).parent / "fixtures"

#: Dual-peak pump-current-modulated source, trace distance 0.4005.
PUMP_CURRENT_SIGNAL = "signal_fig1a.csv"
PUMP_CURRENT_DECOY = "decoy_fig1a.csv"
#: Externally modulated source, trace distance 3.6e-3.
MODULATOR_SIGNAL = "im_signal.csv"
MODULATOR_DECOY = "im_decoy.csv"
#: Two-laser source time/frequency pairs, joint trace distance 0.1400.
TWO_LASER_TIME_SIGNAL = "time_v_signal.csv"
TWO_LASER_TIME_DECOY = "time_v_decoy.csv"
TWO_LASER_FREQ_SIGNAL = "freq_v_signal.csv"
TWO_LASER_FREQ_DECOY = "freq_v_decoy.csv"

ALL_FIXTURES = (
    PUMP_CURRENT_SIGNAL,
    PUMP_CURRENT_DECOY,
    MODULATOR_SIGNAL,
    MODULATOR_DECOY,
    TWO_LASER_TIME_SIGNAL,
    TWO_LASER_TIME_DECOY,
    TWO_LASER_FREQ_SIGNAL,
    TWO_LASER_FREQ_DECOY,
)


def fixture_path(name: str) -> Path:
    """Absolute path of a bundled fixture CSV."""
    path = _FIXTURE_DIR / name
    if not path.is_file():
        raise FileNotFoundError(f"no bundled fixture named {name!r}")
    return path
