"""Honest channel model: transmittance, gains, QBERs."""

import math

import pytest

from decoykit import (
    GYS,
    DetectorParams,
    IntensityLevel,
    ObservedStatistics,
    detector_from_config,
    expected_gain,
    expected_qber,
    simulate_statistics,
    transmittance,
)
from decoykit.channel import load_detector_json


def test_gys_preset_values():
    assert GYS.y0 == 1.7e-6
    assert GYS.eta_bob == 0.045
    assert GYS.e_detector == 0.033
    assert GYS.f_ec == 1.22
    assert GYS.alpha_db_per_km == 0.21
    assert GYS.e0 == 0.5
    assert GYS.q == 1.0


@pytest.mark.parametrize(
    "field,value",
    [
        ("y0", -1e-9),
        ("eta_bob", 0.0),
        ("eta_bob", 1.5),
        ("eta_bob_cal", 0.5),  # above eta_bob
        ("e_detector", 0.6),
        ("f_ec", 0.9),
        ("alpha_db_per_km", -0.1),
        ("q", 0.0),
        ("e0", 1.2),
    ],
)
def test_detector_params_validation(field, value):
    kwargs = {field: value}
    with pytest.raises(ValueError):
        DetectorParams(**kwargs)


def test_detector_from_config():
    assert detector_from_config("gys") == GYS
    custom = detector_from_config({"y0": 1e-6, "eta_bob": 0.1, "eta_bob_cal": 0.1})
    assert custom.eta_bob == 0.1
    with pytest.raises(ValueError):
        detector_from_config("nope")
    with pytest.raises(ValueError):
        detector_from_config({"dark_rate": 1e-6})


def test_load_detector_json(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text('{"detector": {"eta_bob": 0.1, "eta_bob_cal": 0.05}}')
    params = load_detector_json(path)
    assert params.eta_bob == 0.1
    assert params.eta_bob_cal == 0.05
    path.write_text('{"other": 1}')
    with pytest.raises(ValueError):
        load_detector_json(path)


# ----------------------------------------------------------------------------
# transmittance


def test_transmittance_zero_length():
    assert transmittance(GYS, 0.0) == GYS.eta_bob


def test_transmittance_at_100km():
    # 0.045 * 10**(-2.1) at 40 decimal digits
    assert math.isclose(transmittance(GYS, 100.0), 3.5744770562592666e-4, rel_tol=1e-14)


def test_transmittance_exponent_additivity():
    for length in (10.0, 37.0, 80.0):
        ratio = transmittance(GYS, 2 * length) / transmittance(GYS, length)
        assert math.isclose(ratio, 10.0 ** (-GYS.alpha_db_per_km * length / 10.0), rel_tol=1e-12)


def test_transmittance_rejects_negative_length():
    with pytest.raises(ValueError):
        transmittance(GYS, -1.0)


# ----------------------------------------------------------------------------
# expected_gain / expected_qber


def test_gain_opaque_channel():
    assert expected_gain(0.6, 0.0, GYS.y0) == GYS.y0


def test_gain_vacuum_pulse():
    assert expected_gain(0.0, 0.045, GYS.y0) == GYS.y0


def test_gain_value():
    # y0 + 1 - exp(-0.045 * 0.6) at 40 decimal digits
    assert math.isclose(expected_gain(0.6, 0.045, GYS.y0), 0.02664045847566321, rel_tol=1e-14)


def test_gain_clamped_at_one():
    assert expected_gain(1.0, 1.0, 0.9) == 1.0


def test_qber_vacuum_is_dark_count_fraction():
    assert expected_qber(0.0, 0.045, GYS) == GYS.e0


def test_qber_perfect_apparatus():
    params = DetectorParams(y0=1e-12, e_detector=0.0)
    assert expected_qber(0.6, 0.045, params) < 1e-6


def test_qber_zero_gain_rejected():
    params = DetectorParams(y0=0.0)
    with pytest.raises(ValueError):
        expected_qber(0.0, 0.045, params)


def test_qber_value():
    # (0.5*y0 + 0.033*(1-exp(-0.027))) / Q at 40 decimal digits
    assert math.isclose(expected_qber(0.6, 0.045, GYS), 0.03302980053818238, rel_tol=1e-14)


# ----------------------------------------------------------------------------
# simulate_statistics


def levels(mu=0.6, nu=0.2):
    return [
        IntensityLevel("signal", mu),
        IntensityLevel("decoy", nu),
        IntensityLevel("vacuum", 0.0),
    ]


def test_simulate_vacuum_entry():
    stats = simulate_statistics(GYS, 37.0, levels())
    assert stats.gain("vacuum") == GYS.y0
    assert stats.error_rate("vacuum") == 0.5


def test_simulate_gain_monotone_in_intensity():
    stats = simulate_statistics(GYS, 25.0, levels())
    assert stats.gain("signal") > stats.gain("decoy") > stats.gain("vacuum")


def test_simulate_gys_tuple_at_50km():
    # Frozen from a 40-digit evaluation of the closed-form model.
    stats = simulate_statistics(GYS, 50.0, levels())
    assert math.isclose(stats.gain("signal"), 0.0024051845275652084, rel_tol=1e-13)
    assert math.isclose(stats.error_rate("signal"), 0.03333007862428072, rel_tol=1e-13)
    assert math.isclose(stats.gain("decoy"), 0.0008035042273834744, rel_tol=1e-13)
    assert math.isclose(stats.error_rate("decoy"), 0.03398804707298834, rel_tol=1e-13)


def test_simulate_rejects_duplicate_labels():
    with pytest.raises(ValueError):
        simulate_statistics(GYS, 10.0, [IntensityLevel("signal", 0.6), IntensityLevel("signal", 0.5)])


def test_gain_decreasing_in_length():
    gains = [simulate_statistics(GYS, length, levels()).gain("signal") for length in (0, 20, 60, 120)]
    assert gains == sorted(gains, reverse=True)


def test_qber_approaches_misalignment_when_signal_dominates():
    # eta*omega >> y0 at short distance: errors are dominated by misalignment.
    stats = simulate_statistics(GYS, 0.0, levels())
    assert abs(stats.error_rate("signal") - GYS.e_detector) < 1e-4


def test_qber_bounded_by_half():
    for length in (0.0, 50.0, 120.0, 180.0):
        stats = simulate_statistics(GYS, length, levels())
        for label in stats.labels():
            assert stats.error_rate(label) <= 0.5 + 1e-12


def test_observed_statistics_validation():
    with pytest.raises(ValueError):
        ObservedStatistics(gains={"signal": 1.2}, error_rates={"signal": 0.1})
    with pytest.raises(ValueError):
        ObservedStatistics(gains={"signal": 0.5}, error_rates={"decoy": 0.1})
    stats = ObservedStatistics(gains={"signal": 0.5}, error_rates={"signal": 0.1})
    with pytest.raises(KeyError):
        stats.gain("decoy")
