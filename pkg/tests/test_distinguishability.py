"""Waveform ingestion, normalization, and trace-distance behavior."""

import math

import numpy as np
import pytest

from decoykit import (
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
from decoykit.bundled import fixture_path
from decoykit.distinguishability import (
    Axis,
    GridMismatchError,
    WaveformError,
    export_distribution_csv,
)


def dist_1d(probs, edges=None, name="time"):
    probs = np.asarray(probs, dtype=float)
    if edges is None:
        edges = tuple(float(i) for i in range(probs.size + 1))
    return SideChannelDistribution(axes=(Axis(name, tuple(edges)),), probabilities=probs)


def random_dist(rng, n_bins, name="time"):
    p = rng.random(n_bins) + 1e-12
    return dist_1d(p / p.sum(), name=name)


# ----------------------------------------------------------------------------
# ingest_waveform


def test_ingest_minimal_two_rows(tmp_path):
    path = tmp_path / "wave.csv"
    path.write_text("coordinate,amplitude\n0,1.0\n1,1.0\n")
    trace = ingest_waveform(path)
    assert len(trace) == 2
    assert trace.coordinates == (0.0, 1.0)
    assert trace.amplitudes == (1.0, 1.0)


def test_ingest_duplicate_coordinate_rejected(tmp_path):
    path = tmp_path / "wave.csv"
    path.write_text("coordinate,amplitude\n0,1.0\n0,2.0\n")
    with pytest.raises(WaveformError):
        ingest_waveform(path)


def test_ingest_single_row_rejected(tmp_path):
    path = tmp_path / "wave.csv"
    path.write_text("coordinate,amplitude\n0,1.0\n")
    with pytest.raises(WaveformError):
        ingest_waveform(path)


def test_ingest_bad_header_rejected(tmp_path):
    path = tmp_path / "wave.csv"
    path.write_text("time,volts\n0,1.0\n1,1.0\n")
    with pytest.raises(WaveformError):
        ingest_waveform(path)


def test_ingest_non_numeric_rejected(tmp_path):
    path = tmp_path / "wave.csv"
    path.write_text("coordinate,amplitude\n0,1.0\none,2.0\n")
    with pytest.raises(WaveformError):
        ingest_waveform(path)


def test_ingest_missing_file_rejected(tmp_path):
    with pytest.raises(WaveformError):
        ingest_waveform(tmp_path / "nope.csv")


def test_ingest_bundled_fixture_row_count():
    # The shipped pump-current fixture has 49 samples (48 native bins).
    trace = ingest_waveform(fixture_path("signal_fig1a.csv"))
    assert len(trace) == 49


# ----------------------------------------------------------------------------
# normalize


def test_normalize_constant_over_equal_bins():
    trace = WaveformTrace(tuple(float(x) for x in range(9)), (1.0,) * 9)
    out = normalize(trace, [0.0, 2.0, 4.0, 6.0, 8.0])
    np.testing.assert_allclose(out.probabilities, [0.25, 0.25, 0.25, 0.25], atol=1e-15)


def test_normalize_support_containment():
    trace = WaveformTrace((0.0, 1.0, 1.5, 2.0, 3.0), (0.0, 0.0, 1.0, 0.0, 0.0))
    out = normalize(trace, [0.0, 1.0, 2.0, 3.0])
    np.testing.assert_allclose(out.probabilities, [0.0, 1.0, 0.0], atol=1e-15)


def test_normalize_triangle_symmetry():
    trace = WaveformTrace((0.0, 1.0, 2.0), (0.0, 1.0, 0.0))
    out = normalize(trace, [0.0, 1.0, 2.0])
    np.testing.assert_allclose(out.probabilities, [0.5, 0.5], atol=1e-15)


def test_normalize_clamps_negative_noise():
    trace = WaveformTrace((0.0, 1.0, 2.0, 3.0), (-5.0, 1.0, 1.0, -5.0))
    out = normalize(trace, [0.0, 3.0])
    assert np.all(out.probabilities >= 0)
    assert math.isclose(float(out.probabilities.sum()), 1.0, abs_tol=1e-12)


def test_normalize_all_negative_rejected():
    trace = WaveformTrace((0.0, 1.0, 2.0), (-1.0, -2.0, -1.0))
    with pytest.raises(ValueError):
        normalize(trace, [0.0, 2.0])


def test_normalize_bins_must_cover_trace():
    trace = WaveformTrace((0.0, 1.0, 2.0), (1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        normalize(trace, [0.5, 2.0])


def test_normalize_random_traces_sum_to_one():
    rng = np.random.default_rng(42)
    for _ in range(200):
        n = int(rng.integers(2, 40))
        coords = np.cumsum(rng.random(n) + 0.1)
        amps = rng.normal(size=n)
        amps[int(rng.integers(0, n))] = abs(rng.normal()) + 0.5  # positive area
        trace = WaveformTrace(tuple(coords.tolist()), tuple(amps.tolist()))
        out = normalize(trace)
        assert np.all(out.probabilities >= 0)
        assert abs(float(out.probabilities.sum()) - 1.0) <= 1e-9


# ----------------------------------------------------------------------------
# trace_distance


def test_trace_distance_identity_zero():
    rng = np.random.default_rng(0)
    f = random_dist(rng, 16)
    assert trace_distance(f, f) == 0.0


def test_trace_distance_disjoint_supports_is_one():
    f = dist_1d([0.5, 0.5, 0.0, 0.0])
    g = dist_1d([0.0, 0.0, 0.25, 0.75])
    assert math.isclose(trace_distance(f, g), 1.0, abs_tol=1e-15)


def test_trace_distance_direct_sum():
    f = dist_1d([0.6, 0.4])
    g = dist_1d([0.4, 0.6])
    assert math.isclose(trace_distance(f, g), 0.2, abs_tol=1e-15)


def test_trace_distance_grid_mismatch_rejected():
    f = dist_1d([0.5, 0.5], edges=(0.0, 1.0, 2.0))
    g = dist_1d([0.5, 0.5], edges=(0.0, 1.0, 3.0))
    with pytest.raises(GridMismatchError):
        trace_distance(f, g)


def test_trace_distance_properties_randomized():
    rng = np.random.default_rng(7)
    for _ in range(300):
        n = int(rng.integers(2, 24))
        f, g, h = (random_dist(rng, n) for _ in range(3))
        d_fg = trace_distance(f, g)
        assert 0.0 <= d_fg <= 1.0
        assert trace_distance(g, f) == d_fg  # symmetry
        assert d_fg <= trace_distance(f, h) + trace_distance(h, g) + 1e-12
    # zero iff equal bin-wise
    f = random_dist(rng, 12)
    g = SideChannelDistribution(axes=f.axes, probabilities=f.probabilities.copy())
    assert trace_distance(f, g) <= 1e-12
    shifted = np.roll(f.probabilities, 1)
    assert trace_distance(f, dist_1d(shifted)) > 1e-12


def test_bundled_pump_current_pair_mismatch():
    f = normalize(ingest_waveform(fixture_path("signal_fig1a.csv")))
    g = normalize(ingest_waveform(fixture_path("decoy_fig1a.csv")))
    assert abs(trace_distance(f, g) - 0.4005) < 0.01


def test_bundled_modulator_pair_mismatch():
    f = normalize(ingest_waveform(fixture_path("im_signal.csv")))
    g = normalize(ingest_waveform(fixture_path("im_decoy.csv")))
    d = trace_distance(f, g)
    assert 1e-4 < d < 1e-2
    assert abs(d - 3.6e-3) < 1e-3


def test_bundled_joint_pair_mismatch():
    ft_s = normalize(ingest_waveform(fixture_path("time_v_signal.csv")))
    ft_d = normalize(ingest_waveform(fixture_path("time_v_decoy.csv")))
    ff_s = normalize(ingest_waveform(fixture_path("freq_v_signal.csv"), axis_label="frequency"))
    ff_d = normalize(ingest_waveform(fixture_path("freq_v_decoy.csv"), axis_label="frequency"))
    d_joint = trace_distance(product_joint(ft_s, ff_s), product_joint(ft_d, ff_d))
    assert abs(d_joint - 0.1400) < 0.01


# ----------------------------------------------------------------------------
# product_joint


def test_product_joint_point_masses():
    f = dist_1d([1.0], edges=(0.0, 1.0))
    g = dist_1d([1.0], edges=(0.0, 1.0), name="frequency")
    joint = product_joint(f, g)
    assert joint.probabilities.shape == (1, 1)
    assert joint.probabilities[0, 0] == 1.0


def test_product_joint_uniform():
    f = dist_1d([0.5, 0.5])
    g = dist_1d([0.5, 0.5], name="frequency")
    joint = product_joint(f, g)
    np.testing.assert_allclose(joint.probabilities, 0.25, atol=1e-15)


def test_product_joint_preserves_normalization_and_marginals():
    rng = np.random.default_rng(3)
    for _ in range(100):
        f = random_dist(rng, int(rng.integers(2, 12)))
        g = random_dist(rng, int(rng.integers(2, 12)), name="frequency")
        joint = product_joint(f, g)
        assert abs(float(joint.probabilities.sum()) - 1.0) <= 1e-12
        np.testing.assert_allclose(joint.probabilities.sum(axis=1), f.probabilities, atol=1e-12)
        np.testing.assert_allclose(joint.probabilities.sum(axis=0), g.probabilities, atol=1e-12)


def test_product_joint_common_factor_cancels():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(2, 10))
        a, b = random_dist(rng, n), random_dist(rng, n)
        c = random_dist(rng, int(rng.integers(2, 10)), name="frequency")
        lhs = trace_distance(product_joint(a, c), product_joint(b, c))
        assert abs(lhs - trace_distance(a, b)) <= 1e-12


def test_product_joint_rejects_2d_input():
    f = dist_1d([0.5, 0.5])
    g = dist_1d([0.5, 0.5], name="frequency")
    joint = product_joint(f, g)
    with pytest.raises(ValueError):
        product_joint(joint, f)


# ----------------------------------------------------------------------------
# poisson_pn


def test_poisson_vacuum():
    assert poisson_pn(0.0, 0) == 1.0
    assert poisson_pn(0.0, 3) == 0.0


def test_poisson_value():
    # exp(-0.6) evaluated at 40 decimal digits
    assert math.isclose(poisson_pn(0.6, 0), 0.5488116360940264, rel_tol=1e-15)


def test_poisson_sums_to_one():
    rng = np.random.default_rng(5)
    for omega in (0.1, 0.2, 0.6, 1.0, *rng.random(10)):
        total = sum(poisson_pn(float(omega), n) for n in range(61))
        assert abs(total - 1.0) <= 1e-12


def test_poisson_tail_matches_sum():
    assert poisson_tail(0.6, 12) < 1e-12
    assert poisson_tail(0.6, 3) == pytest.approx(
        1.0 - sum(poisson_pn(0.6, n) for n in range(4)), abs=1e-15
    )


def test_poisson_rejects_bad_args():
    with pytest.raises(ValueError):
        poisson_pn(-0.1, 0)
    with pytest.raises(ValueError):
        poisson_pn(0.5, -1)


# ----------------------------------------------------------------------------
# domain types


def test_intensity_level_validation():
    IntensityLevel("signal", 0.6)
    with pytest.raises(ValueError):
        IntensityLevel("bright", 0.6)
    with pytest.raises(ValueError):
        IntensityLevel("signal", -0.1)


def test_mismatch_spec_validation():
    MismatchSpec(d_mu_nu=0.5, d_mu_nu1=0.0)
    with pytest.raises(ValueError):
        MismatchSpec(d_mu_nu=1.5)
    with pytest.raises(ValueError):
        MismatchSpec(d_mu_nu=0.1, d_mu_nu1=-0.2)


def test_distribution_validation():
    with pytest.raises(ValueError):
        dist_1d([0.5, 0.4])  # does not sum to 1
    with pytest.raises(ValueError):
        dist_1d([1.2, -0.2])  # negative entry


def test_export_distribution_csv(tmp_path):
    f = dist_1d([0.25, 0.75], edges=(0.0, 1.0, 2.0))
    path = tmp_path / "dist.csv"
    export_distribution_csv(f, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "bin_low,bin_high,probability"
    assert len(lines) == 3
    assert [float(x) for x in lines[1].split(",")] == [0.0, 1.0, 0.25]
