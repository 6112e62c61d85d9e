"""Simulator: sampling statistics, receiver processing, determinism."""
import math

import numpy as np
import pytest
from scipy import stats

from secnet.config import NetworkConfig
from secnet.errors import NumericError
from secnet.montecarlo import (
    SimSettings,
    _complex_normal,
    _far_field_profile,
    _far_field_scalar,
    estimate_fd_connection,
    estimate_hd_connection,
    estimate_secrecy_outage,
    jamming_projectors,
    mmse_sir,
    null_space_basis,
    sample_network,
    trial_rng,
    zf_mrc_weight,
)

BASE = NetworkConfig()
FAST = SimSettings(trials=2_000, seed=11)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def test_empty_process_when_density_zero():
    cfg = BASE.replace(lambda_h=0.0, lambda_f=0.0, lambda_e=0.0)
    real = sample_network(cfg, FAST, 0)
    assert len(real.hd_rx) == len(real.fd_rx) == len(real.eve) == 0


def test_poisson_mean_count():
    sim = SimSettings(trials=1, seed=2)
    counts = [len(sample_network(BASE, sim, t).fd_rx) for t in range(10_000)]
    mean = np.mean(counts)
    expected = 1e-3 * math.pi * sim.window_radius**2
    assert mean == pytest.approx(expected, rel=0.03)
    # counts should be genuinely Poisson-dispersed, not quasi-deterministic
    assert np.var(counts) == pytest.approx(expected, rel=0.1)


def test_sampling_determinism():
    a = sample_network(BASE, FAST, 7)
    b = sample_network(BASE, FAST, 7)
    assert np.array_equal(a.hd_rx, b.hd_rx)
    assert np.array_equal(a.fd_rx, b.fd_rx)
    assert np.array_equal(a.eve, b.eve)
    c = sample_network(BASE, FAST, 8)
    assert not np.array_equal(a.fd_rx, c.fd_rx)


def test_pair_distance_correlation_by_construction():
    real = sample_network(BASE, SimSettings(trials=1, seed=3), 0)
    tx = real.fd_tx(BASE.d_f)
    r = np.abs(real.fd_rx)
    d_hat = np.abs(tx)
    # law of cosines with the included angle between the pair offset and
    # the receiver bearing: d_hat^2 = r^2 + d_f^2 + 2 r d_f cos(psi)
    offset = tx - real.fd_rx
    psi = np.angle(offset) - np.angle(real.fd_rx)
    rhs = r**2 + BASE.d_f**2 + 2 * r * BASE.d_f * np.cos(psi)
    assert np.allclose(d_hat**2, rhs, rtol=1e-10)
    assert np.all(np.abs(d_hat - r) <= BASE.d_f + 1e-12)


def test_points_fall_in_window():
    real = sample_network(BASE, FAST, 5)
    assert np.all(np.abs(real.fd_rx) <= FAST.window_radius + 1e-9)
    assert np.all(np.abs(real.eve) <= FAST.window_radius + 1e-9)


# ---------------------------------------------------------------------------
# Receiver processing helpers
# ---------------------------------------------------------------------------

def test_si_nulling_invariant_single_antenna():
    rng = trial_rng(17, 0)
    for _ in range(50):
        f_d = _complex_normal(rng, 5)
        f_si = _complex_normal(rng, 5)
        u, gain = zf_mrc_weight(f_d, f_si)
        assert abs(np.vdot(u, f_si)) < 1e-10
        assert np.linalg.norm(u) == pytest.approx(1.0, abs=1e-12)
        assert gain > 0


def test_si_nulling_invariant_multi_antenna():
    rng = trial_rng(19, 0)
    nr, n_t, n_j = 4, 3, 2
    for _ in range(50):
        own = _complex_normal(rng, nr)
        si = _complex_normal(rng, nr, n_t)
        w = own.conj() / np.linalg.norm(own)
        row = w @ si
        basis = null_space_basis(row.conj())[:, :n_j]
        assert np.linalg.norm(row @ basis) < 1e-10
        gram = basis.conj().T @ basis
        assert np.allclose(gram, np.eye(n_j), atol=1e-12)


def test_jamming_projectors_batch_contract():
    rng = trial_rng(23, 1)
    bases = jamming_projectors(rng, 40, nr=4, n_t=5, n_j=3)
    assert bases.shape == (40, 5, 3)
    gram = np.einsum("znj,znk->zjk", bases.conj(), bases)
    assert np.allclose(gram, np.eye(3), atol=1e-12)


def test_desired_power_law_kolmogorov_smirnov():
    # ZF-MRC combined desired power follows Gamma(n_f - 2, 1)
    rng = trial_rng(99, 0)
    n_f = 6
    gains = [
        zf_mrc_weight(_complex_normal(rng, n_f - 1), _complex_normal(rng, n_f - 1))[1]
        for _ in range(10_000)
    ]
    result = stats.kstest(gains, "gamma", args=(n_f - 2, 0, 1))
    assert result.pvalue > 0.01


def test_mmse_beats_mrc_per_draw():
    rng = trial_rng(31, 2)
    n_e = 4
    for _ in range(100):
        g = _complex_normal(rng, n_e)
        basis = _complex_normal(rng, 6, n_e)
        cov = np.einsum("kn,km->nm", basis, basis.conj()) + 1e-9 * np.eye(n_e)
        sir_mmse = mmse_sir(g, cov, prefactor=1.0)
        mrc = float(np.vdot(g, g).real ** 2 / np.vdot(g, cov @ g).real)
        assert sir_mmse >= mrc - 1e-12


# ---------------------------------------------------------------------------
# Far-field completion
# ---------------------------------------------------------------------------

def test_far_field_profile_center_value():
    grid, profile = _far_field_profile(3.5)
    # at the center the ring average collapses: J(0) = 2 pi / (alpha - 2)
    assert profile[0] == pytest.approx(2 * math.pi / 1.5, rel=1e-8)
    assert np.all(np.diff(profile) > 0)  # grows toward the window edge


def test_far_field_scalar_matches_closed_form():
    value = _far_field_scalar(BASE, 100.0)
    expected = (1e-3 * 1.0 + 1e-3 * 2.0) * 2 * math.pi * 100.0**-1.5 / 1.5
    assert value == pytest.approx(expected, rel=1e-12)


# ---------------------------------------------------------------------------
# Estimators: exact edge cases
# ---------------------------------------------------------------------------

def test_connection_certain_without_interferers():
    cfg = BASE.replace(lambda_h=0.0, lambda_f=0.0)
    est = estimate_fd_connection(1e6, cfg, FAST)
    assert est.value == 1.0 and est.half_width == 0.0
    est = estimate_hd_connection(1e6, cfg, FAST)
    assert est.value == 1.0


def test_connection_lost_at_huge_threshold():
    est = estimate_fd_connection(1e12, BASE, FAST)
    assert est.value == 0.0


def test_secrecy_outage_edge_cases():
    cfg = BASE.replace(lambda_e=0.0)
    assert estimate_secrecy_outage(1.0, cfg, FAST).value == 0.0
    tiny = SimSettings(trials=500, seed=4)
    est = estimate_secrecy_outage(1e-12, BASE, tiny)
    assert est.value == pytest.approx(1.0, abs=0.01)  # some trials have no eve


def test_probability_estimate_interval():
    est = estimate_fd_connection(1.0, BASE, FAST)
    z = stats.norm.ppf(0.5 * (1 + FAST.confidence_level))
    expected = z * math.sqrt(est.value * (1 - est.value) / FAST.trials)
    assert est.half_width == pytest.approx(expected, rel=1e-12)
    assert est.trials == FAST.trials


def test_settings_validation():
    with pytest.raises(ValueError):
        SimSettings(trials=0)
    with pytest.raises(ValueError):
        SimSettings(trials=10, window_radius=-1.0)
    with pytest.raises(ValueError):
        SimSettings(trials=10, confidence_level=1.5)


# ---------------------------------------------------------------------------
# Determinism and parallel equivalence
# ---------------------------------------------------------------------------

def test_estimates_bit_reproducible_across_workers():
    sim1 = SimSettings(trials=600, seed=21, workers=1)
    sim2 = SimSettings(trials=600, seed=21, workers=2)
    for fn in (estimate_fd_connection, estimate_secrecy_outage):
        a = fn(1.0, BASE, sim1)
        b = fn(1.0, BASE, sim2)
        assert a == b


def test_multi_antenna_estimators_run_all_paths():
    cfg = NetworkConfig(n_f=6, n_t=3, n_j=2, p_t=10.0, lambda_e=1e-3)
    sim = SimSettings(trials=400, seed=13)
    for fn, beta in (
        (estimate_fd_connection, 1.0),
        (estimate_hd_connection, 1.0),
        (estimate_secrecy_outage, 1.0),
    ):
        est = fn(beta, cfg, sim)
        assert 0.0 <= est.value <= 1.0


def test_more_receive_antennas_help():
    sim = SimSettings(trials=4_000, seed=37)
    small = estimate_hd_connection(2.0, BASE.replace(n_h=2), sim)
    large = estimate_hd_connection(2.0, BASE.replace(n_h=8), sim)
    assert large.value >= small.value - 2 * small.half_width


def test_ridge_insensitivity():
    cfg = BASE.replace(lambda_e=1e-3)
    a = estimate_secrecy_outage(1.0, cfg, SimSettings(trials=2_000, seed=41, ridge=1e-12))
    b = estimate_secrecy_outage(1.0, cfg, SimSettings(trials=2_000, seed=41, ridge=1e-9))
    assert abs(a.value - b.value) <= a.half_width


def test_disabled_ridge_raises_when_structurally_singular():
    # no jamming at all and regularization off: covariance cannot be full rank
    cfg = BASE.replace(lambda_f=0.0, lambda_e=1e-2, n_e=4)
    sim = SimSettings(trials=50, seed=43, ridge=0.0)
    with pytest.raises(NumericError):
        estimate_secrecy_outage(1.0, cfg, sim)


def test_window_sufficiency_connection():
    cfg = BASE
    base = estimate_fd_connection(1.0, cfg, SimSettings(trials=6_000, seed=51, window_radius=100.0))
    double = estimate_fd_connection(1.0, cfg, SimSettings(trials=6_000, seed=51, window_radius=200.0))
    assert abs(base.value - double.value) < base.half_width


@pytest.mark.slow
def test_window_sufficiency_secrecy():
    # the far-field completion is what makes this hold: without it the
    # truncated jamming tail shifts the estimate by several half-widths
    cfg = BASE.replace(p_t=10.0, lambda_e=1e-3)
    base = estimate_secrecy_outage(
        1.0, cfg, SimSettings(trials=20_000, seed=71, window_radius=100.0, workers=2)
    )
    double = estimate_secrecy_outage(
        1.0, cfg, SimSettings(trials=20_000, seed=71, window_radius=200.0, workers=2)
    )
    assert abs(base.value - double.value) < base.half_width
