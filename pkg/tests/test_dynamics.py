import math

import numpy as np
import pytest

from dcesim.dynamics import (
    LINEAR,
    RING,
    BathSpec,
    UncertaintyViolation,
    closed_form_propagator,
    dfs_decompose,
    drift_matrices,
    evolve_linear,
    evolve_ring,
    snapshot_times,
)
from dcesim.gaussian import MIXING, GaussianState, symplectic_eigenvalues, thermal_state
from dcesim.modulation import SinusoidalModulation, TwoStepModulation

from conftest import resonant_mu

OFF = TwoStepModulation(1.0, 1.0, 1.0, 2.0)
GENTLE = TwoStepModulation.resonant(1.05)


def test_drift_matrix_examples():
    d = drift_matrices(1.0, 0.0)
    assert np.array_equal(d.M2, 2 * np.array([[0.0, 1.0], [-1.0, 0.0]]))
    d = drift_matrices(0.8, 0.3)
    assert np.trace(d.M2) == 0.0
    Z = np.zeros((2, 2))
    assert np.array_equal(d.M4, 0.5 * np.block([[d.M2, Z], [Z, -d.M2.T]]))
    assert np.allclose(d.Gamma @ d.Gamma, np.eye(4), atol=1e-15)
    assert np.array_equal(d.Gamma, d.Gamma.T)
    assert np.array_equal(d.alpha_prime, np.diag([1.0, 1.0, 0.0, 0.0]))


@pytest.mark.parametrize("profile", [OFF, SinusoidalModulation(1.0, 0.0, 2.0)])
@pytest.mark.parametrize("nbar, gamma", [(0.0, 0.0), (1.5, 0.2)])
def test_equilibrium_is_stationary(profile, nbar, gamma):
    bath = BathSpec(gamma, nbar)
    for evolve, modes in ((evolve_linear, 1), (evolve_ring, 2)):
        s0 = thermal_state(nbar, modes)
        tr = evolve(s0, profile, bath, 20.0, snapshot_interval=1.0)
        assert np.max(np.abs(tr.covs - s0.cov)) < 1e-10
        assert np.allclose(tr.n_mean, modes * (2 * nbar + 1) / 2 if modes == 1 else 2 * nbar + 1, atol=1e-10)


def test_vacuum_relaxes_to_bath():
    # gamma is the amplitude rate, so the covariance relaxes at 2 gamma
    gamma, nbar = 0.1, 1.0
    tr = evolve_linear(thermal_state(0.0, 1), OFF, BathSpec(gamma, nbar), 30.0, snapshot_interval=0.5)
    c_inf, c0 = (2 * nbar + 1) / 4, 0.25
    expected = c_inf + (c0 - c_inf) * np.exp(-2 * gamma * tr.times)
    assert np.allclose(tr.covs[:, 0, 0], expected, atol=1e-10)
    assert np.allclose(tr.covs[:, 0, 1], 0.0, atol=1e-12)
    assert np.all(np.diff(tr.covs[:, 0, 0]) > 0)


def test_linear_lossless_growth_rate():
    mu = resonant_mu(1.2)
    tr = evolve_linear(thermal_state(0.0, 1), TwoStepModulation.resonant(1.2), BathSpec(), 40 * TwoStepModulation.resonant(1.2).period)
    assert tr.tail_slope("trace_sigma") == pytest.approx(2 * mu, rel=0.01)


def test_ring_lossless_tmsv():
    p = TwoStepModulation.resonant(1.2)
    mu = resonant_mu(1.2)
    tr = evolve_ring(thermal_state(0.0, 2), p, BathSpec(), 20 * p.period)
    marks = tr.period_marks()
    expected = 2 * mu * tr.times[marks] / math.log(2)
    assert np.allclose(tr.e_n[marks], expected, rtol=1e-8, atol=1e-8)
    assert np.all(np.diff(tr.e_n[marks]) > 0)


def test_ring_strong_losses_still_grow_at_two_mu():
    mu = resonant_mu(1.05)
    tr = evolve_ring(thermal_state(0.5, 2), GENTLE, BathSpec(2 * mu, 0.5), 150 * GENTLE.period)
    assert tr.tail_slope() == pytest.approx(2 * mu, rel=0.05)


@pytest.mark.parametrize("gamma_T, nbar", [(0.05, 0.0), (0.5, 1.0), (2.0, 3.0)])
def test_dfs_block_is_invariant(gamma_T, nbar):
    bath = BathSpec(gamma_T / GENTLE.period, nbar)
    tr = evolve_ring(thermal_state(nbar, 2), GENTLE, bath, 50 * GENTLE.period, snapshot_interval=GENTLE.period / 5)
    assert np.max(np.abs(tr.nu_dfs - (2 * nbar + 1) / 4)) < 1e-8


def test_lossless_preserves_symplectic_spectrum():
    s0 = thermal_state(0.7, 2)
    tr = evolve_ring(s0, GENTLE, BathSpec(), 50 * GENTLE.period, snapshot_interval=GENTLE.period / 3)
    spectra = np.array([symplectic_eigenvalues(c) for c in tr.covs])
    assert np.max(np.abs(spectra - 0.6)) < 1e-8


def test_linear_matches_ring_plus_block():
    bath = BathSpec(0.02, 0.8)
    p = TwoStepModulation.resonant(1.2)
    lin = evolve_linear(thermal_state(0.8, 1), p, bath, 15 * p.period, snapshot_interval=0.3)
    ring = evolve_ring(thermal_state(0.8, 2), p, bath, 15 * p.period, snapshot_interval=0.3)
    plus = np.array([dfs_decompose(s).plus_cov for s in ring.states()])
    scale = np.max(np.abs(plus), axis=(1, 2))[:, None, None]
    assert np.max(np.abs(plus - lin.covs) / scale) < 1e-8


def test_linear_matches_ring_plus_block_sinusoidal():
    bath = BathSpec(0.003, 0.5)
    p = SinusoidalModulation(1.0, 0.02, 2.0)
    lin = evolve_linear(thermal_state(0.5, 1), p, bath, 10 * p.period)
    ring = evolve_ring(thermal_state(0.5, 2), p, bath, 10 * p.period)
    plus = np.array([dfs_decompose(s).plus_cov for s in ring.states()])
    assert np.max(np.abs(plus - lin.covs)) < 1e-8


def test_mean_decay_bounds():
    mu = resonant_mu(1.2)
    p = TwoStepModulation.resonant(1.2)
    gamma = 0.5 * mu
    mean0 = MIXING @ np.array([1.0, -0.5, 0.3, 0.8])
    tr = evolve_ring(GaussianState(mean0, np.eye(4) / 4), p, BathSpec(gamma, 0.0), 20 * p.period, snapshot_interval=0.2)
    primed = np.array([MIXING @ m for m in tr.means])
    plus0, minus0 = np.linalg.norm((MIXING @ mean0)[:2]), np.linalg.norm((MIXING @ mean0)[2:])
    c = 4.0  # covers the within-period excursion of the squeeze
    assert np.all(np.linalg.norm(primed[:, :2], axis=1) <= c * plus0 * np.exp((mu - gamma / 2) * tr.times))
    assert np.all(np.linalg.norm(primed[:, 2:], axis=1) <= c * minus0 * np.exp(mu * tr.times))


def test_snapshot_grid_contains_period_marks():
    p = TwoStepModulation.resonant(1.2)
    t = snapshot_times(p, 5 * p.period, 0.7)
    for m in range(6):
        assert np.any(t == m * p.period)
    assert np.all(np.diff(t) > 1e-9 * p.period)
    assert t[-1] == pytest.approx(5 * p.period)


def test_rejects_wrong_mode_count_and_cavity():
    with pytest.raises(ValueError):
        evolve_ring(thermal_state(0.0, 1), GENTLE, BathSpec(), 1.0)
    with pytest.raises(ValueError):
        evolve_linear(thermal_state(0.0, 2), GENTLE, BathSpec(), 1.0)
    with pytest.raises(ValueError):
        closed_form_propagator(GENTLE, BathSpec(), 1.0, cavity="box")


def test_unphysical_start_is_reported():
    bad = GaussianState(np.zeros(2), np.eye(2) / 8)
    with pytest.raises(UncertaintyViolation):
        evolve_linear(bad, OFF, BathSpec(), 1.0)


def test_bath_validation():
    with pytest.raises(ValueError):
        BathSpec(-0.1, 0.0)
    with pytest.raises(ValueError):
        BathSpec(0.1, math.nan)


def test_closed_form_at_zero_is_identity():
    cf = closed_form_propagator(GENTLE, BathSpec(0.1, 1.0), 0.0)
    assert np.allclose(cf.U, np.eye(4), atol=1e-15)
    assert np.array_equal(cf.sigma_p, np.zeros((4, 4)))


def test_closed_form_lossless_is_congruence():
    p = TwoStepModulation.resonant(1.3)
    cf = closed_form_propagator(p, BathSpec(0.0, 2.0), 7 * p.period)
    assert np.array_equal(cf.U_th, cf.U)
    assert not cf.sigma_p.any()
    out = cf.propagate(thermal_state(2.0, 2))
    assert np.allclose(out.symplectic_eigenvalues(), [1.25, 1.25], rtol=1e-9)


def test_closed_form_blocks():
    cf = closed_form_propagator(GENTLE, BathSpec(0.05, 0.0), 3 * GENTLE.period)
    assert not cf.U[:2, 2:].any() and not cf.U[2:, :2].any()
    assert not cf.sigma_p[2:, :].any() and not cf.sigma_p[:, 2:].any()


@pytest.mark.parametrize("cavity", [LINEAR, RING])
@pytest.mark.parametrize(
    "profile, gamma, nbar, m",
    [
        (TwoStepModulation(1.0, 1.3, 0.9, 1.7), 0.04, 0.5, 6),
        (TwoStepModulation.resonant(0.8), 0.3, 2.0, 10),
        (SinusoidalModulation(1.0, 0.02, 2.0), 0.004, 1.0, 4),
    ],
)
def test_closed_form_matches_ode(cavity, profile, gamma, nbar, m):
    bath = BathSpec(gamma, nbar)
    t = m * profile.period
    modes = 1 if cavity == LINEAR else 2
    s0 = thermal_state(nbar, modes)
    evolve = evolve_linear if cavity == LINEAR else evolve_ring
    ode = evolve(s0, profile, bath, t).state(-1)
    cf = closed_form_propagator(profile, bath, t, cavity=cavity).propagate(s0)
    scale = max(1.0, np.max(np.abs(ode.cov)))
    assert np.max(np.abs(cf.cov - ode.cov)) < 1e-6 * scale


def test_precision_loss_is_reported():
    # 60 lossless periods at f_r = 2 squeeze by ~exp(80): no double covariance survives that
    p = TwoStepModulation.resonant(2.0)
    with pytest.raises(UncertaintyViolation, match="double precision|below"):
        evolve_ring(thermal_state(0.0, 2), p, BathSpec(), 60 * p.period, snapshot_interval=p.period / 4)
