import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dcesim.asymptotics import (
    AsymptoticParams,
    ClassicalSeed,
    DiscreteDrive,
    SinusoidalDrive,
    asymptotic_log_negativity,
    asymptotic_photons,
    classical_yield,
    f_factors,
    f_plus_limit,
    lossless_log_negativity,
    occurrence_time,
)
from dcesim.dynamics import BathSpec, evolve_ring
from dcesim.gaussian import thermal_state
from dcesim.modulation import TwoStepModulation

P12 = TwoStepModulation.resonant(1.2)
MU12 = math.log(1.2) / P12.period


def discrete(gamma, nbar=0.0, profile=P12, mu=None):
    return AsymptoticParams.from_profile(profile, BathSpec(gamma, nbar), mu=mu)


def sine(gamma, nbar=0.0, mu=0.005, T=math.pi):
    return AsymptoticParams(mu, gamma, nbar, T, SinusoidalDrive())


@pytest.mark.parametrize("make", [discrete, sine])
def test_f_factors_vanish_without_losses(make):
    assert f_factors(make(0.0), 10) == (0.0, 0.0)


@pytest.mark.parametrize("make", [discrete, sine])
@pytest.mark.parametrize("m", [1, 7, 300])
def test_f_factors_vanish_linearly_in_gamma(make, m):
    # F_minus carries exp(2 mu mT), so the limit is pointwise in m: F ~ gamma
    a, b = f_factors(make(1e-10), m), f_factors(make(1e-11), m)
    assert b[0] / a[0] == pytest.approx(0.1, rel=1e-6)
    assert b[1] / a[1] == pytest.approx(0.1, rel=1e-6)


def test_sinusoidal_f_plus_limit():
    p = sine(0.02)
    T, ep, em = p.T, p.eta_plus, p.eta_minus
    expected = 2 * p.gamma * (1 - math.exp(2 * em * T)) / (em * (1 - math.exp(2 * ep * T)))
    assert f_factors(p, 1e6)[0] == pytest.approx(expected, rel=1e-12)
    assert f_plus_limit(p) == pytest.approx(expected, rel=1e-12)


def test_discrete_example_is_finite():
    g = 0.01 / P12.t1  # gamma t1 = 0.01
    p = AsymptoticParams(MU12, g, 0.0, P12.period, DiscreteDrive(0.01 / g, 0.01 / g, 1.2))
    fp, fm = f_factors(p, 100)
    assert math.isfinite(fp) and fp > 0
    assert math.isfinite(fm) and fm > 0


def test_f_factors_continuous_across_eta_minus_zero():
    # eta_minus = 0 is a removable singularity of F_minus
    at = f_factors(discrete(MU12), 50)[1]
    for d in (1e-7, -1e-7):
        assert f_factors(discrete(MU12 * (1 + d)), 50)[1] == pytest.approx(at, rel=1e-6)
    at = f_factors(sine(0.005), 50)
    for d in (1e-7, -1e-7):
        near = f_factors(sine(0.005 * (1 + d)), 50)
        assert near == pytest.approx(at, rel=1e-6)


def test_lossless_photons():
    nbar, m = 0.5, 40
    n = asymptotic_photons(discrete(0.0, nbar), m)
    expected = (2 * nbar + 1) / 2 * math.exp(2 * MU12 * m * P12.period)
    assert n.value == pytest.approx(expected, rel=1e-13)
    assert n.log_value == pytest.approx(math.log(expected), rel=1e-14)


def test_photons_never_overflow_in_log():
    n = asymptotic_photons(discrete(0.01), 10**5)
    assert n.value == math.inf
    assert n.log_value == pytest.approx(2 * MU12 * 1e5 * P12.period + math.log(0.25), rel=1e-9)


def test_dominant_slope_is_two_mu():
    for gamma in (0.2 * MU12, 3 * MU12):
        p = discrete(gamma)
        a, b = asymptotic_photons(p, 400).log_value, asymptotic_photons(p, 500).log_value
        assert (b - a) / (100 * P12.period) == pytest.approx(2 * MU12, rel=1e-6)


def test_weak_loss_subdominant_term():
    T = P12.period
    weak, strong = discrete(0.5 * MU12), discrete(2 * MU12)
    assert weak.eta_minus < 0 < strong.eta_minus
    assert math.exp(-2 * weak.eta_minus * 10 * T) > 1 > math.exp(-2 * strong.eta_minus * 10 * T)


def test_strong_losses_ring_diverges_classical_decays():
    gamma = 0.5 * MU12 + MU12
    p = discrete(gamma, 1.0)
    assert asymptotic_photons(p, 200).value > asymptotic_photons(p, 100).value
    seed = ClassicalSeed(3.0)
    assert classical_yield(seed, MU12, gamma, 200, P12.period) < classical_yield(seed, MU12, gamma, 100, P12.period)


def test_log_negativity_slope_and_nbar_shift():
    p0, p1 = discrete(0.05, 0.0), discrete(0.05, 0.5)
    a, b = asymptotic_log_negativity(p0, 300), asymptotic_log_negativity(p0, 400)
    assert (b - a) / (100 * P12.period) == pytest.approx(MU12 / math.log(2), rel=1e-6)
    assert asymptotic_log_negativity(p0, 300) - asymptotic_log_negativity(p1, 300) == pytest.approx(1.0, abs=1e-9)


def test_log_negativity_needs_losses():
    with pytest.raises(ArithmeticError):
        asymptotic_log_negativity(discrete(0.0), 10)
    lossless = lossless_log_negativity(discrete(0.0), 10)
    assert lossless == pytest.approx(2 * MU12 * 10 * P12.period / math.log(2))


def test_asymptotic_log_negativity_matches_long_run():
    p = TwoStepModulation.resonant(1.05)
    bath = BathSpec(0.05 / p.period, 0.5)
    tr = evolve_ring(thermal_state(0.5, 2), p, bath, 120 * p.period)
    params = AsymptoticParams.from_profile(p, bath)
    assert tr.e_n[-1] == pytest.approx(asymptotic_log_negativity(params, 120), abs=0.1)


def test_occurrence_time_clamps_and_is_monotone():
    assert occurrence_time(discrete(1e-9, 0.0)).t_occ == 0.0
    occ = [occurrence_time(discrete(2 * MU12, n)).t_occ for n in (0.0, 0.5, 1.0, 2.0, 5.0)]
    assert occ == sorted(occ) and occ[-1] > 0
    r = occurrence_time(discrete(2 * MU12, 1.0))
    assert r.t_occ == pytest.approx(r.m_occ * P12.period)


def test_occurrence_time_without_resonance():
    r = occurrence_time(AsymptoticParams(0.0, 0.1, 1.0, 2.0, SinusoidalDrive()))
    assert r.t_occ == math.inf and r.m_occ == math.inf


@given(
    nbar=st.floats(0, 5),
    dn=st.floats(0.01, 2),
    gT=st.floats(0.001, 0.5),
    dg=st.floats(0.01, 2),
)
def test_occurrence_monotone_grid(nbar, dn, gT, dg):
    T = P12.period
    base = occurrence_time(discrete(gT / T, nbar)).t_occ
    assert occurrence_time(discrete(gT / T, nbar + dn)).t_occ >= base
    assert occurrence_time(discrete(min(gT * (1 + dg), 0.5) / T, nbar)).t_occ >= base - 1e-12


def test_classical_yield():
    seed = ClassicalSeed(1.0)
    assert classical_yield(ClassicalSeed(0.0), 0.3, 0.1, 50, 2.0) == 0.0
    assert all(classical_yield(seed, 0.2, 0.2, m, 3.0) == 1.0 for m in range(10))
    assert classical_yield(seed, 0.3, 0.1, 2, 1.5) == pytest.approx(math.exp(2 * 0.2 * 3.0))
    with pytest.raises(ValueError):
        ClassicalSeed(-1.0)


def test_params_validation():
    with pytest.raises(ValueError):
        AsymptoticParams(-0.1, 0.0, 0.0, 1.0, SinusoidalDrive())
    with pytest.raises(ValueError):
        AsymptoticParams(0.1, 0.0, 0.0, 0.0, SinusoidalDrive())
    with pytest.raises(ValueError):
        f_factors(discrete(0.1), 0.5)
