"""Open-system evolution of the modulated cavity field.

Moment equations
----------------
Quadrature means and covariances evolve as

    dX/dt     = (A - gamma a) X
    dsigma/dt = (A - gamma a) sigma + sigma (A - gamma a)^T + 2 gamma a sigma_inf a

where ``A`` is the lossless generator and ``a`` projects onto the
bath-coupled degree of freedom. For the ring cavity the equations are
written for the sum/difference quadratures ``X' = Gamma X``; there
``A = -M4^T`` is block diagonal, its upper (sum) block is coupled to the
bath and its lower (difference) block is decoherence free. The linear cavity
is a single bath-coupled block with the same generator as the ring's sum
block.

``gamma`` is the amplitude decay rate: the mean of the coupled mode decays as
``exp(-gamma t)`` and its covariance relaxes to ``sigma_inf`` as
``exp(-2 gamma t)``.

Two solution routes are provided. ``evolve_linear`` / ``evolve_ring``
integrate the equations with an adaptive Runge-Kutta method (index jumps of
a two-step drive are applied as exact squeeze congruences), and
``closed_form_propagator`` assembles the solution from the Hill fundamental
matrix plus a quadrature for the bath-driven part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad_vec, solve_ivp

from .floquet import HillFlow, IntegrationError
from .gaussian import (
    MIXING,
    ORIGINAL,
    PRIMED,
    VACUUM_VARIANCE,
    GaussianState,
    StateValidationError,
    log_negativity,
    symplectic_eigenvalues,
)
from .modulation import ModulationProfile, TwoStepModulation, coefficients_at

LINEAR = "linear"
RING = "ring"

SIGMA_Z = np.diag([1.0, -1.0])
ALPHA_PRIME = np.diag([1.0, 1.0, 0.0, 0.0])

DEFAULT_RTOL = 1e-11
DEFAULT_ATOL = 1e-13


class UncertaintyViolation(RuntimeError):
    """An evolved covariance dropped below the vacuum bound."""


@dataclass(frozen=True)
class BathSpec:
    """Markovian bath: amplitude decay rate ``gamma`` and occupation ``nbar``."""

    gamma: float = 0.0
    nbar: float = 0.0

    def __post_init__(self):
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be finite and non-negative, got {self.gamma!r}")
        if not (self.nbar >= 0 and math.isfinite(self.nbar)):
            raise ValueError(f"nbar must be finite and non-negative, got {self.nbar!r}")

    @property
    def variance(self) -> float:
        return (2 * self.nbar + 1) / 4


@dataclass(frozen=True)
class DriftMatrices:
    M2: np.ndarray
    M4: np.ndarray
    Gamma: np.ndarray
    alpha_prime: np.ndarray

    @property
    def ring_generator(self) -> np.ndarray:
        """Lossless generator ``-M4^T`` of the primed quadratures."""
        return -self.M4.T

    @property
    def linear_generator(self) -> np.ndarray:
        return -self.M4.T[:2, :2]


def drift_matrices(f: float, g: float) -> DriftMatrices:
    M2 = 2.0 * np.array([[-g, f], [-f, g]])
    Z = np.zeros((2, 2))
    M4 = 0.5 * np.block([[M2, Z], [Z, -M2.T]])
    return DriftMatrices(M2, M4, MIXING.copy(), ALPHA_PRIME.copy())


def _plus_generator(f, g):
    return np.array([[g, f], [-f, -g]])


def _minus_generator(f, g):
    return np.array([[-g, f], [-f, g]])


def squeeze_matrix(G: float) -> np.ndarray:
    """``exp(G Sigma)`` with ``Sigma = diag(1, -1)``."""
    return np.diag([math.exp(G), math.exp(-G)])


class _Model:
    """Per-cavity constants: dimension, bath projector, jump signs."""

    def __init__(self, cavity: str, bath: BathSpec):
        if cavity not in (LINEAR, RING):
            raise ValueError(f"cavity must be 'linear' or 'ring', got {cavity!r}")
        self.cavity = cavity
        self.bath = bath
        self.dim = 2 if cavity == LINEAR else 4
        self.alpha = np.eye(2) if cavity == LINEAR else ALPHA_PRIME
        self.source = 2 * bath.gamma * bath.variance * self.alpha

    def generator(self, f, g):
        if self.cavity == LINEAR:
            A = _plus_generator(f, g)
        else:
            A = np.zeros((4, 4))
            A[:2, :2] = _plus_generator(f, g)
            A[2:, 2:] = _minus_generator(f, g)
        return A - self.bath.gamma * self.alpha

    def jump(self, dG):
        if self.cavity == LINEAR:
            return squeeze_matrix(dG)
        J = np.zeros((4, 4))
        J[:2, :2] = squeeze_matrix(dG)
        J[2:, 2:] = squeeze_matrix(-dG)
        return J


def snapshot_times(profile: ModulationProfile, t_end: float, interval: float | None = None) -> np.ndarray:
    """Snapshot grid: every period multiple ``mT <= t_end``, plus a regular grid.

    Times closer than ``1e-9 T`` are merged, keeping the exact period mark.
    """
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    T = profile.period
    marks = T * np.arange(0, math.floor(t_end / T * (1 + 1e-12)) + 1)
    pts = [marks]
    if interval is not None:
        if interval <= 0:
            raise ValueError("snapshot interval must be positive")
        pts.append(interval * np.arange(0, math.floor(t_end / interval * (1 + 1e-12)) + 1))
    pts.append(np.array([t_end]))
    allt = np.concatenate(pts)
    is_mark = np.concatenate([np.ones(marks.size, bool)] + [np.zeros(p.size, bool) for p in pts[1:]])
    order = np.lexsort((~is_mark, allt))
    allt, is_mark = allt[order], is_mark[order]
    out = []
    tol = 1e-9 * T
    for t, mark in zip(allt, is_mark):
        if out and t - out[-1] <= tol:
            continue
        out.append(t)
    return np.array(out)


class _PropagatorIntegrator:
    """Integrates the damped propagator Phi and the bath-driven covariance.

    The state at time t is ``(Phi m0, Phi sigma0 Phi^T + sigma_p)``; working
    with Phi instead of sigma keeps the symplectic spectrum of the lossless
    block accurate to O(rtol |Phi|^2) rather than O(rtol |Phi|^4).
    """

    def __init__(self, model: _Model, profile: ModulationProfile, rtol: float, atol: float):
        self.model = model
        self.profile = profile
        self.rtol = rtol
        self.atol = atol
        d = model.dim
        self.Phi = np.eye(d)
        self.Sp = np.zeros((d, d))
        self.t = 0.0

    def _rhs_factory(self, f_const=None):
        m, d, prof = self.model, self.model.dim, self.profile
        dd = d * d
        A_const = None if f_const is None else m.generator(f_const, 0.0)

        def rhs(t, y):
            if A_const is None:
                s = coefficients_at(prof, t)
                A = m.generator(s.f, s.g)
            else:
                A = A_const
            P = y[:dd].reshape(d, d)
            S = y[dd:].reshape(d, d)
            AS = A @ S
            return np.concatenate([(A @ P).ravel(), (AS + AS.T + m.source).ravel()])

        return rhs

    def advance(self, t_next: float) -> None:
        if t_next <= self.t:
            return
        if isinstance(self.profile, TwoStepModulation):
            rhs = self._rhs_factory(self.profile.frequency(0.5 * (self.t + t_next)))
        else:
            rhs = self._rhs_factory()
        y0 = np.concatenate([self.Phi.ravel(), self.Sp.ravel()])
        sol = solve_ivp(rhs, (self.t, t_next), y0, method="DOP853", rtol=self.rtol, atol=self.atol)
        if not sol.success:
            raise IntegrationError(f"moment integration failed at t={self.t:.6g}: {sol.message}")
        d = self.model.dim
        y = sol.y[:, -1]
        self.Phi = y[: d * d].reshape(d, d)
        self.Sp = y[d * d:].reshape(d, d)
        self.t = t_next

    def apply_jump(self, dG: float) -> None:
        J = self.model.jump(dG)
        self.Phi = J @ self.Phi
        self.Sp = J @ self.Sp @ J.T

    def moments(self, mean0, cov0):
        cov = self.Phi @ cov0 @ self.Phi.T + self.Sp
        return self.Phi @ mean0, 0.5 * (cov + cov.T)


def _uncertainty_allowance(cov: np.ndarray, rtol: float) -> float:
    # resolution of the smallest symplectic eigenvalue on a strongly squeezed state
    scale = float(np.max(np.abs(cov)))
    return 64 * (max(rtol, 1e-16) * scale + 2.3e-16 * scale**2 / VACUUM_VARIANCE)


def _evolve(state, profile, bath, t_end, cavity, snapshot_interval, rtol, atol, uncertainty_tol):
    model = _Model(cavity, bath)
    if cavity == RING:
        if state.modes != 2:
            raise ValueError("evolve_ring needs a two-mode state")
        start = state.to_primed()
    else:
        if state.modes != 1:
            raise ValueError("evolve_linear needs a single-mode state")
        start = state
    mean0, cov0 = start.mean, start.cov

    times = snapshot_times(profile, t_end, snapshot_interval)
    jumps = profile.jumps(0.0, t_end)
    tol = 1e-9 * profile.period
    events = [(j.time, 0, j.dG) for j in jumps] + [(t, 1, 0.0) for t in times]
    events.sort(key=lambda e: (e[0], e[1]))

    integ = _PropagatorIntegrator(model, profile, rtol, atol)
    means, covs = [], []
    for t, kind, dG in events:
        if t - integ.t > tol:
            integ.advance(t)
        if kind == 0:
            integ.apply_jump(dG)
            continue
        m, c = integ.moments(mean0, cov0)
        if cavity == RING:
            m, c = MIXING @ m, MIXING @ c @ MIXING.T
            c = 0.5 * (c + c.T)
        try:
            nu = symplectic_eigenvalues(c)[0]
        except StateValidationError:
            raise UncertaintyViolation(
                f"covariance lost positive definiteness at t={t:.6g} (largest entry {np.max(np.abs(c)):.3g}); "
                "the squeeze exceeds what double precision resolves, shorten the run or lower the contrast"
            ) from None
        if nu < VACUUM_VARIANCE - (uncertainty_tol + _uncertainty_allowance(c, rtol)):
            raise UncertaintyViolation(
                f"smallest symplectic eigenvalue {nu:.12g} < 1/4 at t={t:.6g} "
                f"({cavity} cavity, gamma={bath.gamma}, nbar={bath.nbar})"
            )
        means.append(m)
        covs.append(c)
    return EvolutionTrace(cavity, times, np.array(means), np.array(covs), profile.period)


def evolve_linear(
    state: GaussianState,
    profile: ModulationProfile,
    bath: BathSpec,
    t_end: float,
    *,
    snapshot_interval: float | None = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    uncertainty_tol: float = 1e-9,
) -> "EvolutionTrace":
    """Evolve a single cavity mode coupled to the bath.

    Snapshots are taken at every period multiple and, if given, every
    ``snapshot_interval``. At a jump instant the snapshot is taken after the
    jump.
    """
    return _evolve(state, profile, bath, t_end, LINEAR, snapshot_interval, rtol, atol, uncertainty_tol)


def evolve_ring(
    state: GaussianState,
    profile: ModulationProfile,
    bath: BathSpec,
    t_end: float,
    *,
    snapshot_interval: float | None = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    uncertainty_tol: float = 1e-9,
) -> "EvolutionTrace":
    """Evolve the counter-propagating ``+j/-j`` pair of a ring cavity.

    The integration runs in the primed basis; snapshots are reported in the
    original ``[x_j, p_j, x_-j, p_-j]`` basis.
    """
    return _evolve(state, profile, bath, t_end, RING, snapshot_interval, rtol, atol, uncertainty_tol)


@dataclass
class EvolutionTrace:
    """Snapshots of an evolution, original basis, with derived observables."""

    cavity: str
    times: np.ndarray
    means: np.ndarray
    covs: np.ndarray
    period: float

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> GaussianState:
        return GaussianState(self.means[i], self.covs[i], ORIGINAL)

    def states(self):
        return [self.state(i) for i in range(len(self))]

    @cached_property
    def trace_sigma(self) -> np.ndarray:
        return np.trace(self.covs, axis1=1, axis2=2)

    @cached_property
    def n_mean(self) -> np.ndarray:
        """``<N + 1>`` at each snapshot."""
        return self.trace_sigma + np.einsum("ki,ki->k", self.means, self.means)

    @cached_property
    def e_n(self) -> np.ndarray:
        if self.cavity != RING:
            return np.full(len(self), np.nan)
        return np.array([log_negativity(s) for s in self.states()])

    @cached_property
    def nu_min(self) -> np.ndarray:
        return np.array([symplectic_eigenvalues(c)[0] for c in self.covs])

    @cached_property
    def nu_dfs(self) -> np.ndarray:
        """Symplectic eigenvalue of the decoherence-free (difference) block."""
        if self.cavity != RING:
            return np.full(len(self), np.nan)
        return np.array([symplectic_eigenvalues(dfs_decompose(s).minus_cov)[0] for s in self.states()])

    def period_marks(self) -> np.ndarray:
        """Indices of snapshots at exact multiples of the period."""
        m = self.times / self.period
        return np.flatnonzero(np.abs(m - np.round(m)) < 1e-9)

    def tail_slope(self, quantity: str = "n_mean", fraction: float = 0.25) -> float:
        """Least-squares slope of ``log(quantity)`` versus t over the last period marks."""
        idx = self.period_marks()
        k = max(2, int(math.ceil(fraction * idx.size)))
        idx = idx[-k:]
        y = np.log(getattr(self, quantity)[idx])
        return float(np.polyfit(self.times[idx], y, 1)[0])


class DFSBlocks(NamedTuple):
    plus_cov: np.ndarray
    plus_mean: np.ndarray
    minus_cov: np.ndarray
    minus_mean: np.ndarray
    cross_cov: np.ndarray


def dfs_decompose(state: GaussianState) -> DFSBlocks:
    """Split a two-mode state into the bath-coupled sum block and the DFS difference block."""
    if state.modes != 2:
        raise ValueError("dfs_decompose needs a two-mode state")
    p = state.to_primed()
    return DFSBlocks(p.cov[:2, :2].copy(), p.mean[:2].copy(), p.cov[2:, 2:].copy(), p.mean[2:].copy(), p.cov[:2, 2:].copy())


@dataclass(frozen=True)
class ClosedFormPropagator:
    """Solution assembled from the Hill fundamental matrix.

    ``U_plus = exp(G Sigma) R_plus^-1 S R_plus`` and
    ``U_minus = exp(-G Sigma) R_minus^-1 S R_minus`` are the lossless
    propagators of the sum and difference blocks, ``U_th`` adds the bath
    damping, and ``sigma_p`` is the bath-driven covariance (sum block only).
    Matrices are in the primed basis (ring) or the mode basis (linear).
    """

    t: float
    cavity: str
    U: np.ndarray
    U_th: np.ndarray
    sigma_p: np.ndarray
    G: float
    S: np.ndarray
    R_plus: np.ndarray
    R_minus: np.ndarray
    Sigma_diag: np.ndarray

    def propagate(self, state: GaussianState) -> GaussianState:
        if self.cavity == RING:
            p = state.to_primed()
            cov = self.U_th @ p.cov @ self.U_th.T + self.sigma_p
            return GaussianState(self.U_th @ p.mean, 0.5 * (cov + cov.T), PRIMED).to_original()
        cov = self.U_th @ state.cov @ self.U_th.T + self.sigma_p
        return GaussianState(self.U_th @ state.mean, 0.5 * (cov + cov.T), ORIGINAL)


def _hill_blocks(flow: HillFlow, profile, f0, t):
    S = flow(t)
    G = profile.accumulated_squeeze(t)
    Rp = np.array([[0.0, 1.0], [-f0, 0.0]])
    Rm = np.array([[1.0, 0.0], [0.0, f0]])
    Up = squeeze_matrix(G) @ np.linalg.solve(Rp, S @ Rp)
    Um = squeeze_matrix(-G) @ np.linalg.solve(Rm, S @ Rm)
    return S, G, Rp, Rm, Up, Um


def closed_form_propagator(
    profile: ModulationProfile,
    bath: BathSpec,
    t: float,
    *,
    cavity: str = RING,
    flow: HillFlow | None = None,
    epsabs: float = 1e-10,
    epsrel: float = 1e-12,
) -> ClosedFormPropagator:
    """Closed-form propagator up to time ``t``.

    The bath-driven part of the sum block is

        sigma_plus = 2 gamma c U_th(t) [int_0^t (U_th^T U_th)^-1 dtau] U_th(t)^T,

    with ``c = (2 nbar + 1)/4``, integrated by adaptive Gauss-Kronrod
    quadrature split at the index jumps.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if cavity not in (LINEAR, RING):
        raise ValueError(f"cavity must be 'linear' or 'ring', got {cavity!r}")
    flow = flow or HillFlow(profile)
    f0 = profile.f0
    gamma = bath.gamma
    S, G, Rp, Rm, Up, Um = _hill_blocks(flow, profile, f0, t)

    sig_plus = np.zeros((2, 2))
    if gamma > 0 and t > 0:
        def integrand(tau):
            U = math.exp(-gamma * tau) * _hill_blocks(flow, profile, f0, tau)[4]
            Ui = np.linalg.inv(U)
            return Ui @ Ui.T

        edges = [0.0] + [j.time for j in profile.jumps(0.0, t) if j.time < t] + [t]
        if not isinstance(profile, TwoStepModulation):
            T = profile.period
            edges = sorted(set([0.0, t] + [k * T for k in range(1, int(t / T) + 1) if k * T < t]))
        total = np.zeros((2, 2))
        for a, b in zip(edges[:-1], edges[1:]):
            if b - a <= 0:
                continue
            val, err = quad_vec(integrand, a, b, epsabs=epsabs, epsrel=epsrel, norm="max", limit=200)
            total += val
        Ut = math.exp(-gamma * t) * Up
        sig_plus = 2 * gamma * bath.variance * Ut @ total @ Ut.T
        sig_plus = 0.5 * (sig_plus + sig_plus.T)

    if cavity == LINEAR:
        U = Up
        U_th = math.exp(-gamma * t) * Up
        sigma_p = sig_plus
    else:
        U = np.zeros((4, 4))
        U[:2, :2], U[2:, 2:] = Up, Um
        U_th = U.copy()
        U_th[:2, :2] *= math.exp(-gamma * t)
        sigma_p = np.zeros((4, 4))
        sigma_p[:2, :2] = sig_plus
    return ClosedFormPropagator(t, cavity, U, U_th, sigma_p, G, S, Rp, Rm, SIGMA_Z.copy())
