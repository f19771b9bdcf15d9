"""Floquet analysis of the Hill equation ``y'' = -f(t)^2 y``.

The fundamental matrix acts on ``[y, y']``. Two-step drives are handled in
closed form (a product of constant-frequency segment matrices, continuous
``y`` and ``y'`` across the jumps); sinusoidal drives are integrated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .modulation import ModulationProfile, TwoStepModulation


# |Delta| within this of 1 is the marginal boundary, classified as bounded
MARGINAL_TOL = 1e-12


class IntegrationError(RuntimeError):
    """Adaptive integration could not meet the requested tolerance."""


@dataclass(frozen=True)
class MonodromyResult:
    S: np.ndarray
    Delta: float
    mu: float
    T: float

    @property
    def growth_per_period(self) -> float:
        """``mu T``, the log of the largest Floquet multiplier modulus."""
        return self.mu * self.T

    @property
    def stable(self) -> bool:
        return abs(self.Delta) <= 1.0


def segment_matrix(f: float, tau: float) -> np.ndarray:
    """Propagator of ``[y, y']`` over a stretch of constant frequency ``f``."""
    c, s = math.cos(f * tau), math.sin(f * tau)
    return np.array([[c, s / f], [-f * s, c]])


def _arccosh_stable(x: float) -> float:
    # log1p form keeps precision for x slightly above 1
    d = x - 1.0
    return math.log1p(d + math.sqrt(d * (x + 1.0)))


def lyapunov(Delta: float, T: float) -> float:
    """Lyapunov exponent per unit time from the half-trace discriminant.

    ``mu = arccosh(|Delta|) / T`` in the unstable region ``|Delta| > 1`` and
    zero otherwise. The absolute value covers the ``Delta < -1`` tongues,
    where the multipliers are negative.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    a = abs(Delta)
    if a <= 1.0:
        return 0.0
    return _arccosh_stable(a) / T


def twostep_discriminant(f_r, theta1, theta2):
    """Closed-form ``Delta = (1/2) Tr S(T)`` for a two-step drive.

    ``((1+f_r)^2 cos(theta1+theta2) - (1-f_r)^2 cos(theta1-theta2)) / (4 f_r)``.
    Accepts scalars or broadcastable arrays.
    """
    f_r = np.asarray(f_r, dtype=float)
    if np.any(f_r <= 0):
        raise ValueError("f_r must be positive")
    tp = np.asarray(theta1) + np.asarray(theta2)
    tm = np.asarray(theta1) - np.asarray(theta2)
    out = ((1 + f_r) ** 2 * np.cos(tp) - (1 - f_r) ** 2 * np.cos(tm)) / (4 * f_r)
    return float(out) if out.ndim == 0 else out


class HillFlow:
    """Fundamental matrix ``S(t)`` of the Hill equation for any ``t >= 0``.

    Uses periodicity, ``S(kT + s) = S(s) S(T)^k``, so only one period is ever
    integrated.
    """

    def __init__(self, profile: ModulationProfile, rtol: float = 1e-11, atol: float = 1e-13):
        self.profile = profile
        self.T = profile.period
        self._sol = None
        if isinstance(profile, TwoStepModulation):
            p = profile
            self._A1 = segment_matrix(p.f1, p.t1)
            self.period_matrix = segment_matrix(p.f2, p.t2) @ self._A1
        else:
            self._sol = _integrate_hill(profile, self.T, rtol, atol, dense=True)
            self.period_matrix = self._sol.sol(self.T).reshape(2, 2)

    def _within(self, s: float) -> np.ndarray:
        if self._sol is not None:
            return self._sol.sol(s).reshape(2, 2)
        p = self.profile
        if s < p.t1:
            return segment_matrix(p.f1, s)
        return segment_matrix(p.f2, s - p.t1) @ self._A1

    def __call__(self, t: float) -> np.ndarray:
        if t < 0:
            raise ValueError("t must be non-negative")
        T = self.T
        k = math.floor(t / T)
        s = t - k * T
        if s >= T * (1 - 1e-13):
            k, s = k + 1, 0.0
        if isinstance(self.profile, TwoStepModulation) and abs(s - self.profile.t1) < 1e-13 * T:
            s = self.profile.t1
        local = self._within(s) if s > 0 else np.eye(2)
        if k == 0:
            return local
        return local @ np.linalg.matrix_power(self.period_matrix, k)


def _integrate_hill(profile, t_end, rtol, atol, dense=False):
    def rhs(t, z):
        f2 = profile.frequency(t) ** 2
        # z = [y_a, y_b, y'_a, y'_b] laid out row-major as the 2x2 matrix [[y_a, y_b], [y'_a, y'_b]]
        return [z[2], z[3], -f2 * z[0], -f2 * z[1]]

    sol = solve_ivp(
        rhs, (0.0, t_end), [1.0, 0.0, 0.0, 1.0],
        method="DOP853", rtol=rtol, atol=atol, dense_output=dense,
    )
    if not sol.success:
        raise IntegrationError(f"Hill equation integration failed: {sol.message}")
    return sol


def monodromy(profile: ModulationProfile, rtol: float = 1e-11, atol: float = 1e-13) -> MonodromyResult:
    """One-period fundamental matrix, discriminant and Lyapunov exponent."""
    T = profile.period
    if isinstance(profile, TwoStepModulation):
        S = segment_matrix(profile.f2, profile.t2) @ segment_matrix(profile.f1, profile.t1)
    else:
        S = _integrate_hill(profile, T, rtol, atol).y[:, -1].reshape(2, 2)
    Delta = 0.5 * float(np.trace(S))
    return MonodromyResult(S, Delta, lyapunov(Delta, T), T)


@dataclass(frozen=True)
class StabilityMap:
    """Grid of discriminants for a two-step drive; axis 0 is ``theta1``."""

    f_r: float
    theta1: np.ndarray
    theta2: np.ndarray
    delta: np.ndarray
    mu: np.ndarray
    mu_T: np.ndarray

    @property
    def stable(self) -> np.ndarray:
        return np.abs(self.delta) <= 1.0 + MARGINAL_TOL

    @property
    def amplifying(self) -> np.ndarray:
        return ~self.stable

    def amplifying_fraction(self) -> float:
        return float(self.amplifying.mean())

    def rows(self):
        """Yield ``(theta1, theta2, delta, mu, stable)`` in row-major order."""
        stable = self.stable
        for i, a in enumerate(self.theta1):
            for j, b in enumerate(self.theta2):
                yield float(a), float(b), float(self.delta[i, j]), float(self.mu[i, j]), bool(stable[i, j])


def stability_map(f_r: float, theta1_grid, theta2_grid, f1: float = 1.0) -> StabilityMap:
    """Classify every ``(theta1, theta2)`` cell as bounded or amplifying.

    Cells with ``|Delta|`` within MARGINAL_TOL of 1 sit on a tongue boundary
    and count as bounded, so roundoff cannot flip them.

    ``mu`` is per unit time with ``T = theta1/f1 + theta2/(f_r f1)``;
    ``mu_T`` is the per-period growth, independent of ``f1``.
    """
    th1 = np.asarray(theta1_grid, dtype=float)
    th2 = np.asarray(theta2_grid, dtype=float)
    if th1.ndim != 1 or th2.ndim != 1 or th1.size == 0 or th2.size == 0:
        raise ValueError("theta grids must be non-empty 1-D sequences")
    for g in (th1, th2):
        if g.size > 1 and not (np.all(np.diff(g) > 0) or np.all(np.diff(g) < 0)):
            raise ValueError("theta grids must be strictly monotone")
    A, B = np.meshgrid(th1, th2, indexing="ij")
    delta = twostep_discriminant(f_r, A, B)
    a = np.abs(delta)
    mu_T = np.where(a > 1.0 + MARGINAL_TOL, np.arccosh(np.maximum(a, 1.0)), 0.0)
    T = A / f1 + B / (f_r * f1)
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = np.where(T > 0, mu_T / np.where(T > 0, T, 1.0), 0.0)
    return StabilityMap(float(f_r), th1, th2, delta, mu, mu_T)
