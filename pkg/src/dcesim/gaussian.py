"""Gaussian states of one or two field modes.

Quadratures are ``x = (a + a^dag)/2`` and ``p = (a - a^dag)/(2i)``, laid out
per mode as ``[x_1, p_1, x_2, p_2]``. In this normalization the vacuum has
variance 1/4, a thermal mode ``(2 nbar + 1)/4``, and the uncertainty
principle reads: every symplectic eigenvalue is at least 1/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ORIGINAL = "original"
PRIMED = "primed"
VACUUM_VARIANCE = 0.25

# X' = MIXING @ X: sum and difference of the +j / -j quadratures
MIXING = np.block([[np.eye(2), np.eye(2)], [np.eye(2), -np.eye(2)]]) / math.sqrt(2.0)


class StateValidationError(ValueError):
    pass


def symplectic_form(modes: int) -> np.ndarray:
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _check_symmetric(cov: np.ndarray, rtol: float = 1e-12) -> None:
    scale = max(1.0, float(np.max(np.abs(cov))))
    if np.max(np.abs(cov - cov.T)) > rtol * scale:
        raise StateValidationError("covariance matrix is not symmetric")


@dataclass(frozen=True)
class GaussianState:
    """First and second moments of a 1- or 2-mode Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray
    basis: str = ORIGINAL

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        if cov.shape not in ((2, 2), (4, 4)) or mean.shape != (cov.shape[0],):
            raise StateValidationError(
                f"need a 2- or 4-dimensional state, got mean {mean.shape} and cov {cov.shape}"
            )
        if self.basis not in (ORIGINAL, PRIMED):
            raise StateValidationError(f"unknown basis {self.basis!r}")
        if self.basis == PRIMED and cov.shape != (4, 4):
            raise StateValidationError("the primed basis only exists for two modes")
        _check_symmetric(cov)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def modes(self) -> int:
        return self.cov.shape[0] // 2

    def to_primed(self) -> "GaussianState":
        if self.basis == PRIMED:
            return self
        return GaussianState(MIXING @ self.mean, MIXING @ self.cov @ MIXING.T, PRIMED)

    def to_original(self) -> "GaussianState":
        if self.basis == ORIGINAL:
            return self
        return GaussianState(MIXING @ self.mean, MIXING @ self.cov @ MIXING.T, ORIGINAL)

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.cov)

    def is_physical(self, tol: float = 1e-9) -> bool:
        return bool(symplectic_eigenvalues(self.cov)[0] >= VACUUM_VARIANCE - tol)


@dataclass(frozen=True)
class ThermalSpec:
    nbar: float = 0.0

    def __post_init__(self):
        if not self.nbar >= 0:
            raise ValueError("nbar must be non-negative")

    @property
    def variance(self) -> float:
        return (2 * self.nbar + 1) / 4

    def covariance(self, modes: int = 1) -> np.ndarray:
        return self.variance * np.eye(2 * modes)


def thermal_state(nbar: float, modes: int = 1, basis: str = ORIGINAL) -> GaussianState:
    """Zero-mean thermal state, ``(2 nbar + 1)/4`` times the identity.

    The isotropic covariance is unchanged by the sum/difference mixing, so
    the same matrix is returned for either basis tag.
    """
    if modes not in (1, 2):
        raise ValueError("modes must be 1 or 2")
    spec = ThermalSpec(nbar)
    return GaussianState(np.zeros(2 * modes), spec.covariance(modes), basis)


def nbar_from_temperature(omega: float, temperature: float) -> float:
    """Bose-Einstein occupation with ``k_B = 1``."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    if temperature < 0:
        raise ValueError("temperature must be non-negative")
    if temperature == 0:
        return 0.0
    return 1.0 / math.expm1(omega / temperature)


def photon_number(state: GaussianState) -> float:
    """``<N + 1>``: trace of the covariance plus the squared mean.

    For two modes this is ``sum_i <a_i^dag a_i + 1/2>``, so the two-mode
    vacuum gives 1 and a two-mode thermal state ``2 nbar + 1``.
    """
    return float(np.trace(state.cov) + state.mean @ state.mean)


def symplectic_eigenvalues(cov) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix, ascending.

    Raises StateValidationError for non-symmetric or non-positive-definite
    input.
    """
    cov = np.asarray(cov, dtype=float)
    n2 = cov.shape[0]
    if cov.ndim != 2 or cov.shape[1] != n2 or n2 % 2:
        raise StateValidationError(f"bad covariance shape {cov.shape}")
    _check_symmetric(cov)
    if n2 == 2:
        det = cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0]
        if cov[0, 0] <= 0 or det <= 0:
            raise StateValidationError("covariance matrix is not positive definite")
        return np.array([math.sqrt(det)])
    return _williamson_spectrum(cov)


def _williamson_spectrum(cov: np.ndarray) -> np.ndarray:
    # eigenvalues of the Hermitian i L^T Omega L come in +-nu pairs
    try:
        L = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise StateValidationError("covariance matrix is not positive definite") from None
    K = L.T @ symplectic_form(cov.shape[0] // 2) @ L
    ev = np.linalg.eigvalsh(1j * K)
    return np.sort(ev[ev.size // 2:])


def partial_transpose(cov) -> np.ndarray:
    """Mirror the second mode's momentum, ``p_2 -> -p_2``."""
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    return flip @ np.asarray(cov, dtype=float) @ flip


def log_negativity(state: GaussianState) -> float:
    """Logarithmic negativity in bits, ``max(0, -log2(4 nu))``.

    ``nu`` is the smallest symplectic eigenvalue of the partially transposed
    covariance; the factor 4 sets the separability threshold at the vacuum
    variance.
    """
    if state.modes != 2:
        raise ValueError("log negativity needs a two-mode state")
    cov = state.to_original().cov
    nu = float(_williamson_spectrum(partial_transpose(cov))[0])
    if nu <= 0:
        return math.inf
    return max(0.0, -math.log2(4 * nu))
