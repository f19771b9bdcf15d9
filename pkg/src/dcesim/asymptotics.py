"""Long-time closed forms for resonant drives.

With ``eta_plus = gamma + mu`` and ``eta_minus = gamma - mu``, at ``t = mT``

    <N + 1>  ->  c' [exp(2 mu mT) + exp(-2 eta_minus mT) + F_minus(m) + F_plus(m)]
    E_N      ->  max(0, mu mT / ln 2 - log2((2 nbar + 1) sqrt(F_plus(m))))

with ``c' = (2 nbar + 1)/4``. The first exponential is carried by the
decoherence-free block and grows at ``2 mu`` whatever the losses; the second
and ``F_minus`` belong to the bath-coupled block (growing at ``2(mu - gamma)``
only for weak losses, ``eta_minus < 0``). ``F_plus`` saturates, so the
entanglement always turns on after a finite occurrence time.

For the two-step drive these expressions are exact at the period marks up to
the dropped ``exp(-2 mu mT)`` and ``exp(-2 eta_plus mT)`` terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

_SMALL = 1e-8


@dataclass(frozen=True)
class DiscreteDrive:
    t1: float
    t2: float
    f_r: float


@dataclass(frozen=True)
class SinusoidalDrive:
    pass


Drive = Union[DiscreteDrive, SinusoidalDrive]


@dataclass(frozen=True)
class AsymptoticParams:
    mu: float
    gamma: float
    nbar: float
    T: float
    drive: Drive

    def __post_init__(self):
        if self.mu < 0 or self.gamma < 0 or self.nbar < 0:
            raise ValueError("mu, gamma and nbar must be non-negative")
        if self.T <= 0:
            raise ValueError("T must be positive")

    @property
    def eta_plus(self) -> float:
        return self.gamma + self.mu

    @property
    def eta_minus(self) -> float:
        return self.gamma - self.mu

    @classmethod
    def from_profile(cls, profile, bath, mu: float | None = None) -> "AsymptoticParams":
        """Parameters for a modulation profile and bath; ``mu`` defaults to the Floquet value."""
        from .floquet import monodromy
        from .modulation import TwoStepModulation

        if mu is None:
            mu = monodromy(profile).mu
        if isinstance(profile, TwoStepModulation):
            drive = DiscreteDrive(profile.t1, profile.t2, profile.ratio)
        else:
            drive = SinusoidalDrive()
        return cls(mu, bath.gamma, bath.nbar, profile.period, drive)


def _log_abs_expm1(z: float) -> float:
    if z == 0:
        return -math.inf
    if z > 30:
        return z + math.log1p(-math.exp(-z))
    return math.log(abs(math.expm1(z)))


def _log_geometric(eta: float, T: float, m: float) -> tuple[float, float]:
    """``(1 - exp(-2 eta m T)) / (1 - exp(2 eta T))`` as (log|value|, sign).

    Tends to ``-m`` as ``eta -> 0``.
    """
    x = 2 * eta * T
    if x == 0:
        return math.log(m), -1.0
    num = _log_abs_expm1(-x * m)
    if abs(x) < _SMALL:
        den = math.log(abs(x)) + math.log1p(x / 2)
    else:
        den = _log_abs_expm1(x)
    # the ratio is negative for either sign of x
    return num - den, -1.0


def _log_abs_expm1_over(x: float, a: float) -> float:
    """log|(1 - exp(a x)) / x|, with the x -> 0 limit log|a|."""
    if abs(a * x) < _SMALL:
        return math.log(abs(a)) + math.log1p(a * x / 2)
    return _log_abs_expm1(a * x) - math.log(abs(x))


def _log_f_factors(params: AsymptoticParams, m: float) -> tuple[float, float]:
    """Natural logs of (F_plus, F_minus); -inf where the factor vanishes."""
    if m < 1:
        raise ValueError("m must be >= 1")
    g = params.gamma
    if g == 0:
        return -math.inf, -math.inf
    T = params.T
    out = []
    for sign in (+1, -1):
        eta, eta_other = (params.eta_plus, params.eta_minus) if sign > 0 else (params.eta_minus, params.eta_plus)
        log_geo, s_geo = _log_geometric(eta, T, m)
        if isinstance(params.drive, DiscreteDrive):
            d = params.drive
            k = 2 * g
            bracket = -math.expm1(k * d.t1) - math.exp(k * d.t1) * math.expm1(k * d.t2) * d.f_r**sign
            if bracket == 0:
                out.append(-math.inf)
                continue
            value_sign = s_geo * math.copysign(1.0, bracket)
            log_val = log_geo + math.log(abs(bracket))
        else:
            # 2 gamma (1 - e^{2 eta' T}) / eta' with eta' the opposite rate
            log_pref = math.log(2 * g) + _log_abs_expm1_over(eta_other, 2 * T)
            value_sign = s_geo * -1.0
            log_val = log_geo + log_pref
        if value_sign < 0:
            raise ArithmeticError("F factor came out negative; drive parameters are inconsistent with mu")
        out.append(log_val)
    return out[0], out[1]


def _exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


def f_factors(params: AsymptoticParams, m: float) -> tuple[float, float]:
    """``(F_plus(m), F_minus(m))`` for the discrete or sinusoidal drive.

    Discrete::

        F(m) = [1 - e^{-2 eta m T}] [1 - e^{2 gamma t1} + e^{2 gamma t1}(1 - e^{2 gamma t2}) f_r^{+-1}]
               / [1 - e^{2 eta T}]

    Sinusoidal::

        F(m) = 2 gamma (1 - e^{2 eta' T}) (1 - e^{-2 eta m T}) / [eta' (1 - e^{2 eta T})]

    with ``eta = eta_plus, eta' = eta_minus`` for ``F_plus`` and the other
    way round for ``F_minus``. Vanishing denominators are replaced by their
    series limits.
    """
    lp, lm = _log_f_factors(params, m)
    return _exp(lp), _exp(lm)


def f_plus_limit(params: AsymptoticParams) -> float:
    """``F_plus(m -> infinity)``."""
    if params.gamma == 0:
        return 0.0
    if params.eta_plus <= 0:
        raise ArithmeticError("F_plus has no finite limit without damping or growth")
    T, g = params.T, params.gamma
    den = -math.expm1(2 * params.eta_plus * T)
    if isinstance(params.drive, DiscreteDrive):
        d = params.drive
        k = 2 * g
        bracket = -math.expm1(k * d.t1) - math.exp(k * d.t1) * math.expm1(k * d.t2) * d.f_r
        return bracket / den
    return 2 * g * math.exp(_log_abs_expm1_over(params.eta_minus, 2 * T)) / -den


class PhotonCount(NamedTuple):
    """A photon count together with its natural log (the log never overflows)."""

    log_value: float
    value: float


def asymptotic_photons(params: AsymptoticParams, m: float) -> PhotonCount:
    """Four-term asymptotic ``<N + 1>`` at ``t = mT``, evaluated in log space."""
    T, mu = params.T, params.mu
    lp, lm = _log_f_factors(params, m)
    terms = np.array([2 * mu * m * T, -2 * params.eta_minus * m * T, lm, lp])
    top = terms.max()
    log_n = math.log((2 * params.nbar + 1) / 4) + top + math.log(np.exp(terms - top).sum())
    return PhotonCount(log_n, _exp(log_n))


def asymptotic_log_negativity(params: AsymptoticParams, m: float) -> float:
    """Asymptotic ``E_N`` in bits; needs ``gamma > 0`` so that ``F_plus > 0``."""
    lp, _ = _log_f_factors(params, m)
    if not math.isfinite(lp):
        raise ArithmeticError("F_plus must be positive (gamma > 0); use the pure-state formula for gamma = 0")
    bits = params.mu * m * params.T / math.log(2) - (math.log2(2 * params.nbar + 1) + 0.5 * lp / math.log(2))
    return max(0.0, bits)


class OccurrenceTime(NamedTuple):
    t_occ: float
    m_occ: float


def occurrence_time(params: AsymptoticParams) -> OccurrenceTime:
    """Time after which the asymptotic ``E_N`` turns positive.

    ``m_occ = ln((2 nbar + 1) sqrt(F_plus(inf))) / (mu T)`` periods, clamped
    at zero, and ``t_occ = m_occ T``. Without resonance (``mu = 0``) the
    entanglement never appears and both fields are ``inf``.
    """
    if params.mu == 0:
        return OccurrenceTime(math.inf, math.inf)
    F = f_plus_limit(params)
    if F <= 0:
        return OccurrenceTime(0.0, 0.0)
    m = (math.log(2 * params.nbar + 1) + 0.5 * math.log(F)) / (params.mu * params.T)
    m = max(0.0, m)
    return OccurrenceTime(m * params.T, m)


@dataclass(frozen=True)
class ClassicalSeed:
    """Initial field energy of the classical model, in photon units."""

    seed_photons: float

    def __post_init__(self):
        if self.seed_photons < 0:
            raise ValueError("seed_photons must be non-negative")


def classical_yield(seed: ClassicalSeed, mu: float, gamma: float, m: float, T: float) -> float:
    """Classical photon count ``seed * exp(2 (mu - gamma) m T)``; no seed, no photons."""
    if seed.seed_photons == 0:
        return 0.0
    return seed.seed_photons * _exp(2 * (mu - gamma) * m * T)


def lossless_log_negativity(params: AsymptoticParams, m: float) -> float:
    """``E_N`` without losses: ``max(0, 2 mu mT / ln 2 - log2(2 nbar + 1))``.

    With ``gamma = 0`` both blocks are squeezed by ``exp(mu mT)`` and the
    partially transposed state reaches ``nu = (2 nbar + 1) exp(-2 mu mT) / 4``.
    """
    bits = 2 * params.mu * m * params.T / math.log(2) - math.log2(2 * params.nbar + 1)
    return max(0.0, bits)
