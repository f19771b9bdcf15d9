"""Periodic refractive-index drives and the coefficient functions they induce.

Everything is in natural units of the vacuum mode frequency (hbar = 1,
k c = 1), so a mode in a medium of index ``n`` oscillates at ``f = 1/n``.
The squeeze rate is ``g = (1/2) d ln n / dt`` and ``G(t)`` is its running
integral, which for a periodic drive equals ``(1/2) ln(n(t) / n(0))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Union


class CoefficientSample(NamedTuple):
    """Instantaneous frequency ``f``, squeeze rate ``g`` and accumulated squeeze ``G``."""

    f: float
    g: float
    G: float


class Jump(NamedTuple):
    time: float
    dG: float
    f_before: float
    f_after: float


@dataclass(frozen=True)
class TwoStepModulation:
    """Index switched instantaneously between ``n1 = 1/f1`` and ``n2 = 1/f2``.

    The first segment (frequency ``f1``) occupies ``[kT, kT + t1)`` and the
    second ``[kT + t1, (k+1)T)``. Functions of time are right-continuous, so
    at ``t = kT`` the medium is already back at ``n1``.
    """

    f1: float
    f2: float
    t1: float
    t2: float

    def __post_init__(self):
        for name in ("f1", "f2", "t1", "t2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")

    @classmethod
    def from_phases(cls, f1: float, f2: float, theta1: float, theta2: float) -> "TwoStepModulation":
        """Build the drive from segment phases ``theta_i = f_i t_i``."""
        return cls(f1, f2, theta1 / f1, theta2 / f2)

    @classmethod
    def resonant(cls, f_r: float, f1: float = 1.0) -> "TwoStepModulation":
        """Maximum-amplification drive, both phases equal to pi/2."""
        return cls.from_phases(f1, f_r * f1, math.pi / 2, math.pi / 2)

    @property
    def period(self) -> float:
        return self.t1 + self.t2

    @property
    def ratio(self) -> float:
        return self.f2 / self.f1

    @property
    def theta1(self) -> float:
        return self.f1 * self.t1

    @property
    def theta2(self) -> float:
        return self.f2 * self.t2

    @property
    def n1(self) -> float:
        return 1.0 / self.f1

    @property
    def n2(self) -> float:
        return 1.0 / self.f2

    @property
    def f0(self) -> float:
        return self.f1

    def _locate(self, t: float) -> tuple[int, int]:
        """Return (period index, segment 0/1) with boundaries snapped to the right."""
        T = self.period
        tol = 1e-12 * max(T, abs(t))
        k = math.floor(t / T)
        r = t - k * T
        if r >= T - tol:
            k, r = k + 1, 0.0
        elif r < 0:
            r = 0.0
        return k, 0 if r < self.t1 - tol else 1

    def segment(self, t: float) -> int:
        return self._locate(t)[1]

    def index(self, t: float) -> float:
        return self.n1 if self.segment(t) == 0 else self.n2

    def frequency(self, t: float) -> float:
        return self.f1 if self.segment(t) == 0 else self.f2

    def accumulated_squeeze(self, t: float) -> float:
        return 0.5 * math.log(self.index(t) / self.n1)

    def jumps(self, t_start: float, t_end: float) -> list[Jump]:
        """Index jumps with ``t_start < time <= t_end``, in time order.

        ``dG = (1/2) ln(n_after / n_before)`` is the squeeze increment carried
        by the delta-function in ``g`` at that instant.
        """
        T = self.period
        tol = 1e-12 * max(T, abs(t_end))
        up = 0.5 * math.log(self.n2 / self.n1)
        out = []
        k = max(0, math.floor(t_start / T) - 1)
        while True:
            a = k * T + self.t1
            b = (k + 1) * T
            if a > t_end + tol:
                break
            if a > t_start + tol:
                out.append(Jump(a, up, self.f1, self.f2))
            if t_start + tol < b <= t_end + tol:
                out.append(Jump(b, -up, self.f2, self.f1))
            k += 1
        return out

    def boundaries(self, t_end: float) -> list[float]:
        return [j.time for j in self.jumps(0.0, t_end)]


@dataclass(frozen=True)
class SinusoidalModulation:
    """``n(t) = n0 + dn sin(Omega t)`` with a small relative depth ``dn/n0``."""

    n0: float
    dn: float
    Omega: float
    max_relative_depth: float = 0.1

    def __post_init__(self):
        if not (self.n0 > 0 and math.isfinite(self.n0)):
            raise ValueError(f"n0 must be positive, got {self.n0!r}")
        if not (self.Omega > 0 and math.isfinite(self.Omega)):
            raise ValueError(f"Omega must be positive, got {self.Omega!r}")
        if not (0 <= self.dn < self.n0):
            raise ValueError(f"dn must satisfy 0 <= dn < n0, got {self.dn!r}")
        if self.dn / self.n0 > self.max_relative_depth:
            warnings.warn(
                f"dn/n0 = {self.dn / self.n0:.3g} exceeds {self.max_relative_depth}; "
                "small-modulation results (Mathieu reduction, asymptotics) lose accuracy",
                stacklevel=3,
            )

    @property
    def period(self) -> float:
        return 2 * math.pi / self.Omega

    @property
    def f0(self) -> float:
        return 1.0 / self.n0

    def index(self, t: float) -> float:
        return self.n0 + self.dn * math.sin(self.Omega * t)

    def frequency(self, t: float) -> float:
        return 1.0 / self.index(t)

    def squeeze_rate(self, t: float) -> float:
        return 0.5 * self.dn * self.Omega * math.cos(self.Omega * t) / self.index(t)

    def accumulated_squeeze(self, t: float) -> float:
        return 0.5 * math.log(self.index(t) / self.n0)

    def jumps(self, t_start: float, t_end: float) -> list[Jump]:
        return []

    def boundaries(self, t_end: float) -> list[float]:
        return []


ModulationProfile = Union[TwoStepModulation, SinusoidalModulation]


def coefficients_at(profile: ModulationProfile, t: float) -> CoefficientSample:
    """Sample ``f``, ``g`` and ``G`` at time ``t >= 0``.

    For a two-step drive ``g`` is zero between jumps; the jumps themselves are
    listed by ``profile.jumps`` and already included in ``G``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if isinstance(profile, TwoStepModulation):
        return CoefficientSample(profile.frequency(t), 0.0, profile.accumulated_squeeze(t))
    return CoefficientSample(
        profile.frequency(t), profile.squeeze_rate(t), profile.accumulated_squeeze(t)
    )


def mathieu_parameters(profile: SinusoidalModulation) -> tuple[float, float]:
    """Return ``(delta, epsilon)`` of the equivalent Mathieu equation.

    In the rescaled time ``Omega t / 2`` the mode obeys
    ``y'' + (delta + epsilon sin 2t) y = 0`` with ``delta = 4/(n0 Omega)^2``
    and ``epsilon = -8 dn / (n0^3 Omega^2)``. Resonance tongues sit at
    ``delta = m^2``.
    """
    n0, dn, W = profile.n0, profile.dn, profile.Omega
    return 4.0 / (n0**2 * W**2), -8.0 * dn / (n0**3 * W**2)
