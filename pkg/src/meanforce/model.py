"""Model parameters, bath descriptions, and derived-quantity arithmetic.

Conventions used throughout the package: hbar = 1, spin length S0 = n/2 for
integer n >= 1, system level spacing omega_l > 0, coupling angle
theta in [0, pi/2].  Inverse temperature beta may be any nonnegative float,
including 0 (infinite temperature) and math.inf (T = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "LorentzianBath",
    "BareQBath",
    "BathSpec",
    "ModelParams",
    "TemperatureScale",
    "spin_length",
    "lorentzian_q",
    "zeta",
    "alpha_scaling",
    "j_eval",
    "beta_from_t_half",
    "t_half_from_beta",
    "beta_from_t_spin",
    "t_spin_from_beta",
]


def spin_length(n: int) -> float:
    """Spin length S0 = n/2 for integer n >= 1 (hbar = 1)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return n / 2.0


def lorentzian_q(a_lor: float, omega_0: float, gamma_w: float) -> float:
    """Reorganization energy Q = A/(2*omega_0^2) of a Lorentzian bath."""
    if a_lor < 0:
        raise ValueError("a_lor must be nonnegative")
    if omega_0 <= 0:
        raise ValueError("omega_0 must be positive")
    return a_lor / (2.0 * omega_0**2)


def zeta(q: float, s0: float, omega_l: float) -> float:
    """Dimensionless relative coupling zeta = Q*S0/omega_l."""
    if omega_l <= 0:
        raise ValueError("omega_l must be positive")
    return q * s0 / omega_l


def alpha_scaling(alpha: float, s0: float, omega_l: float = 1.0) -> float:
    """Reorganization energy Q = alpha*omega_l/S0 (spin-length scaling)."""
    return alpha * omega_l / s0


@dataclass(frozen=True)
class LorentzianBath:
    """Underdamped Lorentzian spectral density.

    J(w) = (A*Gamma/pi) * w / ((omega_0^2 - w^2)^2 + Gamma^2 w^2)
    """

    a_lor: float
    omega_0: float
    gamma_w: float

    def __post_init__(self):
        if self.a_lor < 0:
            raise ValueError("a_lor must be nonnegative")
        if self.omega_0 <= 0 or self.gamma_w <= 0:
            raise ValueError("omega_0 and gamma_w must be positive")

    @property
    def q(self) -> float:
        return lorentzian_q(self.a_lor, self.omega_0, self.gamma_w)

    def j(self, omega):
        w = np.asarray(omega, dtype=float)
        num = (self.a_lor * self.gamma_w / math.pi) * w
        den = (self.omega_0**2 - w**2) ** 2 + (self.gamma_w * w) ** 2
        out = num / den
        return float(out) if np.isscalar(omega) else out

    @classmethod
    def from_q(cls, q: float, omega_0: float, gamma_w: float) -> "LorentzianBath":
        """Bath with requested reorganization energy at the given peak shape."""
        return cls(a_lor=2.0 * q * omega_0**2, omega_0=omega_0, gamma_w=gamma_w)


@dataclass(frozen=True)
class BareQBath:
    """Bath described only by its reorganization energy Q.

    Sufficient for every classical solver; quantum solvers that need the
    spectral shape reject it.
    """

    q: float

    def __post_init__(self):
        if self.q < 0:
            raise ValueError("q must be nonnegative")


BathSpec = Union[LorentzianBath, BareQBath]


def j_eval(bath: BathSpec, omega: float):
    """Spectral density J(omega); raises for shape-less baths."""
    if isinstance(bath, BareQBath):
        raise ValueError("spectral shape unavailable for a bare-Q bath")
    return bath.j(omega)


@dataclass(frozen=True)
class ModelParams:
    """Full parameter record consumed by every solver.

    beta = math.inf is the T = 0 limit and legal everywhere; beta = 0 is the
    infinite-temperature limit.
    """

    n: int
    omega_l: float
    theta: float
    bath: BathSpec
    beta: float

    def __post_init__(self):
        if self.n < 1 or int(self.n) != self.n:
            raise ValueError("n must be a positive integer")
        if self.omega_l <= 0:
            raise ValueError("omega_l must be positive")
        if not 0.0 <= self.theta <= math.pi / 2:
            raise ValueError("theta must lie in [0, pi/2]")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative (inf allowed)")

    @property
    def s0(self) -> float:
        return spin_length(self.n)

    @property
    def dim(self) -> int:
        return self.n + 1

    @property
    def q(self) -> float:
        return self.bath.q

    @property
    def zeta(self) -> float:
        return zeta(self.q, self.s0, self.omega_l)

    @property
    def alpha(self) -> float:
        """Coupling number under the Q = alpha*omega_l/S0 convention."""
        return self.zeta

    def with_beta(self, beta: float) -> "ModelParams":
        return ModelParams(self.n, self.omega_l, self.theta, self.bath, beta)


def beta_from_t_half(t_half: float, omega_l: float = 1.0) -> float:
    """Inverse temperature from t_half = 2*kB*T/omega_l."""
    if t_half < 0:
        raise ValueError("t_half must be nonnegative")
    if t_half == 0.0:
        return math.inf
    return 2.0 / (t_half * omega_l)


def t_half_from_beta(beta: float, omega_l: float = 1.0) -> float:
    if beta == 0.0:
        return math.inf
    return 2.0 / (beta * omega_l)


def beta_from_t_spin(t_spin: float, n: int, omega_l: float = 1.0) -> float:
    """Inverse temperature from t_spin = kB*T/(S0*omega_l)."""
    if t_spin < 0:
        raise ValueError("t_spin must be nonnegative")
    if t_spin == 0.0:
        return math.inf
    return 1.0 / (t_spin * spin_length(n) * omega_l)


def t_spin_from_beta(beta: float, n: int, omega_l: float = 1.0) -> float:
    if beta == 0.0:
        return math.inf
    return 1.0 / (beta * spin_length(n) * omega_l)


@dataclass(frozen=True)
class TemperatureScale:
    """The two rescaled temperature axes used by the sweeps.

    t_half = 2*kB*T/omega_l and t_spin = kB*T/(S0*omega_l); the two satisfy
    t_half = n * t_spin.
    """

    t_half: float
    t_spin: float

    @classmethod
    def from_beta(cls, beta: float, n: int, omega_l: float = 1.0) -> "TemperatureScale":
        return cls(
            t_half=t_half_from_beta(beta, omega_l),
            t_spin=t_spin_from_beta(beta, n, omega_l),
        )
