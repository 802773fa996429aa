"""Parameter records, detuning grids and unit conventions.

Every physics module works in dimensionless units in which one reference
rate equals 1 (Gamma for the emitter and router modules, gamma for the
Rydberg module, J for the lattice).  Detunings are always measured from the
emitter transition, ``delta = v_g * k - omega_e``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

log = logging.getLogger(__name__)


class ParameterError(ValueError):
    """Raised when a parameter record or grid fails validation."""


def _check_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise ParameterError(f"{name} must be finite, got {value!r}")


def _check_nonnegative(**values: float) -> None:
    for name, value in values.items():
        if value < 0:
            raise ParameterError(f"{name} must be >= 0, got {value!r}")


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise ParameterError(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class EmitterParams:
    """Two-level emitter side-coupled to a waveguide with linear dispersion.

    Parameters
    ----------
    omega_e : float
        Transition frequency relative to the linearization point.
    gamma : float
        Loss rate into non-guided modes.
    Gamma : float
        Decay rate into the guided modes, ``V**2 / v_g``.
    v_g : float
        Group velocity.
    """

    omega_e: float = 0.0
    gamma: float = 0.0
    Gamma: float = 1.0
    v_g: float = 1.0

    def __post_init__(self) -> None:
        _check_finite(omega_e=self.omega_e, gamma=self.gamma, Gamma=self.Gamma, v_g=self.v_g)
        _check_nonnegative(gamma=self.gamma)
        _check_positive(Gamma=self.Gamma, v_g=self.v_g)

    @property
    def V(self) -> float:
        """Coupling amplitude, sqrt(Gamma * v_g)."""
        return math.sqrt(self.Gamma * self.v_g)

    @property
    def total_width(self) -> float:
        return self.gamma + self.Gamma

    @classmethod
    def from_coupling(cls, V: float, v_g: float = 1.0, omega_e: float = 0.0,
                      gamma: float = 0.0) -> "EmitterParams":
        _check_finite(V=V, v_g=v_g)
        _check_positive(v_g=v_g)
        return cls(omega_e=omega_e, gamma=gamma, Gamma=V * V / v_g, v_g=v_g)

    def detuning(self, k):
        """Probe detuning ``v_g k - omega_e`` for wavevector(s) ``k``."""
        return self.v_g * np.asarray(k, dtype=float) - self.omega_e

    def wavevector(self, delta):
        """Inverse of :meth:`detuning`."""
        return (np.asarray(delta, dtype=float) + self.omega_e) / self.v_g


@dataclass(frozen=True)
class ThreeLevelParams:
    """Driven three-level emitter: probe on |g>-|e>, control on |e>-|s>."""

    base: EmitterParams = field(default_factory=EmitterParams)
    gamma_s: float = 0.0
    Omega_c: float = 0.0
    Delta_c: float = 0.0

    def __post_init__(self) -> None:
        _check_finite(gamma_s=self.gamma_s, Omega_c=self.Omega_c, Delta_c=self.Delta_c)
        _check_nonnegative(gamma_s=self.gamma_s, Omega_c=self.Omega_c)

    def raman_detuning(self, delta):
        return np.asarray(delta, dtype=float) - self.Delta_c


@dataclass(frozen=True)
class DetuningGrid:
    """Strictly increasing, finite probe detunings."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float).ravel()
        if arr.size < 1:
            raise ParameterError("detuning grid is empty")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("detuning grid contains non-finite values")
        if arr.size > 1 and not np.all(np.diff(arr) > 0):
            raise ParameterError("detuning grid must be strictly increasing")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    def __iter__(self):
        return iter(self.values)


def make_grid(min: float, max: float, n: int) -> DetuningGrid:
    """Uniform grid of ``n`` detunings from ``min`` to ``max`` inclusive."""
    lo, hi = float(min), float(max)
    _check_finite(min=lo, max=hi)
    if int(n) != n or n < 2:
        raise ParameterError(f"grid needs n >= 2 points, got {n!r}")
    if not lo < hi:
        raise ParameterError(f"grid needs min < max, got [{lo}, {hi}]")
    return DetuningGrid(np.linspace(lo, hi, int(n)))


@dataclass(frozen=True)
class CoherentInput:
    """Gaussian coherent-state wavepacket, ``alpha(k)`` with mean ``k0`` and width ``Delta_k``.

    The few-photon formulas truncate at two photons, so ``n_bar > 1`` is
    rejected unless ``allow_high_intensity`` is set (a warning is logged).
    """

    k0: float
    Delta_k: float
    n_bar: float = 1.0
    allow_high_intensity: bool = False

    def __post_init__(self) -> None:
        _check_finite(k0=self.k0, Delta_k=self.Delta_k, n_bar=self.n_bar)
        _check_positive(Delta_k=self.Delta_k, n_bar=self.n_bar)
        if self.n_bar > 1:
            if not self.allow_high_intensity:
                raise ParameterError(
                    f"n_bar={self.n_bar} > 1: the two-photon truncation is only valid for n_bar <= 1 "
                    "(set allow_high_intensity=True to override)")
            log.warning("n_bar=%g > 1: contributions of three or more photons are neglected", self.n_bar)

    def amplitude(self, k):
        """alpha(k) = sqrt(n_bar) (2 pi Delta_k^2)^(-1/4) exp(-(k-k0)^2 / (4 Delta_k^2))."""
        k = np.asarray(k, dtype=float)
        norm = math.sqrt(self.n_bar) / (2.0 * math.pi * self.Delta_k ** 2) ** 0.25
        return norm * np.exp(-((k - self.k0) ** 2) / (4.0 * self.Delta_k ** 2))

    def support(self, n_sigma: float = 12.0) -> tuple[float, float]:
        return self.k0 - n_sigma * self.Delta_k, self.k0 + n_sigma * self.Delta_k


@dataclass(frozen=True)
class Units:
    """A dimensionless unit system: one reference rate and one reference length.

    ``to_dimensionless`` divides by the reference scale raised to the
    quantity's dimension; ``from_dimensionless`` multiplies it back.
    """

    rate: float = 1.0
    length: float = 1.0

    def __post_init__(self) -> None:
        _check_finite(rate=self.rate, length=self.length)
        _check_positive(rate=self.rate, length=self.length)

    def _scale(self, rate_power: int, length_power: int) -> float:
        return self.rate ** rate_power * self.length ** length_power

    def to_dimensionless(self, value, rate_power: int = 1, length_power: int = 0):
        return np.asarray(value, dtype=float) / self._scale(rate_power, length_power)

    def from_dimensionless(self, value, rate_power: int = 1, length_power: int = 0):
        return np.asarray(value, dtype=float) * self._scale(rate_power, length_power)


def emitter_units(p: EmitterParams) -> Units:
    """Units where Gamma = 1 and v_g = 1 (length unit v_g / Gamma)."""
    return Units(rate=p.Gamma, length=p.v_g / p.Gamma)


def scale_emitter(p: EmitterParams, units: Units) -> EmitterParams:
    """Express ``p`` in ``units``; velocities scale as length * rate."""
    return replace(
        p,
        omega_e=float(units.to_dimensionless(p.omega_e)),
        gamma=float(units.to_dimensionless(p.gamma)),
        Gamma=float(units.to_dimensionless(p.Gamma)),
        v_g=float(units.to_dimensionless(p.v_g, rate_power=1, length_power=1)),
    )


def unscale_emitter(p: EmitterParams, units: Units) -> EmitterParams:
    return replace(
        p,
        omega_e=float(units.from_dimensionless(p.omega_e)),
        gamma=float(units.from_dimensionless(p.gamma)),
        Gamma=float(units.from_dimensionless(p.Gamma)),
        v_g=float(units.from_dimensionless(p.v_g, rate_power=1, length_power=1)),
    )


@dataclass(frozen=True)
class Spectrum:
    """Complex amplitudes sampled on a detuning grid."""

    delta: np.ndarray
    t: np.ndarray
    r: np.ndarray

    @property
    def T(self) -> np.ndarray:
        return np.abs(self.t) ** 2

    @property
    def R(self) -> np.ndarray:
        return np.abs(self.r) ** 2
