"""Driven emitters: the three-level single-photon router and the driven qubit.

The router amplitudes follow from the susceptibility-like quantity
``chi = delta + i gamma - Omega_c^2 / (4 (delta_R + i gamma_s))`` with the
Raman detuning ``delta_R = delta - Delta_c``.  At the Raman pole (gamma_s = 0,
delta_R = 0) ``chi`` is infinite; that value is returned as ``inf + 0j`` and
maps to perfect transmission.

The driven-qubit steady state uses ``t = 1 - r``, i.e. the opposite sign of
``r`` from :mod:`wqed.analytic2le`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .core import DetuningGrid, ParameterError, Spectrum, ThreeLevelParams, _check_finite

DIVERGENT = complex(math.inf, 0.0)

ATS_SCAN_POINTS = 2001
ATS_SCAN_SPAN = 3.0          # scan delta in [-3 Omega_c, 3 Omega_c]
ATS_STRONG_DRIVE = 2.0       # Omega_c / (gamma + Gamma) below this is flagged


class NoDoubletError(RuntimeError):
    """The transmission spectrum has fewer than two resonances."""


class WeakDriveWarning(UserWarning):
    """Autler-Townes analysis requested outside the Omega_c >> Gamma regime."""


class SingularSystemError(np.linalg.LinAlgError):
    """Steady-state Bloch equations have no unique solution."""


def susceptibility_chi(p: ThreeLevelParams, delta):
    """chi(delta); divergent points are ``inf + 0j`` (never NaN)."""
    b = p.base
    delta = np.asarray(delta, dtype=float)
    chi = delta + 1j * b.gamma
    if p.Omega_c == 0:
        return complex(chi) if chi.ndim == 0 else chi.astype(complex)
    denom = 4.0 * (p.raman_detuning(delta) + 1j * p.gamma_s)
    pole = denom == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        chi = chi - p.Omega_c ** 2 / np.where(pole, 1.0, denom)
    chi = np.where(pole, DIVERGENT, chi)
    return complex(chi) if chi.ndim == 0 else chi


def router_amplitudes(p: ThreeLevelParams, grid: DetuningGrid | np.ndarray) -> Spectrum:
    """t' = chi / (chi + i Gamma), r' = -i Gamma / (chi + i Gamma)."""
    delta = np.asarray(grid.values if isinstance(grid, DetuningGrid) else grid, dtype=float)
    chi = np.atleast_1d(susceptibility_chi(p, delta))
    G = p.base.Gamma
    divergent = np.isinf(chi)
    safe = np.where(divergent, 0.0, chi)
    t = np.where(divergent, 1.0 + 0j, safe / (safe + 1j * G))
    r = np.where(divergent, 0j, -1j * G / (safe + 1j * G))
    return Spectrum(delta=delta.reshape(t.shape) if delta.ndim else delta.reshape(1), t=t, r=r)


def _local_minima(y: np.ndarray) -> np.ndarray:
    inner = (y[1:-1] < y[:-2]) & (y[1:-1] <= y[2:])
    return np.nonzero(inner)[0] + 1


def ats_splitting(p: ThreeLevelParams, n_scan: int = ATS_SCAN_POINTS) -> float:
    """Separation of the Autler-Townes doublet.

    The doublet lines are the two deepest transmission minima (extinction
    maxima) of ``|t'|^2``.  A coarse scan over ``[-3 Omega_c, 3 Omega_c]``
    brackets them and golden-section search refines each position.
    """
    if p.Omega_c == 0:
        raise NoDoubletError("no doublet found: control field is off")
    width = p.base.gamma + p.base.Gamma
    if p.Omega_c < ATS_STRONG_DRIVE * width:
        warnings.warn(
            f"Omega_c={p.Omega_c} is not >> gamma+Gamma={width}; splitting may differ from Omega_c",
            WeakDriveWarning, stacklevel=2)

    span = ATS_SCAN_SPAN * p.Omega_c
    delta = np.linspace(-span, span, n_scan)

    def T(d):
        return float(router_amplitudes(p, np.array([d])).T[0])

    Ts = router_amplitudes(p, delta).T
    idx = _local_minima(Ts)
    if idx.size < 2:
        raise NoDoubletError("no doublet found: |t'|^2 has fewer than two resonances")
    deepest = idx[np.argsort(Ts[idx])[:2]]
    positions = []
    for i in sorted(deepest):
        res = optimize.minimize_scalar(T, bracket=(delta[i - 1], delta[i], delta[i + 1]),
                                       method="golden", tol=1e-10)
        positions.append(float(res.x))
    return abs(positions[1] - positions[0])


# -- driven qubit -----------------------------------------------------------

@dataclass(frozen=True)
class DrivenQubitParams:
    """Coherently driven qubit with relaxation Gamma1 and pure dephasing Gamma_phi."""

    Gamma1: float
    Gamma_phi: float = 0.0
    Omega: float = 0.0
    r0: float = 1.0

    def __post_init__(self) -> None:
        _check_finite(Gamma1=self.Gamma1, Gamma_phi=self.Gamma_phi, Omega=self.Omega, r0=self.r0)
        for name in ("Gamma1", "Gamma_phi", "Omega"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0")
        if not 0.0 <= self.r0 <= 1.0:
            raise ParameterError(f"r0 must lie in [0, 1], got {self.r0}")

    @property
    def Gamma2(self) -> float:
        return self.Gamma1 / 2.0 + self.Gamma_phi


def driven_qubit_steady_state(q: DrivenQubitParams, delta) -> tuple:
    """(r, t) with r = r0 (1 + i d/G2) / (1 + (d/G2)^2 + Omega^2/(G1 G2)), t = 1 - r."""
    if q.Gamma1 <= 0 or q.Gamma2 <= 0:
        raise ParameterError("closed form needs Gamma1 > 0 and Gamma2 > 0")
    x = np.asarray(delta, dtype=float) / q.Gamma2
    r = q.r0 * (1 + 1j * x) / (1 + x * x + q.Omega ** 2 / (q.Gamma1 * q.Gamma2))
    if np.ndim(r) == 0:
        r = complex(r)
    return r, 1 - r


def bloch_matrix(q: DrivenQubitParams, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Linear steady-state system for (u/Omega, v/Omega, w).

    Rotating-frame Bloch equations with H = -delta/2 sz + Omega/2 sx:
        du/dt = -G2 u + delta v
        dv/dt = -delta u - G2 v - Omega w
        dw/dt = Omega v - G1 (w + 1)
    Dividing u and v by Omega keeps the system regular as Omega -> 0.
    """
    G1, G2, W = q.Gamma1, q.Gamma2, q.Omega
    A = np.array([
        [-G2, delta, 0.0],
        [-delta, -G2, -1.0],
        [0.0, W * W, -G1],
    ])
    b = np.array([0.0, 0.0, G1])
    return A, b


def bloch_steady_state_oracle(q: DrivenQubitParams, delta) -> tuple:
    """(r, t) from a direct linear solve of the steady-state Bloch equations."""
    deltas = np.atleast_1d(np.asarray(delta, dtype=float))
    r = np.empty(deltas.shape, dtype=complex)
    for i, d in enumerate(deltas):
        A, b = bloch_matrix(q, float(d))
        try:
            u, v, _ = np.linalg.solve(A, b)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(
                f"steady-state Bloch system is singular at delta={d} (all rates zero?)") from exc
        r[i] = q.r0 * 1j * q.Gamma2 * (u - 1j * v)
    if np.ndim(delta) == 0:
        r = complex(r[0])
    return r, 1 - r
