"""Closed-form photon scattering from a side-coupled two-level emitter.

Conventions: ``delta = v_g k - omega_e``; the reflection amplitude is
``r = t - 1``.  The driven-qubit formula in :mod:`wqed.router3le` uses the
opposite sign for ``r`` (``t = 1 - r``); the two are never mixed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import CoherentInput, DetuningGrid, EmitterParams, ParameterError, Spectrum

SQRT_2PI = math.sqrt(2.0 * math.pi)


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, error_estimate: float):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


class PerfectMirrorDivergence(ZeroDivisionError):
    """The monochromatic g2 is 0/0 because t(k0) vanishes exactly."""


@dataclass(frozen=True)
class OnePhotonAmplitudes:
    t: np.ndarray | complex
    r: np.ndarray | complex

    @property
    def T(self):
        return np.abs(self.t) ** 2

    @property
    def R(self):
        return np.abs(self.r) ** 2


@dataclass(frozen=True)
class TwoPhotonAsymptotics:
    """Outgoing two-photon amplitudes far from the emitter (resonant, lossless)."""

    x1: np.ndarray
    x2: np.ndarray
    t2: np.ndarray
    r2: np.ndarray
    rt: np.ndarray

    @property
    def x_c(self) -> np.ndarray:
        return 0.5 * (self.x1 + self.x2)

    @property
    def x(self) -> np.ndarray:
        return self.x1 - self.x2


@dataclass(frozen=True)
class BoundStateAmplitudes:
    """Right-moving pieces of the two-photon scattering eigenstate.

    ``g_RR_bound`` is the exponentially localized part of ``g_RR`` (already
    symmetrized and including the 1/sqrt(2) prefactor).
    """

    x1: np.ndarray
    x2: np.ndarray
    g_RR: np.ndarray
    g_RR_bound: np.ndarray
    e_R: np.ndarray
    g_k1: np.ndarray
    g_k2: np.ndarray
    e_k1: complex
    e_k2: complex


def heaviside(x):
    """Step function with theta(0) = 1/2, matching the amplitude continuity rule."""
    return np.heaviside(np.asarray(x, dtype=float), 0.5)


def one_photon_amplitudes(p: EmitterParams, delta) -> OnePhotonAmplitudes:
    """t = (delta + i gamma) / (delta + i (gamma + Gamma)), r = t - 1."""
    delta = np.asarray(delta, dtype=float)
    t = (delta + 1j * p.gamma) / (delta + 1j * (p.gamma + p.Gamma))
    if t.ndim == 0:
        t = complex(t)
    return OnePhotonAmplitudes(t=t, r=t - 1)


def one_photon_coefficients(p: EmitterParams, grid: DetuningGrid | np.ndarray) -> Spectrum:
    """Transmission and reflection on a grid; ``T`` and ``R`` via the Lorentzian forms.

    The returned ``Spectrum`` stores the complex amplitudes; the explicit
    coefficient formulas are available from :func:`reflection_coefficient`
    and :func:`transmission_coefficient`.
    """
    delta = np.asarray(grid.values if isinstance(grid, DetuningGrid) else grid, dtype=float)
    amps = one_photon_amplitudes(p, delta)
    return Spectrum(delta=delta, t=np.asarray(amps.t), r=np.asarray(amps.r))


def reflection_coefficient(p: EmitterParams, delta):
    delta = np.asarray(delta, dtype=float)
    return p.Gamma ** 2 / (delta ** 2 + (p.gamma + p.Gamma) ** 2)


def transmission_coefficient(p: EmitterParams, delta):
    delta = np.asarray(delta, dtype=float)
    return (delta ** 2 + p.gamma ** 2) / (delta ** 2 + (p.gamma + p.Gamma) ** 2)


def loss_probability(p: EmitterParams, delta):
    """1 - |t|^2 - |r|^2 = 2 gamma Gamma / (delta^2 + (gamma + Gamma)^2)."""
    delta = np.asarray(delta, dtype=float)
    return 2.0 * p.gamma * p.Gamma / (delta ** 2 + (p.gamma + p.Gamma) ** 2)


# -- input-output route -----------------------------------------------------

def driven_linear_response(decay: complex, drive: complex, omega: float) -> complex:
    """Steady amplitude A of dy/dt = decay*y + drive*exp(-i omega t), y = A exp(-i omega t)."""
    return drive / (-1j * omega - decay)


def input_output_one_photon(p: EmitterParams, delta) -> OnePhotonAmplitudes:
    """One-photon amplitudes from the Heisenberg input-output equations.

    The matrix element <0|sigma_-(t)|k+> obeys a first-order linear ODE
    driven by the input field (sigma_z -> -1 on the ground state).  Its
    steady solution inserted in b_out = b_in - i (V/v_g) sigma_- gives the
    output amplitudes of both channels.  All amplitudes below are per unit
    ``exp(-i v_g k t) / sqrt(2 pi)``.
    """
    if p.gamma != 0:
        raise ParameterError(
            "input-output formalism derived without loss: requires gamma == 0, "
            f"got gamma={p.gamma}")
    delta = np.asarray(delta, dtype=float)
    # Work in the frame rotating at omega_e, so the drive frequency is delta.
    decay = -p.Gamma + 0j                   # -(i omega_e + Gamma) after the frame shift
    drive = 1j * p.V * (-1.0)               # i V <sigma_z b_R,in>, <sigma_z> = -1
    sigma = driven_linear_response(decay, drive, delta)
    b_in_R, b_in_L = 1.0, 0.0
    coupling = -1j * p.V / p.v_g
    t = b_in_R + coupling * sigma
    r = b_in_L + coupling * sigma
    if np.ndim(t) == 0:
        t, r = complex(t), complex(r)
    return OnePhotonAmplitudes(t=t, r=r)


# -- two-photon amplitudes --------------------------------------------------

def _require_resonant_lossless(p: EmitterParams, k1, k2) -> None:
    if p.gamma != 0:
        raise ParameterError("two-photon asymptotics are only available in closed form for gamma == 0")
    k_res = p.omega_e / p.v_g
    for name, k in (("k1", k1), ("k2", k2)):
        if k is not None and not math.isclose(k, k_res, rel_tol=1e-12, abs_tol=1e-12):
            raise ParameterError(
                f"two-photon asymptotics need resonant photons (v_g {name} = omega_e); "
                f"got {name}={k}, resonance at {k_res}")


def two_photon_asymptotics(p: EmitterParams, x1, x2, k1: float | None = None,
                           k2: float | None = None) -> TwoPhotonAsymptotics:
    """Outgoing t2, r2 and rt for two resonant photons on a lossless emitter."""
    _require_resonant_lossless(p, k1, k2)
    x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    xc = 0.5 * (x1 + x2)
    x = x1 - x2
    kw = p.omega_e / p.v_g
    decay = np.exp(-p.Gamma * np.abs(x) / p.v_g)
    t2 = -1.0 / (math.sqrt(2.0) * math.pi) * np.exp(2j * kw * xc) * decay
    r2 = 1.0 / (math.sqrt(2.0) * math.pi) * np.exp(-2j * kw * xc) * (1.0 - decay)
    rt = -1.0 / math.pi * np.exp(1j * kw * x) * np.exp(-2.0 * p.Gamma * np.abs(xc) / p.v_g)
    return TwoPhotonAsymptotics(x1=x1, x2=x2, t2=t2, r2=r2, rt=rt)


def g_k(p: EmitterParams, k: float, x):
    """Right-moving one-photon amplitude: incident for x < 0, t_k times it for x > 0."""
    x = np.asarray(x, dtype=float)
    t = one_photon_amplitudes(p, p.detuning(k)).t
    return np.exp(1j * k * x) / SQRT_2PI * (heaviside(-x) + t * heaviside(x))


def e_k(p: EmitterParams, k: float) -> complex:
    """Emitter excitation amplitude of the one-photon eigenstate."""
    return complex(p.V / (SQRT_2PI * (p.v_g * k - p.omega_e + 1j * (p.gamma + p.Gamma))))


def _bound_term(p: EmitterParams, k1: float, k2: float, x1, x2, ek1: complex, ek2: complex):
    xc = 0.5 * (x1 + x2)
    x = x1 - x2
    phase = np.exp(1j * (k1 + k2) * xc) * np.exp(1j * (k1 + k2 - 2.0 * p.omega_e / p.v_g) * x / 2.0)
    envelope = np.exp(-(p.gamma + p.Gamma) * x / p.v_g) * heaviside(x) * heaviside(x2)
    # exp(+|x|) overflows where theta(x) = 0; those entries are zeroed anyway.
    envelope = np.where(x >= 0, envelope, 0.0)
    return 2.0 * p.Gamma / p.v_g * ek1 * ek2 * phase * envelope


def two_photon_bound_state(p: EmitterParams, k1: float, k2: float, x1, x2) -> BoundStateAmplitudes:
    """g_RR(x1, x2) and e_R(x1) of the two-photon scattering eigenstate.

    ``x1`` and ``x2`` broadcast against each other; ``e_R`` is evaluated at
    ``x1``.
    """
    x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    ek1, ek2 = e_k(p, k1), e_k(p, k2)

    with np.errstate(over="ignore", invalid="ignore"):
        free = g_k(p, k1, x1) * g_k(p, k2, x2)
        free_swapped = g_k(p, k1, x2) * g_k(p, k2, x1)
        bound = _bound_term(p, k1, k2, x1, x2, ek1, ek2)
        bound_swapped = _bound_term(p, k1, k2, x2, x1, ek1, ek2)

    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    g_bound = inv_sqrt2 * (bound + bound_swapped)
    g_RR = inv_sqrt2 * (free + free_swapped) + g_bound

    E = p.v_g * (k1 + k2)
    with np.errstate(over="ignore", invalid="ignore"):
        tail = np.exp(1j * (E - p.omega_e + 1j * p.gamma + 1j * p.Gamma) * x1 / p.v_g)
        tail = np.where(x1 >= 0, tail * heaviside(x1), 0.0)
    e_R = (g_k(p, k1, x1) * ek2 + g_k(p, k2, x1) * ek1) + 2j * p.V / p.v_g * ek1 * ek2 * tail

    return BoundStateAmplitudes(
        x1=x1, x2=x2, g_RR=g_RR, g_RR_bound=g_bound, e_R=e_R,
        g_k1=g_k(p, k1, x1), g_k2=g_k(p, k2, x2), e_k1=ek1, e_k2=ek2)


# -- coherent-state observables --------------------------------------------

QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-11
QUAD_LIMIT = 400
QUAD_SIGMAS = 12.0          # alpha(k) has standard deviation sqrt(2) Delta_k; 12 Delta_k leaves erfc(6) ~ 2e-17


def _complex_quad(f, a: float, b: float, points=None) -> complex:
    """Adaptive Gauss-Kronrod on the real and imaginary parts of ``f``."""
    total = 0j
    for part, name in ((np.real, "real"), (np.imag, "imag")):
        value, err = integrate.quad(lambda k: float(part(f(k))), a, b, points=points,
                                    epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
        tol = max(100 * QUAD_EPSABS, 100 * QUAD_EPSREL * abs(value))
        if not err <= tol:
            raise QuadratureError(f"coherent-state integral ({name} part) did not converge", err)
        total += value if name == "real" else 1j * value
    return total


def _breakpoints(p: EmitterParams, a: float, b: float):
    k_res = p.wavevector(0.0)
    return [float(k_res)] if a < k_res < b else None


def coherent_transmission(p: EmitterParams, inp: CoherentInput, x: float) -> float:
    """Transmission of a weak coherent pulse observed at ``x > 0`` (one-photon order).

    T = |int alpha(k) t_k e^{ikx} dk|^2 / |int alpha(k) e^{ikx} dk|^2, the
    double integrals of the displayed ratio factorizing into these moduli.
    """
    if not x > 0:
        raise ParameterError(f"observation point must satisfy x > 0, got {x}")
    a, b = inp.support(QUAD_SIGMAS)
    pts = _breakpoints(p, a, b)

    def numer(k):
        return inp.amplitude(k) * one_photon_amplitudes(p, p.detuning(k)).t * np.exp(1j * k * x)

    def denom(k):
        return inp.amplitude(k) * np.exp(1j * k * x)

    num = _complex_quad(numer, a, b, pts)
    den = _complex_quad(denom, a, b, pts)
    return float(abs(num) ** 2 / abs(den) ** 2)


def packet_averages(p: EmitterParams, inp: CoherentInput) -> tuple[complex, complex]:
    """(int alpha t dk, int alpha r dk) over the truncated Gaussian support."""
    a, b = inp.support(QUAD_SIGMAS)
    pts = _breakpoints(p, a, b)
    at = _complex_quad(lambda k: inp.amplitude(k) * one_photon_amplitudes(p, p.detuning(k)).t, a, b, pts)
    ar = _complex_quad(lambda k: inp.amplitude(k) * one_photon_amplitudes(p, p.detuning(k)).r, a, b, pts)
    return at, ar


def g2_transmitted(p: EmitterParams, inp: CoherentInput, tau) -> np.ndarray:
    """Second-order correlation of the transmitted field versus delay ``tau``.

    The double integrals over (k1, k2) separate into products of the packet
    averages of t and r, so only two one-dimensional quadratures are needed.
    """
    tau = np.asarray(tau, dtype=float)
    if not np.all(np.isfinite(tau)):
        raise ParameterError("tau grid must be finite")
    if inp.n_bar > 1 and not inp.allow_high_intensity:
        raise ParameterError("g2 formula requires n_bar <= 1")
    at, ar = packet_averages(p, inp)
    if at == 0:
        raise PerfectMirrorDivergence("packet-averaged transmission vanishes; g2 undefined")
    bound = np.exp(-(p.Gamma + p.gamma) * np.abs(tau))
    return np.abs(at ** 2 - ar ** 2 * bound) ** 2 / np.abs(at) ** 4


def g2_monochromatic(p: EmitterParams, delta: float, tau) -> np.ndarray:
    """Narrow-band limit: |t^2 - r^2 exp(-(Gamma+gamma)|tau|)|^2 / |t|^4."""
    amps = one_photon_amplitudes(p, delta)
    t, r = amps.t, amps.r
    if t == 0:
        raise PerfectMirrorDivergence(
            "perfect-mirror divergence: t(k0) = 0 exactly; use g2_transmitted with a finite Delta_k")
    tau = np.asarray(tau, dtype=float)
    bound = np.exp(-(p.Gamma + p.gamma) * np.abs(tau))
    return np.abs(t * t - r * r * bound) ** 2 / abs(t) ** 4
