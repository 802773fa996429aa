"""Two-photon Rydberg-polariton propagation in the dispersive regime.

The relative-coordinate wavefunction psi(r, R) of two photons obeys a
Schrodinger-like equation in which the mean coordinate R plays the role of
time:

    i dpsi/dR = (4 l_a Delta / gamma) d2psi/dr2 + (gamma / (l_a Delta)) U(r) psi

with attenuation length ``l_a = L / OD = 2 r_B / OD_B`` and a square-well
blockade potential ``U = 1`` for ``|r| <= r_B``.  Lengths are naturally in
units of ``r_B`` and rates in units of ``gamma``, but any consistent choice
works.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.linalg import splu

from .core import ParameterError, _check_finite, _check_positive

DEFAULT_POINTS = 2049          # odd, so r = 0 is a grid point
DEFAULT_HALF_WIDTH = 10.0      # domain [-10 r_B, 10 r_B]
MAX_POTENTIAL_PHASE = 0.05     # |b| dR per step
MAX_COURANT = 50.0             # |a| dR / dr^2 per step
WALL_TOLERANCE = 1e-6
SMOOTHING_WIDTH = 0.05         # in units of r_B
DISPERSIVE_RATIO = 3.0         # |Delta| >= 3 gamma and Omega_c <= |Delta| / 3, else flagged


class StepSizeError(ParameterError):
    """Requested propagation step exceeds the accuracy policy."""


class GridRangeError(ValueError):
    """Requested delay maps outside the computational grid."""


@dataclass(frozen=True)
class RydbergMedium:
    """EIT medium with Rydberg blockade.

    ``OD`` and ``OD_B`` must agree with ``L`` and ``r_B`` through the shared
    attenuation length; :meth:`from_blockade` derives ``OD`` for you.
    """

    OD: float
    OD_B: float
    r_B: float
    L: float
    gamma: float
    Delta: float
    Omega_c: float

    def __post_init__(self) -> None:
        _check_finite(OD=self.OD, OD_B=self.OD_B, r_B=self.r_B, L=self.L, gamma=self.gamma,
                      Delta=self.Delta, Omega_c=self.Omega_c)
        _check_positive(OD=self.OD, OD_B=self.OD_B, r_B=self.r_B, L=self.L, gamma=self.gamma)
        if self.Omega_c < 0:
            raise ParameterError("Omega_c must be >= 0")
        la_medium = self.L / self.OD
        la_blockade = 2.0 * self.r_B / self.OD_B
        if not math.isclose(la_medium, la_blockade, rel_tol=1e-9, abs_tol=0.0):
            raise ParameterError(
                f"inconsistent attenuation length: L/OD={la_medium} but 2 r_B/OD_B={la_blockade}")

    @classmethod
    def from_blockade(cls, OD_B: float, L: float, Delta: float, r_B: float = 1.0,
                      gamma: float = 1.0, Omega_c: float = 0.0) -> "RydbergMedium":
        return cls(OD=OD_B * L / (2.0 * r_B), OD_B=OD_B, r_B=r_B, L=L, gamma=gamma,
                   Delta=Delta, Omega_c=Omega_c)

    @property
    def l_a(self) -> float:
        return 2.0 * self.r_B / self.OD_B

    @property
    def v_EIT(self) -> float:
        return self.l_a * self.Omega_c ** 2 / (2.0 * self.gamma)

    def coefficients(self, dissipative: bool = False) -> tuple[complex, complex]:
        """(mass coefficient, potential coefficient) of the propagation equation.

        With ``dissipative=True`` the detuning is continued to Delta + i gamma;
        that extrapolation lies outside the regime where the equation was derived.
        """
        D = self.Delta + 1j * self.gamma if dissipative else self.Delta
        if D == 0:
            raise ParameterError("Delta = 0: the dispersive propagation equation is singular")
        a = 4.0 * self.l_a * D / self.gamma
        b = self.gamma / (self.l_a * D)
        if not dissipative:
            a, b = float(np.real(a)), float(np.real(b))
        return a, b

    def regime_flags(self) -> list[str]:
        flags = []
        if abs(self.Delta) < DISPERSIVE_RATIO * self.gamma:
            flags.append("outside dispersive regime: |Delta| not >> gamma")
        if self.Omega_c > abs(self.Delta) / DISPERSIVE_RATIO:
            flags.append("outside validity window: Omega_c not << |Delta|")
        return flags


@dataclass(frozen=True)
class PsiField:
    """psi on a uniform relative-coordinate grid at mean coordinate ``R``."""

    r: np.ndarray
    values: np.ndarray
    R: float = 0.0
    flags: tuple[str, ...] = ()
    knobs: dict = field(default_factory=dict)

    @property
    def dr(self) -> float:
        return float(self.r[1] - self.r[0])

    def weights(self) -> np.ndarray:
        """Trapezoid weights, the inner product in which the propagator is unitary."""
        w = np.full(self.r.size, self.dr)
        w[0] = w[-1] = 0.5 * self.dr
        return w

    def norm2(self) -> float:
        return float(np.sum(self.weights() * np.abs(self.values) ** 2))


def uniform_grid(r_B: float = 1.0, n_points: int = DEFAULT_POINTS,
                 half_width: float = DEFAULT_HALF_WIDTH) -> np.ndarray:
    if n_points < 3:
        raise ParameterError("grid needs at least 3 points")
    return np.linspace(-half_width * r_B, half_width * r_B, int(n_points))


def initial_field(m: RydbergMedium, n_points: int = DEFAULT_POINTS,
                  half_width: float = DEFAULT_HALF_WIDTH) -> PsiField:
    """Non-interacting input psi(r, 0) = 1."""
    r = uniform_grid(m.r_B, n_points, half_width)
    return PsiField(r=r, values=np.ones(r.size, dtype=complex), R=0.0)


def effective_potential(r, r_B: float, smoothing: float | None = None):
    """Blockade step U = 1 on the closed interval |r| <= r_B.

    ``smoothing`` (in units of r_B) replaces the step by a tanh edge of that
    width, for convergence studies.
    """
    if not r_B > 0:
        raise ParameterError("r_B must be > 0")
    r = np.abs(np.asarray(r, dtype=float))
    if smoothing:
        return 0.5 * (1.0 - np.tanh((r - r_B) / (smoothing * r_B)))
    return np.where(r <= r_B, 1.0, 0.0)


def neumann_laplacian(n: int, dr: float) -> sparse.csr_matrix:
    """Second difference with reflecting (zero-slope) walls via ghost points."""
    c = 1.0 / (dr * dr)
    main = np.full(n, -2.0 * c)
    upper = np.full(n - 1, c)
    lower = np.full(n - 1, c)
    upper[0] = 2.0 * c
    lower[-1] = 2.0 * c
    return sparse.diags([lower, main, upper], [-1, 0, 1], format="csr")


def step_limits(m: RydbergMedium, dr: float, dissipative: bool = False) -> float:
    """Largest dR allowed by the potential-phase and Courant-number policy."""
    a, b = m.coefficients(dissipative)
    return min(MAX_POTENTIAL_PHASE / abs(b), MAX_COURANT * dr * dr / abs(a))


def evolve_psi(m: RydbergMedium, psi0: PsiField, n_steps: int | None = None,
               potential=None, smoothing: float | None = None,
               dissipative: bool = False, monitor_every: int = 10) -> PsiField:
    """Propagate psi from R = psi0.R to R = psi0.R + L with Crank-Nicolson steps.

    ``potential`` replaces U(r) (e.g. ``0`` for free propagation).  The result
    carries flags for validity-window violations and for disturbances that
    reach the walls (|psi - psi_wall(0)| > 1e-6).
    """
    r = psi0.r
    dr = psi0.dr
    if not np.all(np.isfinite(psi0.values)):
        raise ParameterError("initial field must be finite")
    a, b = m.coefficients(dissipative)
    if potential is None:
        U = effective_potential(r, m.r_B, smoothing)
    else:
        U = np.broadcast_to(np.asarray(potential, dtype=float), r.shape)

    limit = step_limits(m, dr, dissipative)
    if n_steps is None:
        n_steps = max(1, int(math.ceil(m.L / limit)))
    dR = m.L / n_steps
    if dR > limit * (1 + 1e-12):
        raise StepSizeError(f"dR={dR:.3e} exceeds the step policy limit {limit:.3e}; use more steps")

    H = a * neumann_laplacian(r.size, dr) + sparse.diags(b * U)
    eye = sparse.identity(r.size, dtype=complex, format="csc")
    A = (eye + 0.5j * dR * H).tocsc()
    lhs = splu(A)
    A = A.tocsr()
    rhs = (eye - 0.5j * dR * H).tocsr()

    psi = np.array(psi0.values, dtype=complex)
    wall0 = np.array([psi[0], psi[-1]])
    wall_excursion = 0.0
    for step in range(1, n_steps + 1):
        target = rhs @ psi
        psi = lhs.solve(target)
        # one refinement sweep keeps LU round-off from accumulating over many steps
        psi += lhs.solve(target - A @ psi)
        if step % monitor_every == 0 or step == n_steps:
            wall_excursion = max(wall_excursion, float(np.max(np.abs(psi[[0, -1]] - wall0))))

    flags = list(psi0.flags) + m.regime_flags()
    if wall_excursion > WALL_TOLERANCE:
        flags.append(f"boundary: wall excursion {wall_excursion:.2e} > {WALL_TOLERANCE:g}")
    if dissipative:
        flags.append("dissipative extrapolation Delta -> Delta + i gamma")
    knobs = {"n_points": int(r.size), "half_width": float(r[-1]), "dR": dR, "n_steps": n_steps,
             "dr": dr, "courant": abs(a) * dR / dr ** 2, "potential_phase": abs(b) * dR,
             "smoothing": smoothing, "wall_excursion": wall_excursion}
    return PsiField(r=r, values=psi, R=psi0.R + m.L, flags=tuple(dict.fromkeys(flags)), knobs=knobs)


# -- bound states ----------------------------------------------------------------

@dataclass(frozen=True)
class BoundState:
    """Eigenpair of the well operator |a| (-d2/dr2) - |b| U(r).

    ``energy`` lies in (-|b|, 0).  The propagation generator has eigenvalue
    ``-sign(Delta) * energy`` on the same eigenfunction.  ``phi`` is
    normalized with trapezoid weights on ``r``.
    """

    energy: float
    r: np.ndarray
    phi: np.ndarray


def well_parameters(m: RydbergMedium) -> tuple[float, float]:
    """(kinetic coefficient |a|, well depth |b|)."""
    a, b = m.coefficients()
    return abs(a), abs(b)


def _dirichlet_spectrum(kin: float, depth: float, r_B: float, dr: float, half_width: float,
                        vectors: bool):
    """Cell-centred grid so the well edges fall halfway between samples."""
    m_half = int(round(half_width / dr))
    r = (np.arange(-m_half, m_half) + 0.5) * dr
    U = effective_potential(r, r_B)
    diag = 2.0 * kin / dr ** 2 - depth * U
    off = np.full(r.size - 1, -kin / dr ** 2)
    select_range = (-depth, 0.0)
    if vectors:
        w, v = eigh_tridiagonal(diag, off, select="v", select_range=select_range)
        return r, w, v
    w = eigh_tridiagonal(diag, off, eigvals_only=True, select="v", select_range=select_range)
    return r, w, None


def bound_states(m: RydbergMedium, points_per_rB: int = 400, decay_lengths: float = 30.0
                 ) -> list[BoundState]:
    """Bound spectrum of the square-well operator, ground state first.

    The well is discretized on a cell-centred grid whose half-width covers
    ``decay_lengths`` decay lengths of the least bound state (grown
    iteratively).  Energies are Richardson-extrapolated from two grid
    spacings; eigenfunctions come from the finer grid.
    """
    kin, depth = well_parameters(m)
    r_B = m.r_B
    dr = r_B / points_per_rB
    half_width = r_B * (1.0 + decay_lengths * math.sqrt(kin / depth) / r_B + 2.0)
    for _ in range(20):
        _, coarse, _ = _dirichlet_spectrum(kin, depth, r_B, dr, half_width, vectors=False)
        if coarse.size == 0:
            raise RuntimeError("no bound state found; increase resolution")
        kappa_min = math.sqrt(-coarse[-1] / kin)
        needed = r_B + decay_lengths / kappa_min
        if half_width >= needed:
            break
        half_width = 1.5 * needed
    r, fine, vecs = _dirichlet_spectrum(kin, depth, r_B, dr / 2, half_width, vectors=True)
    n = min(coarse.size, fine.size)
    energies = (4.0 * fine[:n] - coarse[:n]) / 3.0
    h = dr / 2
    states = []
    for i in range(n):
        phi = vecs[:, i] / math.sqrt(h)
        if phi[np.argmax(np.abs(phi))] < 0:
            phi = -phi
        states.append(BoundState(energy=float(energies[i]), r=r, phi=phi))
    return states


def bound_states_on_grid(m: RydbergMedium, r: np.ndarray) -> list[BoundState]:
    """Bound states of the same Neumann-wall operator that :func:`evolve_psi` uses."""
    kin, depth = well_parameters(m)
    dr = float(r[1] - r[0])
    w = np.full(r.size, dr)
    w[0] = w[-1] = 0.5 * dr
    c = kin / dr ** 2
    diag = 2.0 * c - depth * effective_potential(r, m.r_B)
    # Neumann ghost points make K non-symmetric at the ends; in the trapezoid
    # inner product it is symmetric, so S = W^1/2 K W^-1/2 is a symmetric tridiagonal.
    upper = np.full(r.size - 1, -c)
    lower = np.full(r.size - 1, -c)
    upper[0] = -2.0 * c
    lower[-1] = -2.0 * c
    s = np.sqrt(w)
    off = np.sqrt(upper * lower) * np.sign(upper)
    vals, vecs = eigh_tridiagonal(diag, off, select="v", select_range=(-depth, 0.0))
    states = []
    for val, vec in zip(vals, vecs.T):
        phi = vec / s
        phi /= math.sqrt(np.sum(w * phi ** 2))
        if phi[np.argmax(np.abs(phi))] < 0:
            phi = -phi
        states.append(BoundState(energy=float(val), r=r, phi=phi))
    return states


# -- observables -------------------------------------------------------------------

@dataclass(frozen=True)
class CorrelationCurves:
    tau: np.ndarray
    g2: np.ndarray
    phi: np.ndarray


def g2_and_phase(m: RydbergMedium, psi_out: PsiField, tau) -> CorrelationCurves:
    """g2(tau) = |psi(v_EIT tau, L)|^2 and phi(tau) = arg psi, with linear interpolation of psi."""
    tau = np.asarray(tau, dtype=float)
    if m.v_EIT <= 0:
        raise ParameterError("v_EIT = 0 (Omega_c = 0): delay cannot be converted to distance")
    r = m.v_EIT * tau
    lo, hi = psi_out.r[0], psi_out.r[-1]
    if np.any(r < lo) | np.any(r > hi) or not np.all(np.isfinite(r)):
        raise GridRangeError(f"delays map to r outside the grid [{lo}, {hi}]")
    re = np.interp(r, psi_out.r, psi_out.values.real)
    im = np.interp(r, psi_out.r, psi_out.values.imag)
    psi = re + 1j * im
    return CorrelationCurves(tau=tau, g2=np.abs(psi) ** 2, phi=np.angle(psi))


def bound_state_overlap(psi_out: PsiField, ground: BoundState, background: complex | None = None) -> float:
    """|<phi_0, psi - c>| / (|phi_0| |psi - c|) with c the far-field (scattering) level.

    ``background`` defaults to the mean of psi over the outer quarter of the grid.
    """
    w = psi_out.weights()
    if background is None:
        outer = np.abs(psi_out.r) >= 0.75 * psi_out.r[-1]
        background = complex(np.mean(psi_out.values[outer]))
    excess = psi_out.values - background
    phi = np.interp(psi_out.r, ground.r, ground.phi, left=0.0, right=0.0)
    num = abs(np.sum(w * phi * excess))
    den = math.sqrt(np.sum(w * phi ** 2) * np.sum(w * np.abs(excess) ** 2))
    return float(num / den)


def blockade_probability(OD: float, OD_B: float) -> float:
    """Dissipative-regime blockade probability 1 - OD^(-1/2) exp(-OD_B)."""
    _check_finite(OD=OD, OD_B=OD_B)
    if OD <= 0:
        raise ParameterError("blockade probability undefined for OD <= 0")
    if OD_B < 0:
        raise ParameterError("OD_B must be >= 0")
    return 1.0 - math.exp(-OD_B) / math.sqrt(OD)


def conditional_phase_estimate(m: RydbergMedium) -> float:
    """Phase of a single blockade sphere, -(gamma/Delta) OD_B / 2 (weak-interaction estimate)."""
    if m.Delta == 0:
        raise ParameterError("conditional phase estimate needs Delta != 0")
    return -(m.gamma / m.Delta) * m.OD_B / 2.0
