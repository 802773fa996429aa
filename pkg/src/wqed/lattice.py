"""Tight-binding waveguide with a side-coupled emitter site, evolved in time.

This is a numerical oracle for the linear-dispersion closed forms: a
Gaussian wavepacket is launched at the emitter, propagated with a fixed-step
RK4 integrator, and the transmitted and reflected probabilities are read off
once the packet has cleared the emitter.

Layout of the single-particle mode index: waveguide sites ``0 .. n_sites-1``
followed by the emitter mode at index ``n_sites``.  The two-photon sector is
a symmetric ``(n_sites+1, n_sites+1)`` first-quantized amplitude.  With a
hard-core emitter the doubly occupied emitter entry is pinned to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import sparse
from scipy.integrate import trapezoid

from .core import ParameterError

MIN_SITES = 64
MAX_DT_J = 0.02               # dt <= 0.02 / J
MAX_DT_U = 0.2                # finite-U runs also need dt <= 0.2 / U
NORM_DRIFT_PER_1E4 = 1e-9
START_WIDTHS = 4.0            # initial centroid distance from the emitter, in packet widths
CLEAR_WIDTHS = 5.0            # centroid distance past the emitter at measurement
WALL_WIDTHS = 5.0             # free space kept between packet and wall
EDGE_TOLERANCE = 1e-6         # probability allowed in the outer edge strip


class LatticeGeometryError(ParameterError):
    """Lattice too small to hold the wavepacket for the whole run."""


class NormDriftError(RuntimeError):
    """Norm drift exceeded the unitarity budget during a lossless run."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


class BoundaryContaminationError(RuntimeError):
    """Probability reached the hard walls; the run is invalid."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class LatticeModel:
    """Chain of ``n_sites`` with hopping ``J`` and an emitter mode side-coupled at one site.

    ``U = inf`` selects the hard-core emitter (no double occupancy).
    """

    n_sites: int
    J: float = 1.0
    omega_e: float = 0.0
    V0: float = 0.0
    U: float = math.inf
    gamma: float = 0.0
    emitter_site_index: int = -1

    def __post_init__(self) -> None:
        if int(self.n_sites) != self.n_sites or self.n_sites < MIN_SITES:
            raise LatticeGeometryError(f"n_sites must be an integer >= {MIN_SITES}, got {self.n_sites}")
        for name in ("J", "omega_e", "V0", "gamma"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        if not self.J > 0:
            raise ParameterError("J must be > 0")
        if self.gamma < 0:
            raise ParameterError("gamma must be >= 0")
        if math.isnan(self.U) or self.U < 0:
            raise ParameterError("U must be >= 0 (or inf for a hard-core emitter)")
        if self.emitter_site_index == -1:
            object.__setattr__(self, "emitter_site_index", self.n_sites // 2)
        if not 0 <= self.emitter_site_index < self.n_sites:
            raise ParameterError("emitter_site_index outside the chain")

    @property
    def hard_core(self) -> bool:
        return math.isinf(self.U)

    @property
    def n_modes(self) -> int:
        return self.n_sites + 1

    @property
    def emitter(self) -> int:
        return self.n_sites

    def dispersion(self, k):
        return -2.0 * self.J * np.cos(k)

    def group_velocity(self, k):
        return 2.0 * self.J * np.sin(k)

    def hamiltonian(self) -> sparse.csr_matrix:
        """Single-particle Hamiltonian (emitter energy carries ``-i gamma``)."""
        n = self.n_sites
        hop = -self.J * np.ones(n - 1)
        H = sparse.lil_matrix((n + 1, n + 1), dtype=complex)
        H.setdiag(np.concatenate([hop, [0.0]]), 1)
        H.setdiag(np.concatenate([hop, [0.0]]), -1)
        H[n, n] = self.omega_e - 1j * self.gamma
        H[n, self.emitter_site_index] = self.V0
        H[self.emitter_site_index, n] = self.V0
        return H.tocsr()

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Single-particle Hamiltonian acting on the first axis of ``psi``."""
        n, x0 = self.n_sites, self.emitter_site_index
        out = np.empty_like(psi)
        out[1:n] = psi[0:n - 1]
        out[0] = 0.0
        out[0:n - 1] += psi[1:n]
        out[0:n] *= -self.J
        out[x0] += self.V0 * psi[n]
        out[n] = (self.omega_e - 1j * self.gamma) * psi[n] + self.V0 * psi[x0]
        return out


def build_model(J: float = 1.0, omega_e: float = 0.0, V0: float = 0.0, U: float = math.inf,
                n_sites: int = 2048, gamma: float = 0.0) -> LatticeModel:
    return LatticeModel(n_sites=n_sites, J=J, omega_e=omega_e, V0=V0, U=U, gamma=gamma)


def coupling_for_width(Gamma: float, J: float = 1.0, k0: float = math.pi / 2) -> float:
    """V0 such that V0^2 / v_g(k0) equals ``Gamma``."""
    return math.sqrt(Gamma * 2.0 * J * math.sin(k0))


def exact_lattice_transmission(model: LatticeModel, k):
    """One-photon amplitude transmission of the lattice model at wavevector ``k``."""
    k = np.asarray(k, dtype=float)
    E = model.dispersion(k)
    width = model.V0 ** 2 / model.group_velocity(k)
    return (E - model.omega_e + 1j * model.gamma) / (E - model.omega_e + 1j * (model.gamma + width))


@dataclass
class LatticeState:
    """Wavefunction in the one- or two-photon sector plus elapsed time."""

    psi: np.ndarray
    time: float = 0.0

    @property
    def sector(self) -> int:
        return self.psi.ndim

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.psi, self.psi).real))

    def copy(self) -> "LatticeState":
        return LatticeState(psi=self.psi.copy(), time=self.time)


@dataclass(frozen=True)
class WavePacket:
    """Gaussian wavepacket ``exp(-sigma_k^2 (x - x_c)^2 + i k0 x)`` on the chain.

    ``width`` is the standard deviation of ``|psi|^2`` in sites.
    """

    k0: float = math.pi / 2
    sigma_k: float = 0.005
    separation: float = 0.0      # two-photon packets: displacement between the two Gaussians

    def __post_init__(self) -> None:
        if not self.sigma_k > 0:
            raise ParameterError("sigma_k must be > 0")
        if not 0 < self.k0 < math.pi:
            raise ParameterError("k0 must lie in (0, pi) for a right-moving packet")

    @property
    def width(self) -> float:
        return 1.0 / (2.0 * self.sigma_k)

    def profile(self, n_sites: int, center: float) -> np.ndarray:
        x = np.arange(n_sites, dtype=float)
        phi = np.exp(-(self.sigma_k * (x - center)) ** 2 + 1j * self.k0 * (x - center))
        return phi / np.linalg.norm(phi)


def one_photon_state(model: LatticeModel, packet: WavePacket, center: float) -> LatticeState:
    psi = np.zeros(model.n_modes, dtype=complex)
    psi[:model.n_sites] = packet.profile(model.n_sites, center)
    return LatticeState(psi=psi)


def two_photon_state(model: LatticeModel, packet: WavePacket, center: float) -> LatticeState:
    """Symmetrized product of two Gaussians displaced by ``packet.separation``."""
    a = np.zeros(model.n_modes, dtype=complex)
    b = np.zeros(model.n_modes, dtype=complex)
    half = packet.separation / 2.0
    a[:model.n_sites] = packet.profile(model.n_sites, center - half)
    b[:model.n_sites] = packet.profile(model.n_sites, center + half)
    psi = np.outer(a, b)
    psi = psi + psi.T
    psi /= np.linalg.norm(psi)
    return LatticeState(psi=psi)


# -- time evolution -----------------------------------------------------------

def _generator(model: LatticeModel):
    """Returns f(psi) = -i H psi for the sector given by psi.ndim."""
    n = model.emitter

    def one(psi):
        return -1j * model.apply(psi)

    def two(psi):
        a = model.apply(psi)
        out = a + a.T                  # exact exchange symmetry
        if model.hard_core:
            out[n, n] = 0.0
        else:
            out[n, n] += model.U * psi[n, n]
        return -1j * out

    return one, two


def max_stable_dt(model: LatticeModel, sector: int = 1) -> float:
    dt = MAX_DT_J / model.J
    if sector == 2 and not model.hard_core and model.U > 0:
        dt = min(dt, MAX_DT_U / model.U)
    return dt


def evolve(model: LatticeModel, state: LatticeState, dt: float, steps: int,
           check_every: int = 1000, observer=None) -> LatticeState:
    """Fixed-step RK4 propagation with a norm monitor.

    ``observer(step, state)`` is called every ``check_every`` steps.  Lossless
    runs abort with :class:`NormDriftError` once the drift exceeds 1e-9 per
    1e4 steps.
    """
    if steps < 0 or int(steps) != steps:
        raise ParameterError("steps must be a non-negative integer")
    limit = max_stable_dt(model, state.sector)
    if not 0 < dt <= limit * (1 + 1e-12):
        raise ParameterError(f"dt={dt} violates the stability policy dt <= {limit}")
    if state.sector == 2 and model.hard_core and state.psi[model.emitter, model.emitter] != 0:
        raise ParameterError("hard-core emitter: initial state has double emitter occupancy")

    one, two = _generator(model)
    f = one if state.sector == 1 else two
    psi = state.psi.copy()
    norm0 = float(np.vdot(psi, psi).real)
    lossless = model.gamma == 0
    h = dt

    for step in range(1, int(steps) + 1):
        k1 = f(psi)
        k2 = f(psi + (0.5 * h) * k1)
        k3 = f(psi + (0.5 * h) * k2)
        k4 = f(psi + h * k3)
        psi = psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % check_every == 0 or step == steps:
            current = LatticeState(psi=psi, time=state.time + step * dt)
            if lossless:
                drift = abs(float(np.vdot(psi, psi).real) - norm0)
                budget = NORM_DRIFT_PER_1E4 * max(1.0, step / 1e4)
                if drift > budget:
                    raise NormDriftError(
                        f"norm drift {drift:.3e} exceeds budget {budget:.3e} after {step} steps",
                        {"step": step, "time": current.time, "drift": drift, "budget": budget, "dt": dt})
            if observer is not None:
                observer(step, current)

    return LatticeState(psi=psi, time=state.time + steps * dt)


# -- one-photon transmission --------------------------------------------------

@dataclass(frozen=True)
class TransmissionRun:
    T: float
    R: float
    residual: float
    steps: int
    dt: float
    time: float
    norm_drift: float
    knobs: dict = field(default_factory=dict)
    psi: np.ndarray | None = field(default=None, repr=False)


def _edge_probability(density: np.ndarray, strip: int) -> float:
    return float(density[:strip].sum() + density[-strip:].sum())


def required_sites(packet: WavePacket, clear_widths: float = CLEAR_WIDTHS) -> int:
    """Smallest chain holding ``packet`` for a full transmission run with the emitter centred."""
    w = packet.width
    return 2 * int(math.ceil((max(START_WIDTHS, clear_widths) + WALL_WIDTHS) * w)) + 2


def transmission_from_run(model: LatticeModel, packet: WavePacket, dt: float | None = None,
                          clear_widths: float = CLEAR_WIDTHS) -> TransmissionRun:
    """Scatter a one-photon packet off the emitter and return (T, R).

    The packet starts ``START_WIDTHS`` widths before the emitter and is
    measured once its free-flight centroid is ``clear_widths`` widths past it.
    Probability still on the emitter and its coupling site is reported as
    ``residual``; it falls like the incident Gaussian's tail at the emitter.
    """
    w = packet.width
    x0 = model.emitter_site_index
    start = x0 - START_WIDTHS * w
    left_extent = max(START_WIDTHS, clear_widths) + WALL_WIDTHS
    if x0 - left_extent * w < 0 or x0 + (clear_widths + WALL_WIDTHS) * w > model.n_sites - 1:
        raise LatticeGeometryError(
            f"n_sites={model.n_sites} cannot hold a packet of width {w:.1f} sites "
            f"(needs about {required_sites(packet, clear_widths)} with the emitter centered)")

    dt = max_stable_dt(model, 1) if dt is None else dt
    v = float(model.group_velocity(packet.k0))
    travel = (START_WIDTHS + clear_widths) * w
    steps = int(math.ceil(travel / v / dt))

    state = one_photon_state(model, packet, start)
    final = evolve(model, state, dt, steps)
    dens = np.abs(final.psi) ** 2
    strip = max(2, int(0.1 * w))
    edge = _edge_probability(dens[:model.n_sites], strip)
    diagnostics = {"edge_probability": edge, "strip_sites": strip, "time": final.time}
    if edge > EDGE_TOLERANCE:
        raise BoundaryContaminationError(f"packet hit the boundary (edge probability {edge:.2e})", diagnostics)

    T = float(dens[x0 + 1:model.n_sites].sum())
    R = float(dens[:x0].sum())
    residual = float(dens[x0] + dens[model.emitter])
    drift = abs(float(dens.sum()) - 1.0)
    knobs = {"dt": dt, "steps": steps, "n_sites": model.n_sites, "width": w, "sigma_k": packet.sigma_k,
             "start_widths": START_WIDTHS, "clear_widths": clear_widths, "wall_widths": WALL_WIDTHS}
    return TransmissionRun(T=T, R=R, residual=residual, steps=steps, dt=dt, time=final.time,
                           norm_drift=drift, knobs=knobs, psi=final.psi)


def packet_averaged_transmission(model: LatticeModel, packet: WavePacket, n: int = 4001) -> float:
    """Exact lattice |t(k)|^2 averaged over the packet's spectral weight."""
    s = packet.sigma_k
    k = np.linspace(packet.k0 - 8 * s, packet.k0 + 8 * s, n)
    weight = np.exp(-((k - packet.k0) ** 2) / (2 * s * s))
    T = np.abs(exact_lattice_transmission(model, k)) ** 2
    return float(trapezoid(weight * T, k) / trapezoid(weight, k))


# -- two-photon scattering ------------------------------------------------------

@dataclass(frozen=True)
class TwoPhotonField:
    """Joint amplitude after scattering and its coincidence profiles.

    ``separation`` holds x1 - x2 in sites.  ``tt``/``rr`` are diagonal sums
    of |psi|^2 over the transmitted-transmitted / reflected-reflected
    quadrants; ``tt_norm``/``rr_norm`` divide by the same sums of the product
    of one-photon marginals, so an uncorrelated pair gives 1.
    """

    psi: np.ndarray
    separation: np.ndarray
    tt: np.ndarray
    rr: np.ndarray
    tt_norm: np.ndarray
    rr_norm: np.ndarray
    time: float
    max_double_occupancy: float
    knobs: dict = field(default_factory=dict)


def _diagonal_sums(block: np.ndarray, max_sep: int) -> np.ndarray:
    return np.array([np.trace(block, offset=-d) for d in range(-max_sep, max_sep + 1)])


def _profiles(dens: np.ndarray, max_sep: int) -> tuple[np.ndarray, np.ndarray]:
    marginal = dens.sum(axis=1)
    product = np.outer(marginal, marginal)
    raw = _diagonal_sums(dens, max_sep)
    ref = _diagonal_sums(product, max_sep)
    with np.errstate(invalid="ignore", divide="ignore"):
        normed = np.where(ref > 0, raw / ref * product.sum() / dens.sum(), np.nan)
    return raw, normed


def two_photon_g2_map(model: LatticeModel, packet: WavePacket, dt: float | None = None,
                      max_separation: int | None = None, margin: int = 2) -> TwoPhotonField:
    """Scatter a two-photon packet and extract TT and RR coincidence profiles.

    Sites within ``margin`` of the emitter are excluded from both quadrants.
    """
    if not model.hard_core and model.U == 0:
        raise ParameterError("two-photon map needs an interacting emitter (U > 0 or hard-core)")
    w = packet.width + abs(packet.separation) / 2.0
    x0 = model.emitter_site_index
    start = x0 - START_WIDTHS * w
    if start - WALL_WIDTHS * w < 0 or x0 + (CLEAR_WIDTHS + WALL_WIDTHS) * w > model.n_sites - 1:
        raise LatticeGeometryError(
            f"n_sites={model.n_sites} too small for a two-photon packet of extent {w:.1f} sites")

    dt = max_stable_dt(model, 2) if dt is None else dt
    v = float(model.group_velocity(packet.k0))
    steps = int(math.ceil((START_WIDTHS + CLEAR_WIDTHS) * w / v / dt))
    state = two_photon_state(model, packet, start)

    e = model.emitter
    peak = [0.0]

    def watch(step, s):
        peak[0] = max(peak[0], float(abs(s.psi[e, e])))

    final = evolve(model, state, dt, steps, check_every=max(1, min(1000, steps // 200)), observer=watch)
    dens = np.abs(final.psi) ** 2

    n = model.n_sites
    site_dens = dens[:n, :n].sum(axis=1)
    strip = max(2, int(0.1 * packet.width))
    edge = _edge_probability(site_dens, strip)
    diagnostics = {"edge_probability": edge, "strip_sites": strip, "time": final.time}
    if edge > EDGE_TOLERANCE:
        raise BoundaryContaminationError(
            f"two-photon packet hit the boundary (edge probability {edge:.2e})", diagnostics)

    right = slice(x0 + 1 + margin, n)
    left = slice(0, x0 - margin)
    max_sep = int(max_separation or min(n - x0 - 1 - margin, x0 - margin) - 1)
    tt, tt_norm = _profiles(dens[right, right], max_sep)
    rr, rr_norm = _profiles(dens[left, left], max_sep)
    knobs = {"dt": dt, "steps": steps, "n_sites": n, "width": packet.width, "sigma_k": packet.sigma_k,
             "U": "hard-core" if model.hard_core else model.U, "margin": margin}
    return TwoPhotonField(psi=final.psi, separation=np.arange(-max_sep, max_sep + 1),
                          tt=tt, rr=rr, tt_norm=tt_norm, rr_norm=rr_norm, time=final.time,
                          max_double_occupancy=peak[0], knobs=knobs)


def with_coupling(model: LatticeModel, **changes) -> LatticeModel:
    return replace(model, **changes)


def double_occupancy_sweep(model: LatticeModel, packet: WavePacket, U_values,
                           dt: float | None = None) -> dict:
    """Peak emitter double-occupancy amplitude |psi[e, e]| during a resonant pass, per U.

    Checks that finite-U runs approach the hard-core limit (amplitude -> 0 as U grows).
    The packet is launched ``START_WIDTHS`` widths before the emitter and followed
    until its centroid has moved ``2 * START_WIDTHS`` widths, long enough to clear it.
    """
    v = float(model.group_velocity(packet.k0))
    start = model.emitter_site_index - START_WIDTHS * packet.width
    if start < 0:
        raise LatticeGeometryError(f"n_sites={model.n_sites} too small for packet width {packet.width:.1f}")
    e = model.emitter
    result = {}
    for U in U_values:
        m = replace(model, U=float(U))
        step = max_stable_dt(m, 2) if dt is None else dt
        steps = int(math.ceil(2 * START_WIDTHS * packet.width / v / step))
        peak = [0.0]

        def watch(i, s):
            peak[0] = max(peak[0], float(abs(s.psi[e, e])))

        evolve(m, two_photon_state(m, packet, start), step, steps, check_every=10, observer=watch)
        result[float(U)] = peak[0]
    return result
