import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import lindblad_reflection
from wqed import analytic2le as a2
from wqed import router3le as rt
from wqed.core import EmitterParams, ThreeLevelParams, make_grid

FIG7 = dict(gamma_s=1 / 40, Delta_c=-0.5)
FIG7_BASE = EmitterParams(gamma=0.25, Gamma=1.0)


def fig7(Omega_c):
    return ThreeLevelParams(base=FIG7_BASE, Omega_c=Omega_c, **FIG7)


def test_chi_control_off():
    p = ThreeLevelParams(base=EmitterParams(gamma=0.3), Omega_c=0.0)
    assert rt.susceptibility_chi(p, 1.2) == 1.2 + 0.3j


def test_chi_pole_is_divergent_not_nan():
    p = ThreeLevelParams(base=EmitterParams(), gamma_s=0.0, Omega_c=2.0, Delta_c=0.5)
    chi = rt.susceptibility_chi(p, 0.5)
    assert chi == rt.DIVERGENT
    assert not math.isnan(chi.imag)


def test_chi_substitution():
    g, Oc = 0.4, 1.7
    p = ThreeLevelParams(base=EmitterParams(gamma=g), gamma_s=g, Omega_c=Oc, Delta_c=0.0)
    expected = 1j * g - Oc ** 2 / (4j * g)
    assert rt.susceptibility_chi(p, 0.0) == pytest.approx(expected, abs=1e-15)


@settings(max_examples=50)
@given(gamma=st.floats(0, 5), Gamma=st.floats(0.01, 5), seed=st.integers(0, 2**31))
def test_reduces_to_two_level(gamma, Gamma, seed):
    base = EmitterParams(gamma=gamma, Gamma=Gamma)
    grid = np.sort(np.random.default_rng(seed).uniform(-10, 10, 50))
    s = rt.router_amplitudes(ThreeLevelParams(base=base, gamma_s=0.3, Omega_c=0.0, Delta_c=0.2), grid)
    amps = a2.one_photon_amplitudes(base, grid)
    np.testing.assert_allclose(s.t, amps.t, rtol=0, atol=1e-14)
    np.testing.assert_allclose(s.r, amps.r, rtol=0, atol=1e-14)


def test_raman_resonance_transparent():
    p = ThreeLevelParams(base=EmitterParams(gamma=0.25), gamma_s=0.0, Omega_c=1.0, Delta_c=-0.5)
    s = rt.router_amplitudes(p, np.array([-0.5]))
    assert s.t[0] == 1
    assert s.r[0] == 0


def test_control_off_is_perfect_mirror_dip():
    s = rt.router_amplitudes(ThreeLevelParams(base=EmitterParams(), Omega_c=0.0), np.array([-1.0, 0.0, 1.0]))
    assert s.R[1] == 1.0
    assert s.T[1] == 0.0
    assert s.R[0] < 1 and s.R[2] < 1


def test_eit_transparency_peak():
    p = ThreeLevelParams(base=FIG7_BASE, gamma_s=1 / 40, Omega_c=0.5, Delta_c=0.0)
    s = rt.router_amplitudes(p, np.array([-1.0, 0.0, 1.0]))
    assert s.T[1] > s.T[0] and s.T[1] > s.T[2]


@pytest.mark.parametrize("Omega_c", [4.0, 8.0])
def test_ats_splitting_fig7(Omega_c):
    split = rt.ats_splitting(fig7(Omega_c))
    assert 0.9 * Omega_c <= split <= 1.1 * Omega_c


def test_ats_splitting_dense_grid_oracle():
    p = fig7(4.0)
    d = np.linspace(-12, 12, 240001)
    T = rt.router_amplitudes(p, d).T
    inner = np.nonzero((T[1:-1] < T[:-2]) & (T[1:-1] < T[2:]))[0] + 1
    deepest = inner[np.argsort(T[inner])[:2]]
    assert rt.ats_splitting(p) == pytest.approx(abs(d[deepest[1]] - d[deepest[0]]), abs=2e-4)


def test_ats_no_doublet():
    with pytest.raises(rt.NoDoubletError, match="no doublet found"):
        rt.ats_splitting(fig7(0.0))


def test_ats_weak_drive_flagged():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            rt.ats_splitting(fig7(1.0))
        except rt.NoDoubletError:
            pass
    assert any(issubclass(w.category, rt.WeakDriveWarning) for w in caught)


# -- driven qubit -------------------------------------------------------------------

def test_qubit_gamma2():
    assert rt.DrivenQubitParams(Gamma1=2.0, Gamma_phi=0.3).Gamma2 == pytest.approx(1.3)


@pytest.mark.parametrize("r0", [-0.1, 1.1])
def test_qubit_rejects_r0(r0):
    with pytest.raises(ValueError):
        rt.DrivenQubitParams(Gamma1=1.0, r0=r0)


def test_qubit_weak_probe_resonance():
    r, t = rt.driven_qubit_steady_state(rt.DrivenQubitParams(Gamma1=1.0, r0=0.8), 0.0)
    assert r == 0.8
    assert t == pytest.approx(0.2)


def test_qubit_half_saturation():
    G1, Gphi = 1.0, 0.2
    G2 = G1 / 2 + Gphi
    q = rt.DrivenQubitParams(Gamma1=G1, Gamma_phi=Gphi, Omega=math.sqrt(G1 * G2), r0=0.9)
    r, _ = rt.driven_qubit_steady_state(q, 0.0)
    assert r == pytest.approx(0.45, abs=1e-15)


@given(G1=st.floats(0.01, 10), Gphi=st.floats(0, 10), Om=st.floats(0, 10), d=st.floats(-50, 50),
       r0=st.floats(0, 1))
def test_qubit_t_plus_r(G1, Gphi, Om, d, r0):
    r, t = rt.driven_qubit_steady_state(rt.DrivenQubitParams(G1, Gphi, Om, r0), d)
    assert t + r == 1


@pytest.mark.parametrize("q, d", [
    (rt.DrivenQubitParams(Gamma1=1.0, Omega=1.0), 0.5 * 0.5),
    (rt.DrivenQubitParams(Gamma1=1.0, Gamma_phi=3.0, Omega=0.7), 1.3),
    (rt.DrivenQubitParams(Gamma1=2.0, Gamma_phi=0.4, Omega=0.0, r0=0.6), -0.9),
])
def test_bloch_oracle_points(q, d):
    closed, _ = rt.driven_qubit_steady_state(q, d)
    solved, _ = rt.bloch_steady_state_oracle(q, d)
    assert solved == pytest.approx(closed, abs=1e-8)


def test_bloch_oracle_weak_drive_grid():
    q = rt.DrivenQubitParams(Gamma1=1.0, Gamma_phi=0.1, Omega=1e-9)
    d = np.linspace(-10, 10, 41)
    np.testing.assert_allclose(rt.bloch_steady_state_oracle(q, d)[0], rt.driven_qubit_steady_state(q, d)[0],
                               atol=1e-12)


@settings(max_examples=100)
@given(G1=st.floats(0.05, 5), Gphi=st.floats(0, 5), Om=st.floats(0.01, 5), d=st.floats(-10, 10),
       r0=st.floats(0, 1))
def test_lindblad_oracle_agrees(G1, Gphi, Om, d, r0):
    q = rt.DrivenQubitParams(G1, Gphi, Om, r0)
    closed, _ = rt.driven_qubit_steady_state(q, d)
    assert lindblad_reflection(G1, Gphi, Om, d, r0) == pytest.approx(closed, abs=1e-9)
    solved, t = rt.bloch_steady_state_oracle(q, d)
    assert solved == pytest.approx(closed, abs=1e-8)
    assert solved + t == 1


def test_bloch_singular_reported():
    with pytest.raises(rt.SingularSystemError):
        rt.bloch_steady_state_oracle(rt.DrivenQubitParams(Gamma1=0.0), 0.0)


def test_qubit_closed_form_needs_decay():
    with pytest.raises(ValueError):
        rt.driven_qubit_steady_state(rt.DrivenQubitParams(Gamma1=0.0), 0.0)


def test_weak_drive_shape_matches_emitter_reflection():
    # Gamma1 = 2 Gamma and Gamma_phi = gamma give Gamma2 = gamma + Gamma.
    Gamma, gamma = 1.0, 0.3
    q = rt.DrivenQubitParams(Gamma1=2 * Gamma, Gamma_phi=gamma, Omega=0.0)
    d = make_grid(-5, 5, 101).values
    rq = np.abs(rt.driven_qubit_steady_state(q, d)[0])
    re = np.abs(a2.one_photon_amplitudes(EmitterParams(gamma=gamma, Gamma=Gamma), d).r)
    np.testing.assert_allclose(rq / rq.max(), re / re.max(), rtol=1e-13)
