import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import trapezoid

from wqed.core import (
    CoherentInput, DetuningGrid, EmitterParams, ParameterError, ThreeLevelParams, Units,
    emitter_units, make_grid, scale_emitter, unscale_emitter,
)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
positive = st.floats(1e-6, 1e6, allow_nan=False, allow_infinity=False)
bad = st.sampled_from([math.nan, math.inf, -math.inf])


def test_make_grid_integer_steps():
    np.testing.assert_array_equal(make_grid(-5, 5, 11).values, np.arange(-5.0, 6.0))


def test_make_grid_endpoints_only():
    np.testing.assert_array_equal(make_grid(0, 1, 2).values, [0.0, 1.0])


@pytest.mark.parametrize("args", [(1, 1, 5), (2, 1, 5), (0, 1, 1), (0, math.inf, 3), (math.nan, 1, 3), (0, 1, 2.5)])
def test_make_grid_rejects(args):
    with pytest.raises(ParameterError):
        make_grid(*args)


def test_detuning_grid_is_read_only_and_increasing():
    g = DetuningGrid([0.0, 1.0, 3.0])
    with pytest.raises(ValueError):
        g.values[0] = 5.0
    with pytest.raises(ParameterError):
        DetuningGrid([0.0, 0.0])
    with pytest.raises(ParameterError):
        DetuningGrid([0.0, math.nan])


@given(Gamma=positive, v_g=positive)
def test_coupling_consistency(Gamma, v_g):
    p = EmitterParams(Gamma=Gamma, v_g=v_g)
    assert p.V ** 2 / p.v_g == pytest.approx(Gamma, rel=1e-14)


@given(value=bad, field=st.sampled_from(["omega_e", "gamma", "Gamma", "v_g"]))
def test_emitter_rejects_non_finite(value, field):
    with pytest.raises(ParameterError):
        EmitterParams(**{field: value})


@given(value=st.floats(-1e6, -1e-9), field=st.sampled_from(["gamma", "Gamma", "v_g"]))
def test_emitter_rejects_negative_rates(value, field):
    with pytest.raises(ParameterError):
        EmitterParams(**{field: value})


def test_emitter_rejects_zero_coupling():
    with pytest.raises(ParameterError):
        EmitterParams(Gamma=0.0)


@given(value=st.floats(-1e6, -1e-9), field=st.sampled_from(["gamma_s", "Omega_c"]))
def test_three_level_rejects_negative(value, field):
    with pytest.raises(ParameterError):
        ThreeLevelParams(**{field: value})


def test_detuning_and_wavevector_are_inverse():
    p = EmitterParams(omega_e=10.0, Gamma=2.0, v_g=3.0)
    k = np.linspace(0, 10, 7)
    np.testing.assert_allclose(p.wavevector(p.detuning(k)), k, rtol=1e-14, atol=1e-14)
    assert p.detuning(p.omega_e / p.v_g) == 0.0


def test_from_coupling():
    p = EmitterParams.from_coupling(V=2.0, v_g=4.0)
    assert p.Gamma == 1.0


def test_coherent_input_policy():
    with pytest.raises(ParameterError):
        CoherentInput(k0=1.0, Delta_k=0.1, n_bar=2.0)
    CoherentInput(k0=1.0, Delta_k=0.1, n_bar=2.0, allow_high_intensity=True)
    with pytest.raises(ParameterError):
        CoherentInput(k0=1.0, Delta_k=0.0)


def test_coherent_amplitude_normalized():
    inp = CoherentInput(k0=3.0, Delta_k=0.4, n_bar=0.5)
    k = np.linspace(*inp.support(10), 20001)
    assert trapezoid(inp.amplitude(k) ** 2, k) == pytest.approx(0.5, rel=1e-10)


@given(rate=positive, length=positive, value=finite,
       rp=st.integers(-2, 2), lp=st.integers(-2, 2))
def test_units_round_trip(rate, length, value, rp, lp):
    u = Units(rate=rate, length=length)
    back = u.from_dimensionless(u.to_dimensionless(value, rp, lp), rp, lp)
    assert back == pytest.approx(value, rel=1e-12, abs=1e-300)


@given(omega_e=finite, gamma=positive, Gamma=positive, v_g=positive)
def test_emitter_scaling_round_trip(omega_e, gamma, Gamma, v_g):
    p = EmitterParams(omega_e=omega_e, gamma=gamma, Gamma=Gamma, v_g=v_g)
    u = emitter_units(p)
    s = scale_emitter(p, u)
    assert s.Gamma == pytest.approx(1.0, rel=1e-14)
    assert s.v_g == pytest.approx(1.0, rel=1e-14)
    back = unscale_emitter(s, u)
    for name in ("omega_e", "gamma", "Gamma", "v_g"):
        assert getattr(back, name) == pytest.approx(getattr(p, name), rel=1e-12, abs=1e-300)
