import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from loccgrav.coherent import (
    CoherentParams, coherent_hamiltonian, entangled_midpoint_state, propagator, protocol_signal_numeric,
    signal_ground, signal_thermal,
)
from loccgrav.errors import DomainError, TruncationError
from loccgrav.operators import fock_state, negativity, thermal_state

P = CoherentParams(omega=1.0, g=0.05)


def _equal_up_to_phase(u, v, tol):
    k = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    phase = u[k] / v[k]
    return np.max(np.abs(u - phase * v)) < tol and abs(abs(phase) - 1) < tol


def test_params_domain():
    assert P.lam == 0.05
    with pytest.raises(DomainError):
        CoherentParams(omega=0.0, g=0.1)


def test_propagator_limits():
    np.testing.assert_allclose(propagator(P, 0.0, 16).data, np.eye(32), atol=1e-12)
    assert _equal_up_to_phase(propagator(P, 2 * np.pi, 16).data, np.eye(32), 1e-10)
    free = CoherentParams(1.0, 0.0)
    expected = np.kron(np.diag(np.exp(-1j * 0.7 * np.arange(8))), np.eye(2))
    np.testing.assert_allclose(propagator(free, 0.7, 8).data, expected, atol=1e-13)


def test_propagator_matches_hamiltonian_expm():
    # away from the truncation edge the displaced form and expm(-iHt) agree up to a global phase
    dim, t = 30, 1.3
    direct = sla.expm(-1j * coherent_hamiltonian(P, dim).data * t)
    u = propagator(P, t, dim).data
    low = slice(0, 2 * 12)
    assert _equal_up_to_phase(u[low, low], direct[low, low], 1e-9)


def test_truncation_guard():
    with pytest.raises(TruncationError):
        propagator(CoherentParams(1.0, 2.0), 1.0, 6)


def test_protocol_examples():
    assert abs(protocol_signal_numeric(P, thermal_state(20, 0.5), 0.0) - 1) < 1e-12
    ground = protocol_signal_numeric(P, fock_state(32, 0), np.pi)
    assert abs(ground - 0.5 * (1 + np.exp(-0.02))) < 1e-10
    assert abs(protocol_signal_numeric(P, thermal_state(40, 1.0), 2 * np.pi) - 1) < 1e-6


def test_closed_forms():
    k = np.arange(4)
    assert np.all(signal_ground(P, 2 * np.pi * k) == 1.0)
    for nbar in (0, 1, 2):
        assert np.all(signal_thermal(P, nbar, 2 * np.pi * k) == 1.0)
    assert signal_thermal(P, 0, np.pi) == pytest.approx(0.5 * (1 + np.exp(-0.02)), abs=1e-15)
    assert signal_thermal(P, 0, 0.8) == signal_ground(P, 0.8)
    with pytest.raises(DomainError):
        signal_thermal(P, -0.1, 1.0)


@settings(max_examples=40, deadline=None)
@given(t=st.floats(0.05, 2 * np.pi - 0.05), n1=st.floats(0, 3), dn=st.floats(0.01, 2))
def test_monotone_in_nbar(t, n1, dn):
    assert signal_thermal(P, n1 + dn, t) < signal_thermal(P, n1, t)


@settings(max_examples=40, deadline=None)
@given(t=st.floats(0, 20))
def test_closed_form_periodic(t):
    assert abs(signal_thermal(P, 1.0, t) - signal_thermal(P, 1.0, t + 2 * np.pi)) < 1e-9


@pytest.mark.parametrize("nbar", [0.0, 1.0, 2.0])
def test_numeric_matches_closed_form(nbar):
    t = np.linspace(0, 4 * np.pi, 200)
    num = protocol_signal_numeric(P, thermal_state(40, nbar), t)
    assert np.max(np.abs(num - signal_thermal(P, nbar, t))) < 1e-6
    assert np.max(np.abs(num - protocol_signal_numeric(P, thermal_state(40, nbar), t + 2 * np.pi))) < 1e-6


def test_nbar_plus_one_form_differs_from_protocol():
    t = np.linspace(0, 2 * np.pi, 50)
    num = protocol_signal_numeric(P, thermal_state(40, 1.0), t)
    assert np.max(np.abs(num - signal_thermal(P, 1.0, t, convention="nbar_plus_one"))) > 1e-3


def test_contrast_grows_with_nbar():
    t = np.linspace(0, 2 * np.pi, 201)
    contrast = [1 - signal_thermal(P, n, t).min() for n in (0, 1, 2)]
    assert contrast[0] < contrast[1] < contrast[2]


def test_midpoint_negativity():
    assert negativity(entangled_midpoint_state(P, 0.0, 16)).negativity < 1e-12
    assert negativity(entangled_midpoint_state(P, 2 * np.pi, 16)).negativity < 1e-9
    s = np.exp(-2 * (2 * P.lam) ** 2)
    oracle = np.sqrt(1 - s ** 2) / 2
    assert abs(negativity(entangled_midpoint_state(P, np.pi, 16)).negativity - oracle) < 1e-9
    for t in (0.5, 2.0, 4.0):
        assert negativity(entangled_midpoint_state(P, t, 16)).negativity > 0
