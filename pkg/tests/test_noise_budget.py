import math
from dataclasses import replace

import numpy as np
import pytest

from loccgrav.errors import DomainError
from loccgrav.noise_budget import (
    CGS, SI, Scenario, asymmetric_rate, blackhole_comparison, compton_wavelength, coupling_g, load_presets,
    load_scenario, locc_heating_at_radius, schwarzschild_radius, symmetric_split, symmetric_strengths,
)

TWO_PI = 2 * math.pi


def within_order(value, target):
    return 0.1 <= value / target <= 10


def test_silica_coupling_hand_calculation():
    s = load_scenario("silica_pair")
    m_a = 4 / 3 * math.pi * (1e-6) ** 3 * 2650
    m_b = 4 / 3 * math.pi * (1e-7) ** 3 * 2650
    x0 = math.sqrt(1.0546e-34 / (2 * TWO_PI * 100 * m_a))
    g = 6.674e-11 * m_a * m_b * 1e-6 * x0 / (1.0546e-34 * (2e-6) ** 3)
    assert coupling_g(s) == pytest.approx(g, rel=1e-12)
    assert g == pytest.approx(2.68e-8, rel=1e-2)


def test_scaling_laws():
    s = load_scenario("silica_pair")
    assert coupling_g(replace(s, d=2 * s.d)) == pytest.approx(coupling_g(s) / 8, rel=1e-14)
    assert coupling_g(replace(s, m_b=2 * s.m_b)) == pytest.approx(2 * coupling_g(s), rel=1e-14)


@pytest.mark.parametrize("label", ["mg_atom", "silica_pair", "neutron"])
def test_split_invariants(label):
    s = load_scenario(label)
    r = symmetric_split(s)
    assert r.gamma_symmetric == coupling_g(s) / 2
    assert r.gamma_symmetric >= 0 and r.gamma_asymmetric >= 0
    alpha, beta = symmetric_strengths(s)
    assert 2 * alpha ** 2 == pytest.approx(r.gamma_symmetric, rel=1e-14)
    assert beta ** 2 / 2 == pytest.approx(r.gamma_symmetric, rel=1e-14)
    assert r.in_hz()["g"] == pytest.approx(r.g / TWO_PI)


@pytest.mark.parametrize("label", ["mg_atom", "silica_pair", "neutron"])
def test_unit_system_invariance(label):
    s = load_scenario(label)
    a, b = symmetric_split(s), symmetric_split(s.to_cgs(), CGS)
    assert b.g == pytest.approx(a.g, rel=1e-12)
    assert b.gamma_asymmetric == pytest.approx(a.gamma_asymmetric, rel=1e-12)
    assert compton_wavelength(s.m_a * 1e3, constants=CGS) == pytest.approx(100 * compton_wavelength(s.m_a), rel=1e-12)
    bh_si, bh_cgs = blackhole_comparison(10.0), blackhole_comparison(1e4, CGS)
    assert bh_cgs.locc_heating == pytest.approx(bh_si.locc_heating * 1e7, rel=1e-12)
    assert bh_cgs.ratio == pytest.approx(bh_si.ratio, rel=1e-12)


def test_quoted_orders_of_magnitude():
    assert within_order(symmetric_split(load_scenario("silica_pair")).gamma_symmetric, TWO_PI * 1e-8)
    mg = symmetric_split(load_scenario("mg_atom"))
    assert within_order(mg.gamma_symmetric, TWO_PI * 1e-15)
    assert within_order(mg.gamma_asymmetric, TWO_PI * 1e-6)
    assert within_order(symmetric_split(load_scenario("neutron")).gamma_asymmetric, TWO_PI * 2.9e3)
    reduced = load_scenario("neutron", d="compton_reduced", l="compton_reduced")
    assert not within_order(symmetric_split(reduced).gamma_asymmetric, TWO_PI * 2.9e3)


def test_compton_and_schwarzschild():
    m = 1.675e-27
    assert compton_wavelength(m) == pytest.approx(TWO_PI * compton_wavelength(m, reduced=True))
    assert compton_wavelength(m) == pytest.approx(1.3197e-15, rel=1e-3)
    assert schwarzschild_radius(1.989e30) == pytest.approx(2954, rel=1e-3)


@pytest.mark.parametrize("M", [10.0, 1.989e30, 3.7e12])
def test_blackhole(M):
    b = blackhole_comparison(M)
    assert b.ratio == pytest.approx(1920 * math.pi, rel=1e-12)
    assert blackhole_comparison(2 * M).locc_heating / b.locc_heating == pytest.approx(0.25, rel=1e-12)
    assert locc_heating_at_radius(M, schwarzschild_radius(M)) == pytest.approx(b.locc_heating, rel=1e-12)


def test_errors_and_presets():
    assert set(load_presets()) == {"mg_atom", "silica_pair", "neutron", "solar_mass_bh"}
    with pytest.raises(KeyError):
        load_scenario("nope")
    with pytest.raises(DomainError):
        Scenario(1.0, 1.0, -1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        blackhole_comparison(0.0)
    with pytest.raises(DomainError):
        asymmetric_rate(1.0, 1.0, 0.0)
    assert load_scenario("silica_pair", omega=1.0).omega == 1.0
