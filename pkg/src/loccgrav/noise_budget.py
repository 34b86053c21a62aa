"""Physical-unit estimates: Newtonian coupling, LOCC noise splittings, black-hole heating.

All rates are angular frequencies in rad/s; divide by ``2 pi`` (or use
:meth:`RateReport.in_hz`) to compare with values quoted as ``2 pi x f``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Constants:
    G: float
    hbar: float
    c: float
    amu: float

    @property
    def h(self) -> float:
        return 2 * np.pi * self.hbar


SI = Constants(G=6.674e-11, hbar=1.0546e-34, c=2.9979e8, amu=1.6605e-27)
# same values in cm, g, s
CGS = Constants(G=6.674e-8, hbar=1.0546e-27, c=2.9979e10, amu=1.6605e-24)


@dataclass(frozen=True)
class Scenario:
    m_a: float
    m_b: float
    d: float
    l: float
    omega: float
    label: str = ""

    def __post_init__(self):
        for name in ("m_a", "m_b", "d", "l", "omega"):
            if not getattr(self, name) > 0:
                raise DomainError(f"scenario field {name} must be positive, got {getattr(self, name)}")

    def to_cgs(self) -> "Scenario":
        return Scenario(self.m_a * 1e3, self.m_b * 1e3, self.d * 1e2, self.l * 1e2, self.omega, self.label)


@dataclass(frozen=True)
class RateReport:
    g: float
    gamma_symmetric: float
    gamma_asymmetric: float
    notes: str = ""

    def in_hz(self) -> dict:
        return {k: v / (2 * np.pi) for k, v in
                (("g", self.g), ("gamma_symmetric", self.gamma_symmetric), ("gamma_asymmetric", self.gamma_asymmetric))}


def ground_state_size(m: float, omega: float, constants: Constants = SI) -> float:
    """``x0 = sqrt(hbar / (2 omega m))``."""
    return float(np.sqrt(constants.hbar / (2 * omega * m)))


def coupling_g(s: Scenario, constants: Constants = SI) -> float:
    """``g = G m_a m_b l x0 / (hbar d^3)``."""
    x0 = ground_state_size(s.m_a, s.omega, constants)
    return constants.G * s.m_a * s.m_b * s.l * x0 / (constants.hbar * s.d ** 3)


def asymmetric_rate(M: float, d: float, omega: float, constants: Constants = SI) -> float:
    """Heating rate depending only on the particle's own mass: ``G M^2 x0^2 / (2 hbar d^3)``."""
    if min(M, d, omega) <= 0:
        raise DomainError("mass, distance and frequency must be positive")
    x0 = ground_state_size(M, omega, constants)
    return constants.G * M ** 2 * x0 ** 2 / (2 * constants.hbar * d ** 3)


def symmetric_split(s: Scenario, constants: Constants = SI) -> RateReport:
    """Minimal-total-noise split ``2 alpha^2 = beta^2 / 2 = g / 2``."""
    g = coupling_g(s, constants)
    return RateReport(
        g=g,
        gamma_symmetric=0.5 * g,
        gamma_asymmetric=asymmetric_rate(s.m_a, s.d, s.omega, constants),
        notes=f"{s.label}: gamma_symmetric = g/2; gamma_asymmetric uses m_a and d",
    )


def symmetric_strengths(s: Scenario, constants: Constants = SI):
    """``(alpha, beta)`` with ``2 alpha^2 = beta^2 / 2 = g / 2``."""
    gamma = 0.5 * coupling_g(s, constants)
    return float(np.sqrt(gamma / 2)), float(np.sqrt(2 * gamma))


def compton_wavelength(m: float, reduced: bool = False, constants: Constants = SI) -> float:
    """``h / (m c)``, or ``hbar / (m c)`` when ``reduced``."""
    return (constants.hbar if reduced else constants.h) / (m * constants.c)


def schwarzschild_radius(M: float, constants: Constants = SI) -> float:
    return 2 * constants.G * M / constants.c ** 2


@dataclass(frozen=True)
class BlackHoleComparison:
    mass: float
    locc_heating: float
    hawking_power: float
    ratio: float


def locc_heating_at_radius(M: float, r: float, constants: Constants = SI) -> float:
    """``d<p^2/2M>/dt = G M^2 hbar / (M r^3)``."""
    return constants.G * M ** 2 * constants.hbar / (M * r ** 3)


def blackhole_comparison(M: float, constants: Constants = SI) -> BlackHoleComparison:
    """LOCC heating at the Schwarzschild radius vs. photon-only Hawking power (W)."""
    if not M > 0:
        raise DomainError("mass must be positive")
    k = constants.hbar * constants.c ** 6 / (M ** 2 * constants.G ** 2)
    heating = k / 8
    hawking = k / (15360 * np.pi)
    return BlackHoleComparison(M, heating, hawking, heating / hawking)


def load_presets() -> dict:
    text = resources.files("loccgrav").joinpath("scenarios.json").read_text()
    return json.loads(text)


def _length(value, m):
    if value == "compton":
        return compton_wavelength(m, reduced=False)
    if value == "compton_reduced":
        return compton_wavelength(m, reduced=True)
    if value == "schwarzschild":
        return schwarzschild_radius(m)
    return float(value)


def load_scenario(label: str, **overrides) -> Scenario:
    """Build a preset Scenario in SI units; keyword overrides replace raw preset fields.

    Use :meth:`Scenario.to_cgs` together with ``CGS`` for the other unit system.
    """
    presets = load_presets()
    if label not in presets:
        raise KeyError(f"unknown scenario {label!r}; known: {sorted(presets)}")
    raw = {**presets[label], **overrides}
    if "m_a" in raw:
        m_a = float(raw["m_a"])
    else:
        m_a = 4 / 3 * np.pi * raw["radius_a"] ** 3 * raw["density"]
    if "m_b_amu" in raw:
        m_b = raw["m_b_amu"] * SI.amu
    elif "m_b" in raw:
        m_b = float(raw["m_b"])
    else:
        m_b = 4 / 3 * np.pi * raw["radius_b"] ** 3 * raw["density"]
    return Scenario(
        m_a=m_a,
        m_b=m_b,
        d=_length(raw["d"], m_a),
        l=_length(raw["l"], m_a),
        omega=float(raw["omega"]),
        label=label,
    )
