"""Unitary oscillator-qubit coupling ``H = w a^dag a + g (a + a^dag) sigma_z`` and its interferometric signal."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DomainError, InvalidStateError, TruncationError
from .operators import (
    KET_PLUS,
    DensityState,
    OperatorMatrix,
    coherent_amplitudes,
    coherent_norm_deficit,
    displacement,
    fock_operators,
    sigma_y,
)

PROPAGATOR_MAX_DEFICIT = 1e-8

# exp(+i pi/4 sigma_y): maps |+> to |L>, so an unevolved probe reads P(L) = 1.
PI_HALF_PULSE = sla.expm(0.25j * np.pi * sigma_y().data)
_PROJ_L = np.diag([1.0, 0.0]).astype(complex)
_PROJ_R = np.diag([0.0, 1.0]).astype(complex)


@dataclass(frozen=True)
class CoherentParams:
    """Oscillator frequency and coupling, both in rad/s.

    ``qubit_splitting`` is zero in the rotating frame of the qubit, which is
    the convention everywhere in this package.
    """

    omega: float
    g: float
    qubit_splitting: float = 0.0

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError(f"omega must be positive, got {self.omega}")

    @property
    def lam(self) -> float:
        return self.g / self.omega


def _check_truncation(dim, amp):
    deficit = coherent_norm_deficit(dim, amp)
    if deficit > PROPAGATOR_MAX_DEFICIT:
        raise TruncationError(
            f"dim={dim} cannot hold a displacement of {abs(amp):.3g} (norm deficit {deficit:.2e})"
        )


def conditional_displacement(lam: float, dim: int) -> np.ndarray:
    """``D(sigma_z lam) = D(lam) (x) |L><L| + D(-lam) (x) |R><R|``."""
    return np.kron(displacement(dim, lam).data, _PROJ_L) + np.kron(displacement(dim, -lam).data, _PROJ_R)


def propagator(params: CoherentParams, t: float, dim: int) -> OperatorMatrix:
    """``U(t) = D^dag(sigma_z lam) exp(-i w a^dag a t) D(sigma_z lam)``, exact up to a global phase."""
    _check_truncation(dim, 2 * params.lam)
    dc = conditional_displacement(params.lam, dim)
    free = np.exp(-1j * params.omega * t * np.arange(dim))
    qubit = np.exp(-0.5j * params.qubit_splitting * t * np.array([1.0, -1.0]))
    phases = np.kron(free, qubit)
    u = dc.conj().T @ (phases[:, None] * dc)
    return OperatorMatrix(u, (dim, 2))


def coherent_hamiltonian(params: CoherentParams, dim: int) -> OperatorMatrix:
    _, _, x = fock_operators(dim)
    n = np.diag(np.arange(dim, dtype=float))
    sz = np.diag([1.0, -1.0])
    h = params.omega * np.kron(n, np.eye(2)) + params.g * np.kron(x.data, sz)
    h = h + 0.5 * params.qubit_splitting * np.kron(np.eye(dim), sz)
    return OperatorMatrix(h, (dim, 2))


def probe_initial_state(oscillator_state: DensityState) -> np.ndarray:
    """Joint density matrix ``rho_osc (x) |+><+|``."""
    if len(oscillator_state.dims) != 1:
        raise InvalidStateError(f"expected an oscillator-only state, got dims {oscillator_state.dims}")
    return np.kron(oscillator_state.data, np.outer(KET_PLUS, KET_PLUS.conj()))


def population_L_after_pulse(rho: np.ndarray, dim: int) -> float:
    """Apply the pi/2 pulse to the qubit and return the |L> population."""
    r = rho.reshape(dim, 2, dim, 2)
    qubit = np.einsum("iaib->ab", r)
    qubit = PI_HALF_PULSE @ qubit @ PI_HALF_PULSE.conj().T
    return float(qubit[0, 0].real)


def protocol_signal_numeric(params: CoherentParams, oscillator_state: DensityState, t):
    """Numerically run the probe protocol and return P(L) at time(s) ``t``.

    Prepares ``(|L> + |R>)/sqrt(2)`` on the qubit, evolves the joint state
    with :func:`propagator`, applies the pi/2 pulse and reads out ``|L>``.
    The oscillator state is evolved as a density matrix, which is exact for
    diagonal (number-state) mixtures such as thermal states.
    """
    dim = oscillator_state.dims[0] if len(oscillator_state.dims) == 1 else None
    if dim is None:
        raise InvalidStateError(f"expected an oscillator-only state, got dims {oscillator_state.dims}")
    rho0 = probe_initial_state(oscillator_state)
    times = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(times.shape)
    for k, tk in enumerate(times):
        u = propagator(params, tk, dim).data
        out[k] = population_L_after_pulse(u @ rho0 @ u.conj().T, dim)
    return float(out[0]) if np.ndim(t) == 0 else out


def signal_ground(params: CoherentParams, t):
    """``(1 + exp(-8 lam^2 sin^2(w t / 2))) / 2`` for the oscillator ground state."""
    s = np.sin(0.5 * params.omega * np.asarray(t, dtype=float)) ** 2
    return 0.5 * (1.0 + np.exp(-8.0 * params.lam ** 2 * s))


def thermal_occupation_factor(nbar: float, convention: str = "exact") -> float:
    """Multiplier of ``8 lam^2 sin^2`` for a thermal oscillator.

    ``"exact"`` is ``2 nbar + 1``, the value the unitary protocol actually
    produces (thermal characteristic function ``exp(-|b|^2 (nbar + 1/2))``).
    ``"nbar_plus_one"`` is ``nbar + 1``, an approximate form that agrees
    only at ``nbar = 0``.
    """
    if nbar < 0:
        raise DomainError(f"mean occupation must be >= 0, got {nbar}")
    if convention == "exact":
        return 2.0 * nbar + 1.0
    if convention == "nbar_plus_one":
        return nbar + 1.0
    raise ValueError(f"unknown convention {convention!r}")


def signal_thermal(params: CoherentParams, nbar: float, t, convention: str = "exact"):
    factor = thermal_occupation_factor(nbar, convention)
    s = np.sin(0.5 * params.omega * np.asarray(t, dtype=float)) ** 2
    return 0.5 * (1.0 + np.exp(-8.0 * params.lam ** 2 * factor * s))


def branch_amplitude(params: CoherentParams, t: float) -> complex:
    return params.lam * (np.exp(-1j * params.omega * t) - 1.0)


def entangled_midpoint_state(params: CoherentParams, t: float, dim: int) -> DensityState:
    """``(|delta>|L> + |-delta>|R>)/sqrt(2)`` with ``delta = lam (exp(-i w t) - 1)``."""
    delta = branch_amplitude(params, t)
    _check_truncation(dim, delta)
    psi = np.kron(coherent_amplitudes(dim, delta), [1.0, 0.0]) + np.kron(coherent_amplitudes(dim, -delta), [0.0, 1.0])
    return DensityState.from_ket(psi, (dim, 2))
