"""Unconditional LOCC master equation and its fixed-step RK4 integration."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .coherent import population_L_after_pulse, probe_initial_state
from .errors import IntegrationError, PreconditionError
from .operators import MAX_NORM_DEFICIT, DensityState, OperatorMatrix, fock_operators, thermal_state

CONVENTIONS = ("feedback", "doubled", "reversed_drift")


@dataclass(frozen=True, eq=False)
class LindbladGenerator:
    """``drho/dt = -i[H, rho] + sum_k rate_k D[A_k] rho`` (hbar = 1)."""

    hamiltonian: OperatorMatrix
    jumps: tuple = ()
    reference_frequency: float | None = None

    def __post_init__(self):
        if not self.hamiltonian.is_hermitian(1e-12):
            raise PreconditionError("Hamiltonian is not Hermitian within 1e-12")
        jumps = tuple((op, float(rate)) for op, rate in self.jumps)
        for op, rate in jumps:
            if rate < 0:
                raise PreconditionError(f"negative jump rate {rate}")
            if op.dims != self.hamiltonian.dims:
                raise PreconditionError(f"jump operator dims {op.dims} differ from {self.hamiltonian.dims}")
        object.__setattr__(self, "jumps", jumps)

    @property
    def dims(self):
        return self.hamiltonian.dims

    def effective_hamiltonian(self) -> np.ndarray:
        heff = self.hamiltonian.data.astype(complex)
        for op, rate in self.jumps:
            heff = heff - 0.5j * rate * (op.data.conj().T @ op.data)
        return heff

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return _Rhs(self)(rho)

    def without_jumps(self) -> "LindbladGenerator":
        return replace(self, jumps=())

    def norm_estimate(self) -> float:
        total = np.linalg.norm(self.hamiltonian.data, 2)
        for op, rate in self.jumps:
            total += rate * np.linalg.norm(op.data, 2) ** 2
        return float(total)


class _Rhs:
    def __init__(self, gen: LindbladGenerator):
        self.heff = gen.effective_hamiltonian()
        self.heff_dag = self.heff.conj().T
        self.ops = [(np.sqrt(rate) * op.data, np.sqrt(rate) * op.data.conj().T) for op, rate in gen.jumps if rate > 0]

    def __call__(self, rho):
        out = -1j * (self.heff @ rho - rho @ self.heff_dag)
        for a, ad in self.ops:
            out += a @ rho @ ad
        return out


@dataclass(frozen=True)
class LoccParams:
    """Measurement strengths on the oscillator (``alpha``) and qubit (``beta``), in units of sqrt(rad/s)."""

    alpha: float
    beta: float
    omega: float = 1.0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise PreconditionError("measurement strengths must be non-negative")
        if not self.omega > 0:
            raise PreconditionError("omega must be positive")

    @classmethod
    def equal_rates(cls, omega: float = 1.0) -> "LoccParams":
        """Coupling and both dissipator rates equal to ``0.05 omega`` under the feedback convention."""
        return cls(alpha=np.sqrt(0.025 * omega), beta=np.sqrt(0.1 * omega), omega=omega)

    def coupling(self, convention: str = "feedback") -> float:
        """Coefficient of ``x sigma_z`` in the Hamiltonian part of the generator."""
        _check_convention(convention)
        return (2.0 if convention == "doubled" else 1.0) * self.alpha * self.beta

    def local_drift(self, convention: str = "feedback") -> float:
        """Coefficient of ``x (x) 1`` in the Hamiltonian part."""
        _check_convention(convention)
        return (-1.0 if convention == "reversed_drift" else 1.0) * self.alpha * self.beta

    @property
    def rate_x(self) -> float:
        return 2.0 * self.alpha ** 2

    @property
    def rate_z(self) -> float:
        return 0.5 * self.beta ** 2


def _check_convention(convention):
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def locc_operators(dim: int):
    """Full-space ``(a^dag a (x) 1, x (x) 1, 1 (x) sigma_z)``."""
    _, _, x = fock_operators(dim)
    n = np.diag(np.arange(dim, dtype=float))
    sz = np.diag([1.0, -1.0])
    dims = (dim, 2)
    return (
        OperatorMatrix(np.kron(n, np.eye(2)), dims),
        OperatorMatrix(np.kron(x.data, np.eye(2)), dims),
        OperatorMatrix(np.kron(np.eye(dim), sz), dims),
    )


def build_locc_generator(
    p: LoccParams,
    dim: int,
    convention: str = "feedback",
    include_drift: bool = True,
    include_free: bool = True,
) -> LindbladGenerator:
    """Generator of the unconditional measurement-and-feedback dynamics.

    Hamiltonian part ``w a^dag a + c_drift x + c_xz x sigma_z`` with jump
    operators ``x`` (rate ``2 alpha^2``) and ``sigma_z`` (rate ``beta^2/2``).
    The coefficients depend on ``convention``:

    ``"feedback"``        ``c_xz = alpha beta``, ``c_drift = alpha beta``; what
                          the two homodyne-plus-feedback loops average to.
    ``"doubled"``         ``c_xz = 2 alpha beta``, ``c_drift = alpha beta``.  This
                          exceeds the noise bound and does entangle.
    ``"reversed_drift"``  ``c_xz = alpha beta``, ``c_drift = -alpha beta``.
    """
    n, x, sz = locc_operators(dim)
    h = p.coupling(convention) * (x @ sz)
    if include_drift:
        h = h + p.local_drift(convention) * x
    if include_free:
        h = h + p.omega * n
    jumps = []
    if p.alpha > 0:
        jumps.append((x, p.rate_x))
    if p.beta > 0:
        jumps.append((sz, p.rate_z))
    return LindbladGenerator(h, tuple(jumps), reference_frequency=p.omega)


def default_dt(gen: LindbladGenerator) -> float:
    if gen.reference_frequency:
        return 1e-3 * 2 * np.pi / gen.reference_frequency
    return 1e-3 / max(gen.norm_estimate(), 1.0)


def rk4_step(rhs, rho: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(rho)
    k2 = rhs(rho + 0.5 * h * k1)
    k3 = rhs(rho + 0.5 * h * k2)
    k4 = rhs(rho + h * k3)
    return rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _validated(rho, dims, dt, t):
    tr = np.trace(rho).real
    herm = np.max(np.abs(rho - rho.conj().T))
    if abs(tr - 1) > 1e-10 or herm > 1e-10:
        raise IntegrationError(
            f"at t={t:.6g}: trace error {abs(tr - 1):.2e}, Hermiticity error {herm:.2e}; try dt={dt / 2:.3g}",
            suggested_dt=dt / 2,
        )
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lo < -1e-8:
        raise IntegrationError(
            f"at t={t:.6g}: minimum eigenvalue {lo:.2e} < -1e-8; try dt={dt / 2:.3g}", suggested_dt=dt / 2
        )
    return DensityState(rho, dims, trace_tolerance=1e-10, positivity_tolerance=1e-8)


def evolve(gen: LindbladGenerator, rho0: DensityState, times: Sequence[float], dt: float | None = None):
    """States at each of the sorted, non-negative ``times``.

    Each interval between consecutive output times is split into the
    smallest number of equal RK4 steps not exceeding ``dt``.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0) or np.any(np.diff(times) < 0):
        raise PreconditionError("times must be a sorted sequence of non-negative values")
    if rho0.dims != gen.dims:
        raise PreconditionError(f"state dims {rho0.dims} differ from generator dims {gen.dims}")
    dt = default_dt(gen) if dt is None else float(dt)
    if dt <= 0:
        raise PreconditionError("dt must be positive")
    rhs = _Rhs(gen)
    rho = np.array(rho0.data, dtype=complex)
    t = 0.0
    out = []
    for target in times:
        span = target - t
        nsteps = int(np.ceil(span / dt - 1e-9)) if span > 0 else 0
        if nsteps:
            h = span / nsteps
            for _ in range(nsteps):
                rho = rk4_step(rhs, rho, h)
        t = target
        out.append(_validated(rho, gen.dims, dt, t))
    return out


def integrate(gen: LindbladGenerator, rho0: DensityState, t_final: float, dt: float | None = None) -> DensityState:
    return evolve(gen, rho0, [t_final], dt)[0]


def revival_curve(
    p: LoccParams,
    nbar: float,
    times: Sequence[float],
    dim: int = 24,
    dt: float | None = None,
    convention: str = "feedback",
    include_drift: bool = True,
    generator: LindbladGenerator | None = None,
    max_deficit: float = MAX_NORM_DEFICIT,
) -> np.ndarray:
    """|L> population after the pi/2 pulse under the LOCC dynamics.

    The oscillator starts thermal with mean occupation ``nbar`` and the qubit
    in ``(|L> + |R>)/sqrt(2)``.  Passing ``generator`` overrides the one built
    from ``p``; ``max_deficit`` is forwarded to :func:`thermal_state`.
    """
    gen = generator or build_locc_generator(p, dim, convention=convention, include_drift=include_drift)
    if dt is None:
        dt = 1e-3 * 2 * np.pi / p.omega
    rho0 = DensityState(probe_initial_state(thermal_state(dim, nbar, max_deficit)), (dim, 2))
    states = evolve(gen, rho0, times, dt)
    return np.array([population_L_after_pulse(s.data, dim) for s in states])
