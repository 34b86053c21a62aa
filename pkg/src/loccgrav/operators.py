"""Truncated Fock-space and qubit operator algebra.

Every composite object in the package uses the subsystem order
(oscillator, qubit).  The qubit basis is ``|L> = (1, 0)``, ``|R> = (0, 1)``,
so ``sigma_z |L> = +|L>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import prod
from typing import Sequence

import numpy as np
import scipy.linalg as sla
from scipy.special import gammainc

from .errors import (
    InvalidDimensionError,
    InvalidStateError,
    ShapeError,
    TruncationError,
    UnsupportedBipartitionError,
)

POSITIVITY_TOL = 1e-9
TRACE_TOL = 1e-8
HERMITICITY_TOL = 1e-8
MAX_NORM_DEFICIT = 1e-6


def _frozen(arr):
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense square matrix tagged with its subsystem dimensions."""

    data: np.ndarray
    dims: tuple

    def __post_init__(self):
        data = np.asarray(self.data)
        dims = tuple(int(d) for d in self.dims)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ShapeError(f"operator must be square, got shape {data.shape}")
        if any(d < 2 for d in dims):
            raise InvalidDimensionError(f"subsystem dimensions must be >= 2, got {dims}")
        if prod(dims) != data.shape[0]:
            raise ShapeError(f"dims {dims} do not match matrix side {data.shape[0]}")
        object.__setattr__(self, "data", _frozen(data))
        object.__setattr__(self, "dims", dims)

    @property
    def shape(self):
        return self.data.shape

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.data.conj().T, self.dims)

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return bool(np.max(np.abs(self.data - self.data.conj().T), initial=0.0) <= tol)

    def _check(self, other):
        if self.dims != other.dims:
            raise ShapeError(f"dimension mismatch: {self.dims} vs {other.dims}")

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check(other)
            return OperatorMatrix(self.data @ other.data, self.dims)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check(other)
            return OperatorMatrix(self.data + other.data, self.dims)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check(other)
            return OperatorMatrix(self.data - other.data, self.dims)
        return NotImplemented

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return OperatorMatrix(scalar * self.data, self.dims)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return OperatorMatrix(-self.data, self.dims)

    def __truediv__(self, scalar):
        return OperatorMatrix(self.data / scalar, self.dims)


@dataclass(frozen=True, eq=False)
class DensityState:
    """Positive, unit-trace density matrix with subsystem dimensions.

    Validation happens on construction: Hermiticity, trace within
    ``trace_tolerance`` of one and smallest eigenvalue above
    ``-positivity_tolerance``.
    """

    data: np.ndarray
    dims: tuple
    trace_tolerance: float = TRACE_TOL
    positivity_tolerance: float = POSITIVITY_TOL

    def __post_init__(self):
        op = OperatorMatrix(self.data, self.dims)
        object.__setattr__(self, "data", op.data)
        object.__setattr__(self, "dims", op.dims)
        if not op.is_hermitian(HERMITICITY_TOL):
            raise InvalidStateError("density matrix is not Hermitian")
        tr = np.trace(op.data).real
        if abs(tr - 1.0) > self.trace_tolerance:
            raise InvalidStateError(f"trace {tr!r} differs from 1 by more than {self.trace_tolerance}")
        lo = self.min_eigenvalue()
        if lo < -self.positivity_tolerance:
            raise InvalidStateError(f"minimum eigenvalue {lo:.3e} below -{self.positivity_tolerance}")

    @classmethod
    def from_ket(cls, psi, dims) -> "DensityState":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), dims)

    @property
    def op(self) -> OperatorMatrix:
        return OperatorMatrix(self.data, self.dims)

    def min_eigenvalue(self) -> float:
        herm = 0.5 * (self.data + self.data.conj().T)
        return float(np.linalg.eigvalsh(herm)[0])

    def expect(self, op) -> complex:
        mat = op.data if isinstance(op, OperatorMatrix) else np.asarray(op)
        return complex(np.trace(mat @ self.data))

    def purity(self) -> float:
        return float(np.real(np.vdot(self.data, self.data)))


@dataclass(frozen=True)
class EntanglementReport:
    negativity: float
    min_pt_eigenvalue: float
    bipartition: tuple

    def is_entangled(self, tol: float = POSITIVITY_TOL) -> bool:
        return self.min_pt_eigenvalue < -tol


def _check_dim(dim):
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"Fock dimension must be an integer >= 2, got {dim!r}")
    return int(dim)


def fock_operators(dim: int):
    """Return ``(a, a_dagger, x)`` on the first ``dim`` number states, with ``x = a + a_dagger``."""
    dim = _check_dim(dim)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    ad = a.conj().T
    return (
        OperatorMatrix(a, (dim,)),
        OperatorMatrix(ad, (dim,)),
        OperatorMatrix(a + ad, (dim,)),
    )


def number_operator(dim: int) -> OperatorMatrix:
    dim = _check_dim(dim)
    return OperatorMatrix(np.diag(np.arange(dim, dtype=float)), (dim,))


def identity(dims) -> OperatorMatrix:
    dims = (dims,) if np.isscalar(dims) else tuple(dims)
    return OperatorMatrix(np.eye(prod(dims)), dims)


def sigma_x() -> OperatorMatrix:
    return OperatorMatrix(np.array([[0, 1], [1, 0]]), (2,))


def sigma_y() -> OperatorMatrix:
    return OperatorMatrix(np.array([[0, -1j], [1j, 0]]), (2,))


def sigma_z() -> OperatorMatrix:
    return OperatorMatrix(np.array([[1, 0], [0, -1]]), (2,))


KET_L = np.array([1.0, 0.0], dtype=complex)
KET_R = np.array([0.0, 1.0], dtype=complex)
KET_PLUS = (KET_L + KET_R) / np.sqrt(2)


@lru_cache(maxsize=64)
def _displacement_cached(dim, re, im):
    amp = complex(re, im)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    out = sla.expm(amp * a.conj().T - np.conj(amp) * a)
    out.setflags(write=False)
    return out


def displacement(dim: int, amp: complex) -> OperatorMatrix:
    """``exp(amp a^dag - conj(amp) a)`` on the truncated space.

    The truncated generator is anti-Hermitian, so the result is unitary to
    rounding; its action on high number states carries truncation error.
    """
    dim = _check_dim(dim)
    amp = complex(amp)
    return OperatorMatrix(_displacement_cached(dim, amp.real, amp.imag), (dim,))


def coherent_norm_deficit(dim: int, amp: complex) -> float:
    """Probability weight of ``|amp>`` outside the first ``dim`` number states."""
    mu = abs(complex(amp)) ** 2
    if mu == 0.0:
        return 0.0
    return float(gammainc(dim, mu))


def thermal_norm_deficit(dim: int, nbar: float) -> float:
    if nbar == 0:
        return 0.0
    return float((nbar / (nbar + 1.0)) ** dim)


def coherent_amplitudes(dim: int, amp: complex) -> np.ndarray:
    """Unnormalized coherent-state amplitudes ``exp(-|amp|^2/2) amp^n / sqrt(n!)``."""
    amp = complex(amp)
    n = np.arange(dim)
    logfact = np.cumsum(np.log(np.maximum(n, 1)))
    mag = np.exp(-0.5 * abs(amp) ** 2 - 0.5 * logfact)
    return mag * amp ** n


def coherent_state(dim: int, amp: complex, max_deficit: float = MAX_NORM_DEFICIT) -> DensityState:
    dim = _check_dim(dim)
    deficit = coherent_norm_deficit(dim, amp)
    if deficit > max_deficit:
        raise TruncationError(
            f"coherent state |{amp}> loses {deficit:.2e} of its norm at dim={dim} (limit {max_deficit:.1e})"
        )
    return DensityState.from_ket(coherent_amplitudes(dim, amp), (dim,))


def thermal_state(dim: int, nbar: float, max_deficit: float = MAX_NORM_DEFICIT) -> DensityState:
    """Bose-Einstein diagonal state, renormalized over the truncation."""
    dim = _check_dim(dim)
    if nbar < 0:
        raise ValueError(f"mean occupation must be >= 0, got {nbar}")
    deficit = thermal_norm_deficit(dim, nbar)
    if deficit > max_deficit:
        raise TruncationError(
            f"thermal state nbar={nbar} loses {deficit:.2e} of its norm at dim={dim} (limit {max_deficit:.1e})"
        )
    if nbar == 0:
        p = np.zeros(dim)
        p[0] = 1.0
    else:
        p = (nbar / (nbar + 1.0)) ** np.arange(dim) / (nbar + 1.0)
        p /= p.sum()
    return DensityState(np.diag(p), (dim,))


def fock_state(dim: int, n: int) -> DensityState:
    psi = np.zeros(_check_dim(dim))
    psi[n] = 1.0
    return DensityState.from_ket(psi, (dim,))


def qubit_state(ket) -> DensityState:
    return DensityState.from_ket(ket, (2,))


def tensor(*ops):
    """Kronecker product; returns a DensityState if every factor is one."""
    if not ops:
        raise ShapeError("tensor needs at least one operand")
    data = np.array([[1.0 + 0j]])
    dims = ()
    for op in ops:
        data = np.kron(data, op.data)
        dims = dims + tuple(op.dims)
    if all(isinstance(op, DensityState) for op in ops):
        return DensityState(data, dims)
    return OperatorMatrix(data, dims)


def embed(op: OperatorMatrix, position: int, dims: Sequence[int]) -> OperatorMatrix:
    """Lift a single-subsystem operator into the full space ``dims``."""
    dims = tuple(dims)
    if op.shape[0] != dims[position]:
        raise ShapeError(f"operator of side {op.shape[0]} cannot act on subsystem {position} with dims {dims}")
    factors = [np.eye(d) for d in dims]
    factors[position] = op.data
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return OperatorMatrix(out, dims)


def partial_trace(rho, keep) -> DensityState:
    """Trace out every subsystem not listed in ``keep``."""
    dims = tuple(rho.dims)
    keep = sorted({keep} if np.isscalar(keep) else set(keep))
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise ShapeError(f"invalid subsystem selection {keep} for dims {dims}")
    n = len(dims)
    t = np.asarray(rho.data).reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out_idx = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out_idx, t)
    side = prod(dims[i] for i in keep)
    return DensityState(reduced.reshape(side, side), tuple(dims[i] for i in keep))


def partial_transpose(rho, part: int) -> OperatorMatrix:
    dims = tuple(rho.dims)
    if not 0 <= part < len(dims):
        raise ShapeError(f"subsystem {part} out of range for dims {dims}")
    n = len(dims)
    t = np.asarray(rho.data).reshape(dims + dims)
    axes = list(range(2 * n))
    axes[part], axes[n + part] = axes[n + part], axes[part]
    side = prod(dims)
    return OperatorMatrix(t.transpose(axes).reshape(side, side), dims)


def negativity(rho, part: int = 1) -> EntanglementReport:
    """Sum of the magnitudes of the negative partial-transpose eigenvalues."""
    if len(rho.dims) != 2:
        raise UnsupportedBipartitionError(f"negativity needs exactly two subsystems, got dims {rho.dims}")
    pt = partial_transpose(rho, part).data
    evals = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    neg = float(np.abs(evals[evals < 0]).sum())
    return EntanglementReport(negativity=neg, min_pt_eigenvalue=float(evals[0]), bipartition=(0, 1))


def trace_distance(rho, sigma) -> float:
    a = rho.data if isinstance(rho, (OperatorMatrix, DensityState)) else np.asarray(rho)
    b = sigma.data if isinstance(sigma, (OperatorMatrix, DensityState)) else np.asarray(sigma)
    diff = a - b
    return float(0.5 * np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum())


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pure_state(dims, rng: np.random.Generator) -> DensityState:
    side = prod(dims)
    psi = rng.standard_normal(side) + 1j * rng.standard_normal(side)
    return DensityState.from_ket(psi, tuple(dims))
