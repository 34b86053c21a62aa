"""Kraus representations of the LOCC channel and product-form (separability) certificates."""
from __future__ import annotations

import json
from dataclasses import dataclass
from math import prod

import numpy as np

from .errors import InvalidTransformationError, PreconditionError, ShapeError
from .lindblad import LindbladGenerator, LoccParams
from .operators import DensityState, OperatorMatrix, fock_operators, random_pure_state, tensor, trace_distance

SCHMIDT_TOL = 1e-10
KRAUS_FORMAT = "loccgrav.kraus/1"


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Ordered Kraus operators for a step ``dt``.

    ``order_label`` is the power of ``dt`` up to which the set represents the
    intended channel; completeness ``sum K^dag K = 1`` holds to that order,
    not exactly.
    """

    operators: tuple
    dt: float
    order_label: float = 1.0

    def __post_init__(self):
        ops = tuple(self.operators)
        if not ops:
            raise PreconditionError("a Kraus set needs at least one operator")
        if any(op.dims != ops[0].dims for op in ops):
            raise ShapeError("Kraus operators act on different spaces")
        object.__setattr__(self, "operators", ops)

    @property
    def dims(self):
        return self.operators[0].dims

    def __len__(self):
        return len(self.operators)

    def completeness_defect(self) -> float:
        s = sum(op.data.conj().T @ op.data for op in self.operators)
        return float(np.linalg.norm(s - np.eye(s.shape[0]), 2))

    def to_json(self) -> str:
        return json.dumps({
            "format": KRAUS_FORMAT,
            "dt": self.dt,
            "order_label": self.order_label,
            "dims": list(self.dims),
            "operators": [{"real": op.data.real.tolist(), "imag": op.data.imag.tolist()} for op in self.operators],
        })

    @classmethod
    def from_json(cls, text: str) -> "KrausSet":
        obj = json.loads(text)
        ops = [OperatorMatrix(np.array(o["real"]) + 1j * np.array(o["imag"]), tuple(obj["dims"])) for o in obj["operators"]]
        return cls(tuple(ops), float(obj["dt"]), float(obj["order_label"]))


def kraus_from_generator(gen: LindbladGenerator, dt: float) -> KrausSet:
    """``L_0 = 1 - i H dt - (1/2) sum E^dag E dt`` and ``L_i = E_i sqrt(dt)``, rates folded into ``E_i``."""
    if dt <= 0:
        raise PreconditionError("dt must be positive")
    dims = gen.dims
    side = prod(dims)
    l0 = np.eye(side, dtype=complex) - 1j * gen.hamiltonian.data * dt
    ops = []
    for op, rate in gen.jumps:
        if rate == 0:
            continue
        e = np.sqrt(rate) * op.data
        l0 = l0 - 0.5 * (e.conj().T @ e) * dt
        ops.append(OperatorMatrix(e * np.sqrt(dt), dims))
    return KrausSet((OperatorMatrix(l0, dims), *ops), dt, order_label=1.0)


def mix_kraus(kset: KrausSet, U) -> KrausSet:
    """``K'_i = sum_j U_ij K_j``; the channel is unchanged for unitary ``U``."""
    U = np.asarray(U, dtype=complex)
    n = len(kset)
    if U.shape != (n, n):
        raise InvalidTransformationError(f"mixing matrix must be {n}x{n}, got {U.shape}")
    if np.max(np.abs(U.conj().T @ U - np.eye(n))) > 1e-12:
        raise InvalidTransformationError("mixing matrix is not unitary within 1e-12")
    stack = np.array([op.data for op in kset.operators])
    mixed = np.einsum("ij,jab->iab", U, stack)
    return KrausSet(tuple(OperatorMatrix(m, kset.dims) for m in mixed), kset.dt, kset.order_label)


HADAMARD_MIX = np.array([[1.0, -1.0], [1.0, 1.0]]) / np.sqrt(2)


def directional_generator(M: OperatorMatrix, F: OperatorMatrix, measured: int = 0) -> LindbladGenerator:
    """One measure-and-feed-back loop: ``-i[M F, rho] + D[M - i F] rho``.

    ``M`` (Hermitian) acts on subsystem ``measured``, ``F`` on the other one.
    """
    mf, ff = _lift_pair(M, F, measured)
    return LindbladGenerator(OperatorMatrix(mf @ ff, _pair_dims(M, F, measured)),
                             ((OperatorMatrix(mf - 1j * ff, _pair_dims(M, F, measured)), 1.0),))


def _pair_dims(M, F, measured):
    return (M.shape[0], F.shape[0]) if measured == 0 else (F.shape[0], M.shape[0])


def _lift_pair(M, F, measured):
    if measured == 0:
        return np.kron(M.data, np.eye(F.shape[0])), np.kron(np.eye(M.shape[0]), F.data)
    if measured == 1:
        return np.kron(np.eye(F.shape[0]), M.data), np.kron(F.data, np.eye(M.shape[0]))
    raise ShapeError("measured must be 0 or 1")


def product_form_pair(M: OperatorMatrix, F: OperatorMatrix, dt: float, measured: int = 0) -> KrausSet:
    """Two exact tensor-product Kraus operators for one measurement-feedback loop.

    ``(1 -+ M sqrt(dt) - M^2 dt/2) (x) (1 +- i F sqrt(dt) - F^2 dt/2) / sqrt(2)``.
    They agree with the unitarily mixed ``{L_0, L_1}`` of
    :func:`directional_generator` up to O(dt^{3/2}).
    """
    if not M.is_hermitian(1e-12):
        raise PreconditionError("measurement operator must be Hermitian")
    if dt <= 0:
        raise PreconditionError("dt must be positive")
    m, f = M.data, F.data
    im, iff = np.eye(m.shape[0]), np.eye(f.shape[0])
    r = np.sqrt(dt)
    ops = []
    for sign in (-1.0, 1.0):
        a = im + sign * m * r - 0.5 * m @ m * dt
        b = iff - sign * 1j * f * r - 0.5 * f @ f * dt
        factors = (OperatorMatrix(a, M.dims), OperatorMatrix(b, F.dims))
        if measured == 1:
            factors = factors[::-1]
        ops.append(OperatorMatrix(tensor(*factors).data / np.sqrt(2), _pair_dims(M, F, measured)))
    return KrausSet(tuple(ops), dt, order_label=1.0)


def compose(set_after: KrausSet, set_before: KrausSet) -> KrausSet:
    """``K_ij = A_i B_j``: apply ``set_before`` first, then ``set_after``."""
    if set_after.dims != set_before.dims:
        raise ShapeError(f"dimension mismatch {set_after.dims} vs {set_before.dims}")
    if not np.isclose(set_after.dt, set_before.dt, rtol=1e-12, atol=0):
        raise PreconditionError("Kraus sets have different dt")
    ops = tuple(OperatorMatrix(a.data @ b.data, a.dims) for a in set_after.operators for b in set_before.operators)
    return KrausSet(ops, set_before.dt, min(set_after.order_label, set_before.order_label))


def locc_loop_operators(p: LoccParams, dim: int):
    """Local factors ``(M, F)`` of the two loops.

    Oscillator-to-qubit: ``M = alpha x``, ``F = beta sigma_z / 2``.
    Qubit-to-oscillator: ``M = (beta/2)(sigma_z + 1)``, ``F = alpha x``.
    """
    _, _, x = fock_operators(dim)
    ax = OperatorMatrix(p.alpha * x.data, (dim,))
    fz = OperatorMatrix(0.5 * p.beta * np.diag([1.0, -1.0]), (2,))
    mz = OperatorMatrix(0.5 * p.beta * np.diag([2.0, 0.0]), (2,))
    return (ax, fz), (mz, ax)


def locc_product_form_kraus(p: LoccParams, dim: int, dt: float) -> KrausSet:
    """Four product-form operators ``K_ij = L'_i L_j`` of the bidirectional LOCC channel (no free term)."""
    (ma, fb), (mb, fa) = locc_loop_operators(p, dim)
    a_to_b = product_form_pair(ma, fb, dt, measured=0)
    b_to_a = product_form_pair(mb, fa, dt, measured=1)
    return compose(b_to_a, a_to_b)


def apply_channel(kset: KrausSet, rho, renormalize: bool = True) -> DensityState:
    out = sum(op.data @ rho.data @ op.data.conj().T for op in kset.operators)
    if renormalize:
        out = out / np.trace(out).real
    out = 0.5 * (out + out.conj().T)
    return DensityState(out, rho.dims, trace_tolerance=1e-6 if not renormalize else 1e-8,
                        positivity_tolerance=1e-9)


def _channel_raw(kset, rho_data):
    out = sum(op.data @ rho_data @ op.data.conj().T for op in kset.operators)
    return out / np.trace(out).real


def default_sample_states(dims, n: int = 50, seed: int = 7):
    """Half random product pure states, half random (generically entangled) pure states."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        if k % 2 == 0:
            out.append(tensor(*(random_pure_state((d,), rng) for d in dims)))
        else:
            out.append(random_pure_state(dims, rng))
    return out


def channel_distance(set_a: KrausSet, set_b: KrausSet, sample_states=None) -> float:
    """Largest trace distance between the two (renormalized) channel outputs over the samples."""
    if set_a.dims != set_b.dims:
        raise ShapeError("channels act on different spaces")
    states = sample_states if sample_states is not None else default_sample_states(set_a.dims)
    return max(trace_distance(_channel_raw(set_a, s.data), _channel_raw(set_b, s.data)) for s in states)


def operator_schmidt_rank(op: OperatorMatrix, tol: float = SCHMIDT_TOL) -> int:
    """Number of product terms needed for a bipartite operator (singular values above ``tol`` relative)."""
    if len(op.dims) != 2:
        raise ShapeError("operator Schmidt rank needs exactly two subsystems")
    da, db = op.dims
    re = op.data.reshape(da, db, da, db).transpose(0, 2, 1, 3).reshape(da * da, db * db)
    s = np.linalg.svd(re, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def separability_defect(kset: KrausSet, bipartition=(0, 1)) -> int:
    """``max_k (schmidt_rank(K_k) - 1)``; zero iff every operator is a tensor product."""
    if tuple(bipartition) != (0, 1):
        raise ShapeError("only the (oscillator, qubit) bipartition is supported")
    return max(operator_schmidt_rank(op) - 1 for op in kset.operators)


def fit_exponent(xs, ys) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    slope, _ = np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)
    return float(slope)
