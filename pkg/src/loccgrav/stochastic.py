"""Conditional (homodyne) dynamics with mutual feedback between oscillator and qubit.

Each time step performs, in order:

1. Continuous position measurement of the oscillator, measurement operator
   ``c_A = alpha x``, record increment ``dy_A = J_A dt = 2 alpha <x> dt + dW_A``.
2. Continuous measurement of the qubit projector, ``c_B = (beta/2)(sigma_z + 1)``,
   ``dy_B = J_B dt = beta <sigma_z + 1> dt + dW_B``.
3. Feedback ``exp(-i dy_B F_A - i dy_A F_B)`` with ``F_A = alpha x`` and
   ``F_B = beta sigma_z / 2``.
4. Free oscillator evolution ``exp(-i w a^dag a dt)``, then trace renormalization.

The default ``"kraus"`` scheme writes steps 1-2 as the Ito-consistent
measurement operator ``1 - c^2 dt/2 + c dy + c^2 (dy^2 - dt)/2`` applied as
``M rho M^dag``, which keeps every conditional state positive.  The
``"euler"`` scheme is the plain Euler-Maruyama update of the stochastic
master equation; it can leave the positive cone at O(dt).
"""
from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError, StepFailure
from .lindblad import LoccParams
from .operators import POSITIVITY_TOL, DensityState

SCHEMES = ("kraus", "euler")
WORKERS_ENV = "LOCCGRAV_WORKERS"


@dataclass(frozen=True)
class NoiseIncrement:
    dW_A: float
    dW_B: float
    dt: float


@dataclass
class TrajectoryRecord:
    """One conditional trajectory.

    ``times[k]`` is the end of step ``k``; ``current_A[k]`` and
    ``current_B[k]`` are the homodyne currents averaged over that step.
    ``states`` are stored at ``state_times`` (every ``store_every`` steps,
    starting with the initial state).
    """

    seed: int
    times: np.ndarray
    states: list
    state_times: np.ndarray
    current_A: np.ndarray
    current_B: np.ndarray

    def to_csv(self, path) -> None:
        write_currents_csv(path, self.times, self.current_A, self.current_B)


def write_currents_csv(path, times, current_A, current_B, header_lines=()):
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "J_A", "J_B"])
        for row in zip(times, current_A, current_B):
            w.writerow([f"{v:.16e}" for v in row])


class _Stepper:
    """Batched step over a stack of density matrices of shape ``(B, 2d, 2d)``."""

    def __init__(self, dim: int, p: LoccParams, dt: float, scheme: str = "kraus"):
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
        if dt <= 0:
            raise PreconditionError("dt must be positive")
        self.dim, self.p, self.dt, self.scheme = dim, p, float(dt), scheme
        a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)
        x = a + a.T
        evals, vecs = np.linalg.eigh(x)
        self.W = np.kron(vecs, np.eye(2)).astype(complex)
        self.Wd = self.W.conj().T
        self.xe = np.repeat(evals, 2)           # x eigenvalues in the W basis
        self.z = np.tile([1.0, -1.0], dim)      # sigma_z diagonal (both bases)
        self.X = np.kron(x, np.eye(2)).astype(complex)
        self.free = np.exp(-1j * p.omega * dt * np.repeat(np.arange(dim, dtype=float), 2))

    def expectations(self, R):
        ex = np.einsum("ij,bji->b", self.X, R).real
        ez = np.einsum("i,bii->b", self.z, R).real
        return ex, ez

    def step(self, R, dWA, dWB):
        p, dt = self.p, self.dt
        ex, ez = self.expectations(R)
        dyA = dWA + 2.0 * p.alpha * ex * dt
        dyB = dWB + p.beta * (ez + 1.0) * dt
        if self.scheme == "kraus":
            R = self._measure_kraus(R, dyA, dyB)
        else:
            R = self._measure_euler(R, dWA, dWB, ex, ez)
        # feedback and free evolution; both are diagonal in the W basis up to the free phase
        fb = np.exp(-1j * (dyB[:, None] * p.alpha * self.xe[None, :] + dyA[:, None] * 0.5 * p.beta * self.z[None, :]))
        U = (self.free[:, None] * self.W)[None] * fb[:, None, :] @ self.Wd
        R = U @ R @ np.conj(np.swapaxes(U, 1, 2))
        tr = np.einsum("bii->b", R).real
        if np.any(tr < 0.5):
            raise StepFailure(f"state norm collapsed to {tr.min():.3g} before renormalization; reduce dt={dt:.3g}")
        R = R / tr[:, None, None]
        return R, dyA / dt, dyB / dt

    def _measure_kraus(self, R, dyA, dyB):
        dt = self.dt
        cA = self.p.alpha * self.xe[None, :]
        cB = 0.5 * self.p.beta * (self.z[None, :] + 1.0)
        gA = 1.0 - 0.5 * cA ** 2 * dt + cA * dyA[:, None] + 0.5 * cA ** 2 * (dyA[:, None] ** 2 - dt)
        gB = 1.0 - 0.5 * cB ** 2 * dt + cB * dyB[:, None] + 0.5 * cB ** 2 * (dyB[:, None] ** 2 - dt)
        M = self.W[None] * (gA * gB)[:, None, :] @ self.Wd
        return M @ R @ np.conj(np.swapaxes(M, 1, 2))

    def _measure_euler(self, R, dWA, dWB, ex, ez):
        p, dt, X, z = self.p, self.dt, self.X, self.z
        XR, RX = X @ R, R @ X
        XRX = XR @ X
        X2 = X @ X
        ZR, RZ = z[None, :, None] * R, R * z[None, None, :]
        ZRZ = z[None, :, None] * R * z[None, None, :]
        dR = p.alpha ** 2 * (XRX - 0.5 * (X2 @ R + R @ X2)) * dt
        dR += 0.25 * p.beta ** 2 * (ZRZ - R) * dt
        dR += p.alpha * dWA[:, None, None] * (XR + RX - 2.0 * ex[:, None, None] * R)
        dR += 0.5 * p.beta * dWB[:, None, None] * (ZR + RZ - 2.0 * ez[:, None, None] * R)
        return R + dR


def _dim_of(rho):
    if len(rho.dims) != 2 or rho.dims[1] != 2:
        raise PreconditionError(f"expected an (oscillator, qubit) state, got dims {rho.dims}")
    return rho.dims[0]


def sme_step(rho: DensityState, p: LoccParams, noise: NoiseIncrement, scheme: str = "kraus",
             positivity_tolerance: float = POSITIVITY_TOL) -> DensityState:
    """Advance one conditional step with the given Wiener increments."""
    st = _Stepper(_dim_of(rho), p, noise.dt, scheme)
    R, _, _ = st.step(np.array(rho.data)[None], np.array([noise.dW_A], float), np.array([noise.dW_B], float))
    return DensityState(R[0], rho.dims, positivity_tolerance=positivity_tolerance)


def trajectory_noise(seed: int, n_steps: int, dt: float) -> np.ndarray:
    """Wiener increments ``(n_steps, 2)`` for one trajectory from a Philox counter-based stream."""
    rng = np.random.Generator(np.random.Philox(int(seed)))
    return rng.standard_normal((n_steps, 2)) * np.sqrt(dt)


def _n_steps(t_final, dt):
    n = int(round(t_final / dt))
    if n < 1 or abs(n * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise PreconditionError(f"t_final={t_final} must be a positive integer multiple of dt={dt}")
    return n


def _run_batch(rho0_data, dim, p, dt, n_steps, seeds, store_every, scheme, keep_states):
    st = _Stepper(dim, p, dt, scheme)
    B = len(seeds)
    noise = np.stack([trajectory_noise(s, n_steps, dt) for s in seeds], axis=1)
    R = np.broadcast_to(rho0_data, (B,) + rho0_data.shape).astype(complex)
    JA = np.empty((B, n_steps))
    JB = np.empty((B, n_steps))
    snaps = [R.copy()] if keep_states else [R.sum(axis=0)]
    purity = [np.einsum("bij,bij->b", R, R.conj()).real]
    for k in range(n_steps):
        R, JA[:, k], JB[:, k] = st.step(R, noise[k, :, 0], noise[k, :, 1])
        if (k + 1) % store_every == 0:
            snaps.append(R.copy() if keep_states else R.sum(axis=0))
            purity.append(np.einsum("bij,bij->b", R, R.conj()).real)
    return snaps, np.array(purity), JA, JB


def simulate_trajectory(rho0: DensityState, p: LoccParams, t_final: float, dt: float, seed: int,
                        store_every: int = 1, scheme: str = "kraus") -> TrajectoryRecord:
    """One conditional trajectory, fully determined by ``seed`` and the inputs."""
    dim = _dim_of(rho0)
    n_steps = _n_steps(t_final, dt)
    snaps, _, JA, JB = _run_batch(np.array(rho0.data), dim, p, dt, n_steps, [seed], store_every, scheme, True)
    tol = POSITIVITY_TOL if scheme == "kraus" else np.inf
    states = [DensityState(s[0], rho0.dims, positivity_tolerance=tol) for s in snaps]
    return TrajectoryRecord(
        seed=int(seed),
        times=dt * np.arange(1, n_steps + 1),
        states=states,
        state_times=dt * store_every * np.arange(len(states)),
        current_A=JA[0],
        current_B=JB[0],
    )


@dataclass
class EnsembleAverage:
    """Pointwise mean over trajectories ``seed0, seed0 + 1, ...``."""

    times: np.ndarray
    states: list
    mean_purity: np.ndarray
    step_times: np.ndarray
    mean_current_A: np.ndarray
    mean_current_B: np.ndarray
    seeds: list
    kept_currents: dict = field(default_factory=dict)


def worker_count(requested=None) -> int:
    cap = os.environ.get(WORKERS_ENV)
    n = requested if requested is not None else (int(cap) if cap else 1)
    if cap:
        n = min(n, int(cap))
    return max(1, int(n))


def ensemble_average(rho0: DensityState, p: LoccParams, t_final: float, dt: float, n_traj: int, seed0: int,
                     store_every: int = 1, scheme: str = "kraus", chunk_size: int = 250,
                     workers: int | None = None, keep_currents: int = 0) -> EnsembleAverage:
    """Average ``n_traj`` independent trajectories.

    Trajectory ``i`` uses seed ``seed0 + i``.  Chunks are reduced in index
    order, so the result depends only on the seed set and ``chunk_size``,
    never on how chunks were scheduled across ``workers`` processes.
    """
    if n_traj < 1:
        raise PreconditionError("n_traj must be >= 1")
    dim = _dim_of(rho0)
    n_steps = _n_steps(t_final, dt)
    seeds = [int(seed0) + i for i in range(n_traj)]
    chunks = [seeds[i:i + chunk_size] for i in range(0, n_traj, chunk_size)]
    args = [(np.array(rho0.data), dim, p, dt, n_steps, c, store_every, scheme, False) for c in chunks]
    nw = min(worker_count(workers), len(chunks))
    if nw > 1:
        with ProcessPoolExecutor(max_workers=nw) as ex:
            results = list(ex.map(_run_batch, *zip(*args)))
    else:
        results = [_run_batch(*a) for a in args]

    total = None
    pur = 0.0
    sumA = np.zeros(n_steps)
    sumB = np.zeros(n_steps)
    kept = {}
    for chunk, (snaps, purity, JA, JB) in zip(chunks, results):
        snaps = np.array(snaps)
        total = snaps if total is None else total + snaps
        pur = pur + purity.sum(axis=1)
        sumA += JA.sum(axis=0)
        sumB += JB.sum(axis=0)
        for j, s in enumerate(chunk):
            if len(kept) < keep_currents:
                kept[s] = (JA[j], JB[j])
    mean = total / n_traj
    tol = POSITIVITY_TOL if scheme == "kraus" else np.inf
    states = [DensityState(m, rho0.dims, positivity_tolerance=tol) for m in mean]
    return EnsembleAverage(
        times=dt * store_every * np.arange(len(states)),
        states=states,
        mean_purity=pur / n_traj,
        step_times=dt * np.arange(1, n_steps + 1),
        mean_current_A=sumA / n_traj,
        mean_current_B=sumB / n_traj,
        seeds=seeds,
        kept_currents=kept,
    )


def tltm_kraus_operators(beta: float, dt: float):
    """``K_+/-`` for a |+>/|-> readout of the weakly measured qubit projector.

    ``K_+/- = (K_0 +/- K_1)/sqrt(2)`` with ``K_1 = (beta/2)(sigma_z + 1) sqrt(dt)``
    and ``K_0 = 1 - (beta^2/4)(sigma_z + 1) dt``.
    """
    s = np.diag([2.0, 0.0])
    k0 = np.eye(2) - 0.25 * beta ** 2 * s * dt
    k1 = 0.5 * beta * s * np.sqrt(dt)
    return (k0 + k1) / np.sqrt(2), (k0 - k1) / np.sqrt(2)


def tltm_povm(beta: float, dt: float):
    """``E_+/- = (1 +/- beta (sigma_z + 1) sqrt(dt)) / 2``; sums to the identity exactly."""
    s = np.diag([2.0, 0.0])
    return 0.5 * (np.eye(2) + beta * s * np.sqrt(dt)), 0.5 * (np.eye(2) - beta * s * np.sqrt(dt))


def tltm_kraus_step(rho_qubit: DensityState, beta: float, dt: float, outcome: int):
    """Post-measurement qubit state for ``outcome`` in {+1, -1} and its probability ``tr(E rho)``."""
    if outcome not in (1, -1):
        raise ValueError("outcome must be +1 or -1")
    if rho_qubit.dims != (2,):
        raise PreconditionError(f"expected a qubit state, got dims {rho_qubit.dims}")
    kp, km = tltm_kraus_operators(beta, dt)
    ep, em = tltm_povm(beta, dt)
    k, e = (kp, ep) if outcome == 1 else (km, em)
    prob = float(np.trace(e @ rho_qubit.data).real)
    post = k @ rho_qubit.data @ k.conj().T
    return DensityState(post / np.trace(post).real, (2,)), prob


def sample_tltm_record(rho_qubit: DensityState, beta: float, dt: float, n_steps: int, rng: np.random.Generator):
    """Sample a binary readout record; returns the final state and ``dM = +/- sqrt(dt)`` increments."""
    rho = rho_qubit
    dm = np.empty(n_steps)
    for k in range(n_steps):
        probe, p_plus = tltm_kraus_step(rho, beta, dt, 1)
        if rng.random() < p_plus:
            rho, dm[k] = probe, np.sqrt(dt)
        else:
            rho, _ = tltm_kraus_step(rho, beta, dt, -1)
            dm[k] = -np.sqrt(dt)
    return rho, dm
