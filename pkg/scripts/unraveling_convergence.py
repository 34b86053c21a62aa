"""Trace distance between trajectory ensembles and the master equation as the ensemble grows.

    python scripts/unraveling_convergence.py [--dim 10] [--max-traj 2000]
"""
import argparse

import numpy as np

from loccgrav.coherent import probe_initial_state
from loccgrav.lindblad import LoccParams, build_locc_generator, evolve
from loccgrav.operators import DensityState, fock_state, trace_distance
from loccgrav.stochastic import ensemble_average


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dim", type=int, default=10)
    ap.add_argument("--max-traj", type=int, default=2000)
    ap.add_argument("--scheme", choices=["kraus", "euler"], default="kraus")
    args = ap.parse_args()
    p = LoccParams.equal_rates()
    dt = 2 * np.pi / 1000
    rho0 = DensityState(probe_initial_state(fock_state(args.dim, 0)), (args.dim, 2))
    me = evolve(build_locc_generator(p, args.dim), rho0, [np.pi, 2 * np.pi], dt=dt)
    n = 125
    while n <= args.max_traj:
        ens = ensemble_average(rho0, p, 2 * np.pi, dt, n_traj=n, seed0=2024, store_every=500, scheme=args.scheme)
        d = [trace_distance(ens.states[k], me[k - 1]) for k in (1, 2)]
        print(f"n_traj={n:5d}  D(pi)={d[0]:.4f}  D(2pi)={d[1]:.4f}  3/sqrt(n)={3 / np.sqrt(n):.4f}")
        n *= 2


if __name__ == "__main__":
    main()
