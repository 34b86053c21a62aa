"""Compare the feedback-derived, doubled-coupling and reversed-drift forms of the LOCC master equation.

For each form, reports peak negativity from vacuum x |+>, the local maxima
and the local maxima of the nbar=1 revival curve.

    python scripts/convention_comparison.py
"""
import numpy as np

from loccgrav.coherent import probe_initial_state
from loccgrav.lindblad import CONVENTIONS, LoccParams, build_locc_generator, evolve, revival_curve
from loccgrav.operators import DensityState, fock_state, negativity

DIM = 20


def main():
    p = LoccParams.equal_rates()
    t = np.linspace(0, 6.5 * np.pi, 651)
    rho0 = DensityState(probe_initial_state(fock_state(DIM, 0)), (DIM, 2))
    for conv in CONVENTIONS:
        gen = build_locc_generator(p, DIM, convention=conv)
        states = evolve(gen, rho0, t[::10], dt=2 * np.pi / 1000)
        peak = max(negativity(s).negativity for s in states)
        curve = revival_curve(p, 1.0, t, dim=DIM, convention=conv, max_deficit=1e-4)
        maxima = [t[i] / np.pi for i in range(1, len(t) - 1) if curve[i] > curve[i - 1] and curve[i] >= curve[i + 1]]
        print(f"{conv:9s} coupling={p.coupling(conv):.3f} drift={p.local_drift(conv):+.3f} "
              f"max negativity={peak:.2e} maxima at wt/pi={np.round(maxima, 2).tolist()}")


if __name__ == "__main__":
    main()
