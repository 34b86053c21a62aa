"""Table of coupling and heating-rate estimates for the preset scenarios, plus the black-hole ratio."""
import numpy as np

from loccgrav.noise_budget import blackhole_comparison, load_scenario, symmetric_split

QUOTED = {"mg_atom": ("gamma_symmetric", 1e-15), "silica_pair": ("gamma_symmetric", 1e-8),
          "neutron": ("gamma_asymmetric", 2.9e3)}


def main():
    print(f"{'scenario':12s} {'g/2pi [Hz]':>12s} {'gs/2pi [Hz]':>12s} {'ga/2pi [Hz]':>12s}  quoted")
    for label, (field, quoted) in QUOTED.items():
        hz = symmetric_split(load_scenario(label)).in_hz()
        print(f"{label:12s} {hz['g']:12.3e} {hz['gamma_symmetric']:12.3e} {hz['gamma_asymmetric']:12.3e}"
              f"  {field}: {quoted:.1e} (ratio {hz[field] / quoted:.2f})")
    mg = symmetric_split(load_scenario("mg_atom")).in_hz()["gamma_asymmetric"]
    print(f"mg-mass asymmetric rate / 1e-6 Hz = {mg / 1e-6:.2f}")
    for m in (10.0, 1.989e30):
        b = blackhole_comparison(m)
        print(f"M={m:.3e} kg: heating={b.locc_heating:.3e} W, hawking={b.hawking_power:.3e} W, "
              f"ratio/(1920 pi)={b.ratio / (1920 * np.pi):.15f}")


if __name__ == "__main__":
    main()
