"""Command-line runner: ``loccgrav <experiment> --config cfg.json [--set k=v]... [--out path]``.

Exit codes: 0 success, 2 configuration error, 3 numerical-invariant failure.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import coherent, kraus, lindblad, noise_budget, stochastic
from .errors import ConfigError, IntegrationError, InvalidStateError, StepFailure, TruncationError
from .operators import DensityState, negativity, random_unitary, thermal_state, trace_distance

FORMAT_VERSION = "loccgrav-output/1"
EXPERIMENTS = ("revival", "trajectories", "kraus-audit", "rates", "blackhole")
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

REQUIRED = {
    "revival": ("dim", "nbar"),
    "trajectories": ("dim", "n_traj", "seed", "t_final", "dt"),
    "kraus-audit": ("dim",),
    "rates": ("scenario",),
    "blackhole": ("masses",),
}

DEFAULTS = {
    "revival": {"omega": 1.0, "convention": "feedback", "t_final": 6 * np.pi, "n_times": 601, "dt": None,
                "include_drift": True, "max_deficit": 1e-6},
    "trajectories": {"omega": 1.0, "nbar": 0.0, "store_every": 10, "current_files": None, "scheme": "kraus",
                     "workers": None},
    "kraus-audit": {"omega": 1.0, "dts": [1e-3, 1e-4, 1e-5, 1e-6], "n_samples": 50, "seed": 7},
    "rates": {"omega": None, "compton": "non-reduced"},
    "blackhole": {},
}


def _line_of(text: str, key: str) -> int:
    for i, line in enumerate(text.splitlines(), 1):
        if f'"{key}"' in line:
            return i
    return 1


def _parse_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def load_config(path, experiment: str, overrides=(), out=None) -> dict:
    """Read, override and validate a JSON experiment config; returns the resolved dict."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    if not text.strip():
        raise ConfigError(f"{path}:1: config is empty")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}:1: top level must be a JSON object")
    declared = cfg.get("experiment", experiment)
    if declared != experiment:
        raise ConfigError(f"{path}:{_line_of(text, 'experiment')}: config is for {declared!r}, not {experiment!r}")
    params = cfg.get("parameters", {})
    if not isinstance(params, dict):
        raise ConfigError(f"{path}:{_line_of(text, 'parameters')}: 'parameters' must be an object")
    output = dict(cfg.get("output", {}))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set {item!r}: expected key=value")
        key, raw = item.split("=", 1)
        if key.startswith("output."):
            output[key[len("output."):]] = _parse_value(raw)
        else:
            params[key] = _parse_value(raw)
    if out is not None:
        output["path"] = str(out)
    for key in REQUIRED[experiment]:
        if key not in params:
            raise ConfigError(f"{path}:{_line_of(text, 'parameters')}: missing required parameter {key!r} for {experiment}")
    resolved = {**DEFAULTS[experiment], **params}
    if "dim" in resolved and (not isinstance(resolved["dim"], int) or resolved["dim"] < 2):
        raise ConfigError(f"{path}:{_line_of(text, 'dim')}: dim must be an integer >= 2")
    if resolved.get("dt") is not None and not resolved["dt"] > 0:
        raise ConfigError(f"{path}:{_line_of(text, 'dt')}: dt must be positive")
    fmt = output.get("format")
    if fmt is None:
        p = output.get("path")
        fmt = "json" if (p and str(p).endswith(".json")) or experiment in ("kraus-audit", "rates", "blackhole") else "csv"
    if fmt not in ("csv", "json"):
        raise ConfigError(f"{path}:{_line_of(text, 'format')}: output format must be csv or json")
    output["format"] = fmt
    return {"experiment": experiment, "parameters": resolved, "output": output}


def _locc_params(par) -> lindblad.LoccParams:
    omega = float(par.get("omega", 1.0))
    if "alpha" in par and "beta" in par:
        return lindblad.LoccParams(float(par["alpha"]), float(par["beta"]), omega)
    return lindblad.LoccParams.equal_rates(omega)


def _fmt(v) -> str:
    return f"{float(v):.16e}"


def _csv_text(cfg, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# format_version: {FORMAT_VERSION}\n")
    buf.write(f"# config: {json.dumps(cfg, sort_keys=True)}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _json_text(cfg, results) -> str:
    return json.dumps({"format_version": FORMAT_VERSION, "config": cfg, "results": results},
                      sort_keys=True, indent=2) + "\n"


def run_revival(cfg):
    par = cfg["parameters"]
    p = _locc_params(par)
    dim = par["dim"]
    nbars = par["nbar"] if isinstance(par["nbar"], list) else [par["nbar"]]
    times = np.linspace(0.0, float(par["t_final"]), int(par["n_times"]))
    lam = p.coupling(par["convention"]) / p.omega
    cp = coherent.CoherentParams(p.omega, lam * p.omega)
    rows, results = [], []
    for nbar in nbars:
        analytic = coherent.signal_thermal(cp, nbar, times)
        numeric = lindblad.revival_curve(p, nbar, times, dim=dim, dt=par["dt"], convention=par["convention"],
                                         include_drift=par["include_drift"],
                                         max_deficit=float(par["max_deficit"]))
        rows += [(t, nbar, a, b) for t, a, b in zip(times, analytic, numeric)]
        results.append({"nbar": nbar, "t": times.tolist(), "P_coherent_analytic": analytic.tolist(),
                        "P_locc_numeric": numeric.tolist()})
    return ["t", "nbar", "P_coherent_analytic", "P_locc_numeric"], rows, results, {}


def run_trajectories(cfg):
    par = cfg["parameters"]
    p = _locc_params(par)
    dim = par["dim"]
    osc = thermal_state(dim, float(par["nbar"]))
    rho0 = DensityState(coherent.probe_initial_state(osc), (dim, 2))
    n_keep = par["current_files"] if par["current_files"] is not None else par["n_traj"]
    ens = stochastic.ensemble_average(rho0, p, float(par["t_final"]), float(par["dt"]), int(par["n_traj"]),
                                      int(par["seed"]), store_every=int(par["store_every"]), scheme=par["scheme"],
                                      workers=par["workers"], keep_currents=int(n_keep))
    _, x, sz = lindblad.locc_operators(dim)
    rows = []
    for t, s, pur in zip(ens.times, ens.states, ens.mean_purity):
        rows.append((t, s.expect(x).real, s.expect(sz).real, s.purity(), pur, negativity(s).negativity))
    extra = {"currents_mean": (ens.step_times, ens.mean_current_A, ens.mean_current_B)}
    for seed, (ja, jb) in ens.kept_currents.items():
        extra[f"currents_seed{seed}"] = (ens.step_times, ja, jb)
    results = [dict(zip(["t", "mean_x", "mean_sz", "purity_of_mean", "mean_conditional_purity", "negativity"], r))
               for r in rows]
    return ["t", "mean_x", "mean_sz", "purity_of_mean", "mean_conditional_purity", "negativity"], rows, results, extra


def kraus_audit(p: lindblad.LoccParams, dim: int, dts, n_samples: int = 50, seed: int = 7) -> dict:
    """Completeness, representation-freedom, product-form and separability checks of the LOCC channel."""
    gen = lindblad.build_locc_generator(p, dim)
    gen_nofree = lindblad.build_locc_generator(p, dim, include_free=False)
    samples = kraus.default_sample_states((dim, 2), n_samples, seed)
    rng = np.random.default_rng(seed)
    completeness, product_dist, rk4_dist = [], [], []
    for dt in dts:
        raw = kraus.kraus_from_generator(gen, dt)
        completeness.append(raw.completeness_defect())
        prod = kraus.locc_product_form_kraus(p, dim, dt)
        product_dist.append(kraus.channel_distance(prod, kraus.kraus_from_generator(gen_nofree, dt), samples))
    for dt in dts[:2]:
        raw = kraus.kraus_from_generator(gen, dt)
        rhs = lindblad._Rhs(gen)
        rk4_dist.append(max(trace_distance(kraus._channel_raw(raw, s.data), lindblad.rk4_step(rhs, np.array(s.data), dt))
                            for s in samples[:10]))
    dt0 = dts[0]
    raw = kraus.kraus_from_generator(gen, dt0)
    (ma, fb), (mb, fa) = kraus.locc_loop_operators(p, dim)
    loop = kraus.kraus_from_generator(kraus.directional_generator(ma, fb, 0), dt0)
    mixed = kraus.mix_kraus(loop, kraus.HADAMARD_MIX)
    u = random_unitary(len(raw), rng)
    mix_inv = max(kraus.channel_distance(raw, kraus.mix_kraus(raw, u), samples),
                  kraus.channel_distance(loop, mixed, samples))
    prod = kraus.locc_product_form_kraus(p, dim, dt0)
    return {
        "dts": list(dts),
        "completeness_defect": completeness,
        "completeness_exponent": kraus.fit_exponent(dts, completeness),
        "mix_invariance_max_distance": mix_inv,
        "product_vs_generator_distance": product_dist,
        "product_vs_generator_exponent": kraus.fit_exponent(dts, product_dist),
        "generator_kraus_vs_rk4_distance": rk4_dist,
        "separability_defect_product_form": kraus.separability_defect(prod),
        "separability_defect_product_pair": kraus.separability_defect(kraus.product_form_pair(ma, fb, dt0, 0)),
        "separability_defect_raw_locc": kraus.separability_defect(raw),
    }


def run_kraus_audit(cfg):
    par = cfg["parameters"]
    report = kraus_audit(_locc_params(par), par["dim"], [float(d) for d in par["dts"]], int(par["n_samples"]),
                         int(par["seed"]))
    rows = [(dt, c, d) for dt, c, d in zip(report["dts"], report["completeness_defect"],
                                           report["product_vs_generator_distance"])]
    return ["dt", "completeness_defect", "product_vs_generator_distance"], rows, report, {}


def run_rates(cfg):
    par = cfg["parameters"]
    labels = par["scenario"] if isinstance(par["scenario"], list) else [par["scenario"]]
    out, rows = [], []
    for label in labels:
        overrides = {}
        if par.get("omega") is not None:
            overrides["omega"] = float(par["omega"])
        if label == "neutron" and par["compton"] == "reduced":
            overrides.update(d="compton_reduced", l="compton_reduced")
        try:
            s = noise_budget.load_scenario(label, **overrides)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
        r = noise_budget.symmetric_split(s)
        rec = {"scenario": label, "g": r.g, "gamma_symmetric": r.gamma_symmetric,
               "gamma_asymmetric": r.gamma_asymmetric, "in_hz": r.in_hz(), "notes": r.notes}
        out.append(rec)
        rows.append((r.g, r.gamma_symmetric, r.gamma_asymmetric))
    return ["g", "gamma_symmetric", "gamma_asymmetric"], rows, out, {}


def run_blackhole(cfg):
    masses = cfg["parameters"]["masses"]
    masses = masses if isinstance(masses, list) else [masses]
    out, rows = [], []
    for m in masses:
        b = noise_budget.blackhole_comparison(float(m))
        out.append({"mass": b.mass, "locc_heating": b.locc_heating, "hawking_power": b.hawking_power, "ratio": b.ratio})
        rows.append((b.mass, b.locc_heating, b.hawking_power, b.ratio))
    return ["mass", "locc_heating", "hawking_power", "ratio"], rows, out, {}


RUNNERS = {
    "revival": run_revival,
    "trajectories": run_trajectories,
    "kraus-audit": run_kraus_audit,
    "rates": run_rates,
    "blackhole": run_blackhole,
}


def run(cfg: dict) -> dict:
    """Execute a resolved config and write its outputs; returns ``{path or '-': text}``."""
    columns, rows, results, extra = RUNNERS[cfg["experiment"]](cfg)
    fmt = cfg["output"]["format"]
    text = _csv_text(cfg, columns, rows) if fmt == "csv" else _json_text(cfg, results)
    path = cfg["output"].get("path")
    written = {}
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
        written[path] = text
        stem = Path(path)
        for name, (t, ja, jb) in extra.items():
            side = stem.with_name(f"{stem.stem}_{name}.csv")
            side_text = _csv_text(cfg, ["t", "J_A", "J_B"], zip(t, ja, jb))
            side.write_text(side_text)
            written[str(side)] = side_text
    else:
        sys.stdout.write(text)
        written["-"] = text
    return written


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="loccgrav", description="Run LOCC-gravity revival experiments from JSON configs.")
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", required=True, help="path to a JSON experiment config")
    ap.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                    help="override a parameter (JSON-parsed value); prefix output. for output keys")
    ap.add_argument("--out", default=None, help="output path (overrides output.path)")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        ap.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    try:
        cfg = load_config(args.config, args.experiment, args.overrides, args.out)
    except ConfigError as exc:
        if "config is empty" in str(exc):
            ap.print_usage(sys.stderr)
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, StepFailure, TruncationError, InvalidStateError) as exc:
        print(f"numerical invariant failed ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
