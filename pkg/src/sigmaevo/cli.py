"""Command line entry point: ``sigmaevo {classify,simulate,decay,lifespan,check}``.

Exit codes: 0 ok, 2 blow-up detected, 3 invariant failure, 4 adaptive
step underflow (suspected blow-up), 64 configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

import numpy as np

from . import config as cfgmod
from . import model
from .config import ConfigError, fmt
from .store import SweepStore, config_key

log = logging.getLogger("sigmaevo")

EXIT_OK, EXIT_BLOWUP, EXIT_CHECK, EXIT_UNDERFLOW, EXIT_CONFIG = 0, 2, 3, 4, 64


def _outdir(args, cfg) -> str:
    d = args.output or cfg.get("output_dir") or "."
    os.makedirs(d, exist_ok=True)
    return d


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, Fraction):
        return float(o)
    if isinstance(o, np.generic):
        return o.item()
    if hasattr(o, "to_dict"):
        return o.to_dict()
    raise TypeError(type(o).__name__)


def _exact(v):
    # decimal literals become exact rationals so boundary cases classify exactly
    if isinstance(v, int):
        return v
    return Fraction(repr(v))


# ---------------------------------------------------------------------------

def cmd_classify(cfg, args) -> int:
    out = _outdir(args, cfg)
    rows = []
    header = ("n", "sigma", "sigma1", "sigma2", "m", "p", "p_crit", "gamma_m", "alpha_u", "alpha_grad", "verdict")
    lines = ["  ".join(f"{h:>10}" for h in header)]
    for i, row in enumerate(cfg["rows"]):
        m = _exact(row.get("m", 1))
        base = {k: _exact(row[k]) for k in ("n", "sigma", "sigma1", "sigma2")}
        eps = _exact(row.get("eps", 1))
        try:
            if row["p"] == "p_crit":
                probe = model.ModelParams(p=2, eps=eps, **base)
                p = model.p_crit(probe, m)
            else:
                p = _exact(row["p"])
            params = model.ModelParams(p=p, eps=eps, **base)
            model.check_m(m)
        except (model.ParameterError, model.CriticalityError) as exc:
            raise ConfigError(f"rows[{i}]: {exc}") from exc
        v = model.classify(params, m)
        rec = {"row": i, "params": params.to_dict(), "m": float(m), **v.to_dict()}
        rows.append(rec)
        cells = [params.n, float(params.sigma), float(params.sigma1), float(params.sigma2), float(m),
                 float(params.p), v.p_crit, v.gamma_m, v.alpha_u, v.alpha_grad, v.verdict.value]
        lines.append("  ".join(f"{'-' if c is None else (fmt(float(c)) if not isinstance(c, str) else c):>10}"
                               for c in cells))
        if v.failed_conditions:
            lines.append(f"{'':>10}  failed: {', '.join(v.failed_conditions)}")
    print("\n".join(lines))
    _write_json(os.path.join(out, "classify.json"), {"rows": rows})
    return EXIT_OK


def _simulation_inputs(cfg):
    from .propagator import SolverOptions
    from .spectral import default_half_length, make_grid, make_initial_data

    params = cfgmod.model_params(cfg)
    m = cfg.get("m", 1)
    data = dict(cfg.get("data", {"kind": "gaussian"}))
    kind = data.pop("kind", "gaussian")
    grid_cfg = cfg.get("grid", {})
    L = float(grid_cfg.get("half_length", default_half_length(kind, params.n, m)))
    N = int(grid_cfg.get("points", 1024))
    try:
        grid = make_grid(params.n, L, N)
        state = make_initial_data(kind, grid, params, m, **data)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"data/grid: {exc}") from exc
    t_end = float(cfg["t_end"])
    integ = dict(cfg.get("integrator", {}))
    try:
        opts = SolverOptions(**integ)
    except TypeError as exc:
        raise ConfigError(f"integrator: {exc}") from exc
    opts.sample_times = cfgmod.sample_grid(cfg.get("sample_times"), t_end)
    opts.snapshot_times = cfgmod.sample_grid(cfg.get("snapshot_times"), t_end)
    return params, m, state, t_end, opts


def _exit_for(trace) -> int:
    if trace.status == "step_underflow":
        return EXIT_UNDERFLOW
    return EXIT_BLOWUP if trace.blowup else EXIT_OK


def cmd_simulate(cfg, args) -> int:
    from .propagator import solve
    from .spectral import Field, write_field_binary

    out = _outdir(args, cfg)
    key = config_key(cfg)
    summary_path = os.path.join(out, "summary.json")
    if args.resume and os.path.exists(summary_path):
        with open(summary_path) as fh:
            prev = json.load(fh)
        if prev.get("config_key") == key:
            log.info("run %s already complete; nothing to do", key[:12])
            return prev.get("exit_code", EXIT_OK)
    params, m, state, t_end, opts = _simulation_inputs(cfg)
    trace = solve(state, t_end, params, opts)
    trace.to_csv(os.path.join(out, "trace.csv"))
    for i, (t, u, _v) in enumerate(trace.snapshots):
        write_field_binary(os.path.join(out, f"snapshot_{i:04d}.bin"), Field.from_values(state.grid, u))
    code = _exit_for(trace)
    summary = {
        "config_key": key,
        "status": trace.status,
        "blowup": trace.blowup,
        "T_blow": trace.blowup_time,
        "t_final": float(trace.final_state.time),
        "n_steps": trace.meta["n_steps"],
        "zero_mode_flag": trace.zero_mode_flag,
        "exit_code": code,
        "rng_seed": cfg.get("rng_seed"),
    }
    _write_json(summary_path, summary)
    print(f"status={trace.status} t_final={fmt(float(trace.final_state.time))}"
          + (f" T_blow={fmt(float(trace.blowup_time))}" if trace.blowup else ""))
    return code


def cmd_decay(cfg, args) -> int:
    from .diagnostics import fit_decay, plot_decay_svg, records_to_csv
    from .propagator import solve

    out = _outdir(args, cfg)
    params, m, state, t_end, opts = _simulation_inputs(cfg)
    trace = solve(state, t_end, params, opts)
    if trace.blowup:
        print(f"run blew up at t={fmt(float(trace.blowup_time))}; no decay fit")
        return EXIT_BLOWUP
    window = cfg.get("window")
    fits = [fit_decay(trace, kind, window) for kind in cfg.get("norms", ["L2", "Hsigma_dot"])]
    au, ag = model.decay_exponents(params, m)
    theory = {"L2": float(au), "Hsigma_dot": float(ag)}
    report = {"fits": [f.to_dict() for f in fits], "theory": theory, "rng_seed": cfg.get("rng_seed")}
    _write_json(os.path.join(out, "decay.json"), report)
    records_to_csv(fits, os.path.join(out, "decay.csv"))
    trace.to_csv(os.path.join(out, "trace.csv"))
    plot_decay_svg(trace, fits, os.path.join(out, "decay.svg"))
    for f in fits:
        ref = theory.get(f.norm_kind)
        print(f"{f.norm_kind:>10}  exponent={fmt(f.exponent)}  stderr={fmt(f.stderr)}"
              + (f"  theory={fmt(ref)}" if ref is not None else "")
              + ("  [not a power law]" if f.non_power_law else ""))
    return EXIT_OK


def cmd_lifespan(cfg, args) -> int:
    from .diagnostics import LifespanSetup, lifespan_sweep, plot_lifespan_svg, records_to_csv

    out = _outdir(args, cfg)
    params = cfgmod.model_params(cfg)
    m = cfg.get("m", 1)
    try:
        setup = LifespanSetup(**cfg.get("setup", {}))
    except TypeError as exc:
        raise ConfigError(f"setup: {exc}") from exc
    store_path = os.path.join(out, "sweep.jsonl")
    if not args.resume and os.path.exists(store_path):
        os.remove(store_path)
    store = SweepStore(store_path)
    try:
        records, fit = lifespan_sweep(params, m, cfg["eps_list"], float(cfg["horizon"]), setup,
                                      workers=args.workers, store=store)
    except model.CriticalityError as exc:
        raise ConfigError(str(exc)) from exc
    _write_json(os.path.join(out, "lifespan.json"),
                {"records": [r.to_dict() for r in records], "fit": fit.to_dict(), "rng_seed": cfg.get("rng_seed")})
    records_to_csv(records, os.path.join(out, "lifespan.csv"))
    plot_lifespan_svg(records, fit, os.path.join(out, "lifespan.svg"))
    for r in records:
        print(f"eps={fmt(r.eps)}  T={fmt(r.T_blow)}" + ("  (censored)" if r.censored else ""))
    print(f"slope={fmt(fit.slope)}  stderr={fmt(fit.stderr)}  theory={fmt(fit.theory)}  monotone={fit.monotone}")
    return EXIT_OK


def cmd_check(cfg, args) -> int:
    from .checks import run_all

    out = _outdir(args, cfg)
    results = run_all(cfg.get("only"))
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  ({r.detail})")
    n_ok = sum(r.passed for r in results)
    print(f"{n_ok}/{len(results)} properties hold")
    _write_json(os.path.join(out, "check.json"), {"results": [r.to_dict() for r in results]})
    return EXIT_OK if n_ok == len(results) else EXIT_CHECK


COMMANDS = {"classify": cmd_classify, "simulate": cmd_simulate, "decay": cmd_decay,
            "lifespan": cmd_lifespan, "check": cmd_check}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sigmaevo", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file (optional for check)", required=name != "check")
        p.add_argument("--output", help="output directory (overrides output_dir)")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--resume", action="store_true")
        p.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = cfgmod.load(args.config, args.command) if args.config else {}
        if args.workers < 1:
            raise ConfigError("--workers must be ≥ 1")
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
