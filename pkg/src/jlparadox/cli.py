"""Command-line interface.

Subcommands: ``pvalue``, ``bf``, ``scan-paradox`` and ``bump``.  Every
subcommand accepts ``--json``.  Exit codes: 0 success, 2 usage, 3 I/O,
4 configuration, 5 numerical failure.

``bump`` takes its master seed from ``--seed``, else ``[toys] seed`` in the
config, else the ``JLPARADOX_SEED`` environment variable, else 0.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import os
import shlex
import sys
import warnings

import numpy as np

from . import __version__
from .bayes import (AlternativePrior, AsymptoticRegimeWarning, MixturePrior, PriorFamily,
                    jl_crossover, paradox_report)
from .bumphunt import generate_toy, global_p_mc, global_p_upcrossing, run_toys, scan, toy_rng
from .bumphunt.config import RunConfig, load_config, parse_config
from .bumphunt.toys import STREAM_CALIBRATION, STREAM_NULL, STREAM_OBSERVED
from .errors import (CalibrationError, ConfigError, ConsistencyError, InvalidInputError,
                     JLError, NumericalError)
from .likelihood import max_lik_ratio, neg2_log_lik_ratio
from .normal import Measurement, Tails, p_from_z, z_from_p
from .reference import ref_discrepancy_asymptotic

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3, 4, 5
SEED_ENV = "JLPARADOX_SEED"
CONVENTION_NOTE = "discovery threshold alpha_z is a convention, not a law"


class _IOFailure(Exception):
    pass


def _clean(obj):
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats as strings."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def _dumps(doc) -> str:
    return json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False)


def _fmt(v):
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _print_human(doc, indent=""):
    for key, value in doc.items():
        if isinstance(value, dict):
            print(f"{indent}{key}:")
            _print_human(value, indent + "  ")
        elif isinstance(value, list):
            print(f"{indent}{key}: [{', '.join(_fmt(v) for v in value[:8])}{', ...' if len(value) > 8 else ''}]")
        else:
            print(f"{indent}{key}: {_fmt(value)}")


def _emit(doc, as_json):
    if as_json:
        print(_dumps(doc))
    else:
        _print_human(doc)


def _tails(value):
    try:
        return Tails.coerce(value)
    except InvalidInputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands


def cmd_pvalue(args):
    tails = args.tails
    if args.z is not None:
        res = p_from_z(args.z, tails)
        z, p, log10_p = res.z, res.p, res.log10_p
    else:
        z = z_from_p(args.p, tails)
        p, log10_p = args.p, math.log10(args.p)
    finite = math.isfinite(z)
    doc = {
        "z": z,
        "p": p,
        "log10_p": log10_p,
        "tails": tails.value,
        "lambda": max_lik_ratio(z) if finite else 0.0,
        "neg2_log_lambda": neg2_log_lik_ratio(z) if finite else math.inf,
        "d": ref_discrepancy_asymptotic(z) if finite else math.inf,
    }
    _emit(doc, args.json)
    return EXIT_OK


def _bf_doc(z, r, prior_family, pi0, eps0, method, alpha_z, hierarchy_ratio):
    m = Measurement(theta_hat=z, sigma_tot=1.0)
    prior = MixturePrior(pi0=pi0, theta0=0.0, alt=AlternativePrior(PriorFamily(prior_family), r),
                         epsilon0=eps0)
    alpha = p_from_z(alpha_z, Tails.ONE).p
    rep = paradox_report(m, prior, alpha=alpha, hierarchy_ratio=hierarchy_ratio, method=method)
    doc = rep.to_dict()
    doc.update(prior=prior_family, pi0=pi0, epsilon0_over_sigma=eps0, alpha_z=alpha_z,
               threshold_note=CONVENTION_NOTE, asymptotic_valid=r >= 10)
    return doc


def cmd_bf(args):
    doc = _bf_doc(args.z, args.r, args.prior, args.pi0, args.eps0, args.method, args.alpha_z,
                  args.hierarchy_ratio)
    _emit(doc, args.json)
    return EXIT_OK


SCAN_COLUMNS = ["z", "r", "log10_bf_exact", "bf_exact", "log10_bf_asymptotic", "posterior_h0", "p",
                "disagreement", "r_crossover"]


def _axis(lo, hi, n, log):
    if n < 1:
        raise InvalidInputError("grid sizes must be >= 1")
    if n == 1:
        return np.array([lo])
    return np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)


def cmd_scan_paradox(args):
    zs = _axis(args.z_min, args.z_max, args.nz, log=False)
    rs = _axis(args.r_min, args.r_max, args.nr, log=True)
    rows = []
    for z in zs:
        cross = jl_crossover(float(z), args.prior)
        for r in rs:
            d = _bf_doc(float(z), float(r), args.prior, args.pi0, 0.0, args.method, args.alpha_z, 100.0)
            rows.append({
                "z": float(z), "r": float(r),
                "log10_bf_exact": d["exact"]["log10_bf"], "bf_exact": d["exact"]["bf"],
                "log10_bf_asymptotic": d["asymptotic"]["log10_bf"],
                "posterior_h0": d["exact"]["posterior_h0"], "p": d["p"],
                "disagreement": d["disagreement"],
                "r_crossover": "none" if cross is None else cross,
            })
    if args.out:
        try:
            with open(args.out, "w", newline="", encoding="utf-8") as fh:
                w = csv.DictWriter(fh, fieldnames=SCAN_COLUMNS)
                w.writeheader()
                for row in rows:
                    w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        except OSError as exc:
            raise _IOFailure(f"cannot write {args.out}: {exc}") from exc
    summary = {"n_rows": len(rows), "prior": args.prior, "pi0": args.pi0, "out": args.out,
               "crossover": {repr(float(z)): r["r_crossover"] for z, r in
                             zip(zs, rows[:: len(rs)])}}
    if args.out is None or args.json:
        summary["rows"] = rows
    _emit(summary, args.json)
    return EXIT_OK


def _resolve_seed(flag, cfg: RunConfig):
    if flag is not None:
        return int(flag)
    if cfg.seed is not None:
        return cfg.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(SEED_ENV, f"not an integer: {env!r}") from None
    return 0


def run_bump(cfg: RunConfig, seed: int, n_toys: int, workers: int, command_line: str = ""):
    """Full campaign: observed scan, MC global p-value and upcrossing estimate."""
    model = cfg.model
    if cfg.observed is not None:
        observed = cfg.observed
    else:
        observed = generate_toy(model, cfg.inject_theta, cfg.inject_psi, toy_rng(seed, 0, STREAM_OBSERVED))
    result = scan(model, observed)
    toys = run_toys(model, n_toys, seed, STREAM_NULL, workers)
    mc = global_p_mc(model, result.p_min, n_toys, seed, toys=toys)
    calib = run_toys(model, cfg.n_calibration, seed, STREAM_CALIBRATION, workers)
    up = global_p_upcrossing(model, result, target_z=cfg.target_z, reference_z=cfg.reference_z,
                             toys=calib)
    alpha = p_from_z(cfg.alpha_z, Tails.ONE).p
    manifest = {
        "command_line": command_line,
        "config_hash": cfg.hash,
        "config_text": cfg.text,
        "master_seed": seed,
        "n_toys": n_toys,
        "workers": workers,
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    return {
        "manifest": manifest,
        "model": {
            "n_bins": model.n_bins,
            "signal_resolution": model.signal_resolution,
            "luminosity_scale": model.luminosity_scale,
            "local_method": model.local_method,
            "n_masses": int(model.mass_grid.size),
            "data_source": cfg.data_source,
            "observed_counts": observed.counts.tolist(),
        },
        "scan": result.to_dict(),
        "global_mc": mc.to_dict(),
        "global_upcrossing": up.to_dict(),
        "thresholds": {
            "alpha_z": cfg.alpha_z,
            "alpha": alpha,
            "note": CONVENTION_NOTE,
            "local_exceeds": bool(result.p_min <= alpha),
            "global_exceeds": bool(mc.global_p <= alpha),
        },
    }, result


def cmd_bump(args):
    try:
        if args.from_manifest:
            with open(args.from_manifest, encoding="utf-8") as fh:
                man = json.load(fh)["manifest"]
            cfg = parse_config(man["config_text"])
            seed = int(man["master_seed"]) if args.seed is None else args.seed
            n_toys = int(man["n_toys"]) if args.toys is None else args.toys
            if args.workers is None:
                args.workers = int(man["workers"])
        else:
            cfg = load_config(args.config)
            seed = None
            n_toys = args.toys if args.toys is not None else cfg.n_toys
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise _IOFailure(f"cannot read input: {exc}") from exc
    if seed is None:
        seed = _resolve_seed(args.seed, cfg)
    if n_toys < 100:
        raise InvalidInputError("--toys must be >= 100")
    workers = args.workers if args.workers is not None else cfg.workers
    doc, result = run_bump(cfg, seed, n_toys, workers, command_line=shlex.join(sys.argv))
    text = _dumps(doc)
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        if args.csv:
            with open(args.csv, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["psi", "local_p", "local_z", "theta_hat"])
                for row in result.rows():
                    w.writerow([repr(float(v)) for v in row])
    except OSError as exc:
        raise _IOFailure(f"cannot write output: {exc}") from exc
    if args.json:
        print(text)
    else:
        _print_human({
            "p_min": result.p_min, "psi_hat": result.psi_hat,
            "global_p_mc": doc["global_mc"]["global_p"],
            "global_p_mc_uncertainty": doc["global_mc"]["mc_uncertainty"],
            "global_p_mc_is_upper_limit": doc["global_mc"]["upper_limit"],
            "trials_factor_mc": doc["global_mc"]["trials_factor"],
            "global_p_upcrossing": doc["global_upcrossing"]["global_p"],
            "alpha_z": cfg.alpha_z, "note": CONVENTION_NOTE,
        })
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jlparadox", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pvalue", help="convert between z and p")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--z", type=float)
    g.add_argument("--p", type=float)
    p.add_argument("--tails", type=_tails, default=Tails.ONE, help="1 or 2 (default 1)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_pvalue)

    families = [f.value for f in PriorFamily]
    p = sub.add_parser("bf", help="Bayes factor and posterior for a point null")
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--r", type=float, required=True, help="tau / sigma_tot")
    p.add_argument("--prior", choices=families, default="normal")
    p.add_argument("--pi0", type=float, default=0.5)
    p.add_argument("--eps0", type=float, default=0.0, help="epsilon0 / sigma_tot")
    p.add_argument("--method", choices=["auto", "quadrature", "closed_form"], default="auto")
    p.add_argument("--alpha-z", type=float, default=5.0)
    p.add_argument("--hierarchy-ratio", type=float, default=100.0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bf)

    p = sub.add_parser("scan-paradox", help="grid of Bayes factors over (z, tau/sigma)")
    p.add_argument("--z-min", type=float, default=0.0)
    p.add_argument("--z-max", type=float, default=6.0)
    p.add_argument("--nz", type=int, default=13)
    p.add_argument("--r-min", type=float, default=1.0)
    p.add_argument("--r-max", type=float, default=1e8)
    p.add_argument("--nr", type=int, default=17)
    p.add_argument("--prior", choices=families, default="normal")
    p.add_argument("--pi0", type=float, default=0.5)
    p.add_argument("--method", choices=["auto", "quadrature", "closed_form"], default="auto")
    p.add_argument("--alpha-z", type=float, default=5.0)
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_scan_paradox)

    p = sub.add_parser("bump", help="bump-hunt campaign from a TOML config")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("config", nargs="?", help="TOML configuration file")
    src.add_argument("--from-manifest", help="re-run from a previous JSON result")
    p.add_argument("--toys", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="JSON result path")
    p.add_argument("--csv", help="per-mass CSV path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bump)
    return parser


def main(argv=None) -> int:
    """Run one command; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AsymptoticRegimeWarning)
            return args.func(args)
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, CalibrationError, ConsistencyError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InvalidInputError, JLError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
