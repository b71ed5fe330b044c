"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 invalid input or
configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .copulas import CopulaSpec
from .cyber import cyber_cdf
from .dynamic import sfdc_curve, sfdf_curve, sweep_patch_time_sfdc
from .errors import CopulaRiskError, NumericError
from .joint import JointScenario, ProbabilityCurve, joint_curve, sweep_dependence, sweep_patch_time
from .presets import EXPERIMENT_PRESETS, ConfigError, ExperimentConfig, config_from_dict, load_config
from .safety import phase_params, weibull_cdf
from .tables import TABLE_IDS, reproduce, table_title
from .verification import McConfig, analytic_joint, closed_form_equivalence, closed_form_fuzz, mc_joint_cdf, run_benchmark

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

CLOSED_FORM_TOL = 1e-8
FUZZ_TOL = 1e-7
MIN_SPEED_RATIO = 10.0
MC_SIGMAS = 3.0


class UsageError(CopulaRiskError, ValueError):
    """Bad command-line arguments that argparse cannot catch by itself."""


def _float_list(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one value")
    return values


def _add_config_args(p: argparse.ArgumentParser, default_preset: Optional[str] = None) -> None:
    p.add_argument("--preset", default=default_preset, help="named experiment preset (see `presets`)")
    p.add_argument("--config", metavar="PATH", help="JSON configuration, overlaid on --preset if both are given")
    p.add_argument("--t-max", type=float, help="override the grid end time")
    p.add_argument("--n-points", type=int, help="override the number of grid points")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")


def _resolve_config(args) -> ExperimentConfig:
    if args.config:
        cfg = load_config(args.config, args.preset)
    elif args.preset:
        cfg = config_from_dict({"preset": args.preset})
    else:
        raise ConfigError("config: give --preset or --config")
    if args.t_max is not None or args.n_points is not None:
        doc = dict(cfg.source)
        grid = dict(doc.get("grid") or {})
        if args.t_max is not None:
            grid["t_max"] = args.t_max
        if args.n_points is not None:
            grid["n_points"] = args.n_points
        doc["grid"] = grid
        doc.pop("preset", None)
        cfg = config_from_dict(doc)
    return cfg


def _scenario(cfg: ExperimentConfig, args) -> JointScenario:
    scenario = cfg.scenario()
    if getattr(args, "t", None) is not None:
        if not (args.t >= 0 and math.isfinite(args.t)):
            raise UsageError(f"--t must be a finite non-negative time, got {args.t}")
        scenario = replace(scenario, grid=(float(args.t),))
    return scenario


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _render(curve: ProbabilityCurve, fmt: str) -> str:
    return curve.to_json() if fmt == "json" else curve.to_csv()


def _write_curve(curve: ProbabilityCurve, cfg: ExperimentConfig, args) -> None:
    fmt = args.format or cfg.output_format
    _emit(_render(curve, fmt), args.out or cfg.output_path)


def cmd_marginal(args) -> int:
    cfg = _resolve_config(args)
    if args.phase:
        cfg = replace(cfg, safety=phase_params(args.phase, cfg.safety.f0_offset))
    scenario = _scenario(cfg, args)
    times = np.asarray(scenario.grid)
    if args.kind == "cyber":
        curve = ProbabilityCurve(times, np.asarray(cyber_cdf(times, scenario.cyber)), "cyber marginal")
    else:
        curve = ProbabilityCurve(times, np.asarray(weibull_cdf(times, scenario.safety)), "safety marginal")
    _write_curve(curve, cfg, args)
    return EXIT_OK


def cmd_joint(args) -> int:
    cfg = _resolve_config(args)
    _write_curve(joint_curve(_scenario(cfg, args)), cfg, args)
    return EXIT_OK


def _dynamic_params(cfg: ExperimentConfig, args):
    if cfg.dynamic is None:
        raise ConfigError("dynamic: section missing (use a *-dyn preset or add it to the config)")
    dyn = cfg.dynamic
    if args.t_cut is not None:
        dyn = dyn.with_t_cut(args.t_cut)
    if args.mode is not None:
        dyn = replace(dyn, mode=args.mode)
    return dyn


def cmd_dynamic(args) -> int:
    cfg = _resolve_config(args)
    dyn = _dynamic_params(cfg, args)
    scenario = _scenario(cfg, args)
    curve = sfdc_curve(scenario, dyn) if args.which == "sfdc" else sfdf_curve(scenario, dyn)
    if curve.meta.get("clamped_points"):
        print(f"warning: {curve.meta['clamped_points']} points clamped to [0, 1]", file=sys.stderr)
    _write_curve(curve, cfg, args)
    return EXIT_OK


def _slug(value: float) -> str:
    return re.sub(r"[^0-9a-zA-Z.+-]", "_", f"{value:g}")


def cmd_sweep(args) -> int:
    cfg = _resolve_config(args)
    scenario = _scenario(cfg, args)
    values = args.values
    if args.field == "t_patch":
        if args.which:
            curves = sweep_patch_time_sfdc(scenario, _dynamic_params(cfg, args), values)
        else:
            curves = sweep_patch_time(scenario, values)
    else:
        if args.which:
            raise UsageError("--which is only supported with --field t_patch")
        expected = cfg.copula.parameter_name
        if expected is None:
            raise ConfigError(f"copula.family: {cfg.copula.family} has no dependence parameter to sweep")
        if args.field != "dependence" and args.field != expected:
            raise ConfigError(f"copula: {cfg.copula.family} is parameterised by {expected}, not {args.field}")
        curves = sweep_dependence(scenario, values)
    fmt = args.format or cfg.output_format
    out_dir = Path(args.out or cfg.output_path or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    name = args.field if args.field != "dependence" else (cfg.copula.parameter_name or "dependence")
    for value, curve in zip(values, curves):
        path = out_dir / f"{args.prefix}{name}={_slug(value)}.{fmt}"
        path.write_text(_render(curve, fmt))
        print(path)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    ids = TABLE_IDS if args.table_id == "all" else (args.table_id,)
    if args.table_id != "all" and args.table_id not in TABLE_IDS:
        raise UsageError(f"unknown table {args.table_id!r}; expected one of {', '.join(TABLE_IDS)} or all")
    reports = [reproduce(tid) for tid in ids]
    if args.format == "json":
        text = json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"
    else:
        text = "\n".join(r.to_text() for r in reports)
    _emit(text, args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED


def _verify_mc(args) -> int:
    cfg = _resolve_config(args)
    times = tuple(args.times)
    mc = mc_joint_cdf(cfg.scenario(), McConfig(args.n, args.seed, times))
    analytic = analytic_joint(cfg.scenario(), times)
    sigma = np.where(mc.stderr > 0, mc.stderr, np.inf)
    z = np.where(mc.stderr > 0, (mc.values - analytic) / sigma, np.where(mc.values == analytic, 0.0, np.inf))
    ok = bool(np.all(np.abs(z) <= MC_SIGMAS))
    report = {
        "copula": cfg.copula.label(),
        "n_samples": args.n,
        "seed": args.seed,
        "censored": mc.meta["censored"],
        "beyond_horizon": mc.meta["beyond_horizon"],
        "points": [
            {"t": float(t), "mc": float(m), "stderr": float(s), "analytic": float(a), "z": float(zz)}
            for t, m, s, a, zz in zip(mc.times, mc.values, mc.stderr, analytic, z)
        ],
        "passed": ok,
    }
    if args.format == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        lines = [
            f"monte carlo check: {report['copula']}, n={args.n}, seed={args.seed}, "
            f"censored={report['censored']}, beyond horizon={report['beyond_horizon']}",
            f"{'t':>8} {'mc':>12} {'stderr':>10} {'analytic':>12} {'z':>7}",
        ]
        lines += [f"{p['t']:8g} {p['mc']:12.6g} {p['stderr']:10.3g} {p['analytic']:12.6g} {p['z']:7.2f}" for p in report["points"]]
        lines.append(f"all points within {MC_SIGMAS:g} sigma: {'PASS' if ok else 'FAIL'}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    if args.curve_out:
        Path(args.curve_out).write_text(mc.to_csv())
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _verify_closed_form(args) -> int:
    cfg = _resolve_config(args)
    cyber = cfg.cyber.without_cap()
    grid = np.linspace(0.0, 200.0, args.grid_points)
    deviation = closed_form_equivalence(cyber, grid)
    fuzz = closed_form_fuzz(args.fuzz, args.seed) if args.fuzz > 0 else []
    fuzz_max = max((r["max_abs_deviation"] for r in fuzz), default=0.0)
    ok = deviation <= CLOSED_FORM_TOL and fuzz_max <= FUZZ_TOL
    report = {
        "grid_points": args.grid_points,
        "max_abs_deviation": deviation,
        "tolerance": CLOSED_FORM_TOL,
        "fuzz_cases": len(fuzz),
        "fuzz_max_abs_deviation": fuzz_max,
        "fuzz_tolerance": FUZZ_TOL,
        "passed": ok,
    }
    if args.format == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        text = (
            f"closed form vs quadrature on [0, 200] ({args.grid_points} points): max |delta| = {deviation:.3e} "
            f"(tol {CLOSED_FORM_TOL:g})\n"
            f"parameter fuzz ({len(fuzz)} cases, seed {args.seed}): max |delta| = {fuzz_max:.3e} (tol {FUZZ_TOL:g})\n"
            f"{'PASS' if ok else 'FAIL'}\n"
        )
    _emit(text, args.out)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_verify(args) -> int:
    return _verify_mc(args) if args.mode == "mc" else _verify_closed_form(args)


def cmd_bench(args) -> int:
    cfg = _resolve_config(args)
    report = run_benchmark(
        cfg.cyber.without_cap(),
        seed=args.seed,
        n_groups=args.groups,
        points_per_group=args.points,
        repetitions=args.repetitions,
    )
    _emit(report.to_json(), args.out)
    print(
        f"speed ratio {report.speed_ratio:.1f} (closed form {report.mean_time_closed * 1e6:.1f} us, "
        f"quadrature {report.mean_time_quadrature * 1e6:.1f} us), {report.total_runtime:.1f} s",
        file=sys.stderr,
    )
    return EXIT_OK if report.speed_ratio >= MIN_SPEED_RATIO else EXIT_CHECK_FAILED


def _describe(doc: dict) -> str:
    cop = doc["copula"]
    params = ", ".join(f"{k}={v:g}" for k, v in cop.items() if k != "family")
    text = (
        f"{cop['family']}({params}); safety {doc['safety']['phase']} f0={doc['safety']['f0_offset']:g}; "
        f"t_patch={doc['cyber']['t_patch']:g}"
    )
    if "dynamic" in doc:
        d = doc["dynamic"]
        text += f"; dynamic o1={d['o1']:g} o2={d['o2']:g} omega={d['omega']:g}"
    return text


def cmd_presets(args) -> int:
    if args.format == "json":
        _emit(json.dumps(EXPERIMENT_PRESETS, indent=2, sort_keys=True, default=str) + "\n", args.out)
    else:
        width = max(map(len, EXPERIMENT_PRESETS))
        lines = [f"{name:<{width}}  {_describe(doc)}" for name, doc in EXPERIMENT_PRESETS.items()]
        lines += ["", "tables: " + ", ".join(TABLE_IDS)]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="copula-risk", description="Joint safety and security failure probabilities via copulas."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("marginal", help="cyber or safety marginal CDF curve")
    p.add_argument("kind", choices=("cyber", "safety"))
    _add_config_args(p)
    _add_output_args(p)
    p.add_argument("--phase", choices=("infant", "random", "wearout"), help="override the safety lifecycle phase")
    p.add_argument("--t", type=float, help="evaluate at this single time instead of the grid")
    p.set_defaults(func=cmd_marginal)

    p = sub.add_parser("joint", help="joint failure probability curve")
    _add_config_args(p)
    _add_output_args(p)
    p.add_argument("--t", type=float, help="evaluate at this single time instead of the grid")
    p.set_defaults(func=cmd_joint)

    p = sub.add_parser("dynamic", help="dynamic failure model curve (SFDC or SFDF)")
    _add_config_args(p)
    _add_output_args(p)
    p.add_argument("--which", choices=("sfdc", "sfdf"), default="sfdc")
    p.add_argument("--t", type=float, help="evaluate at this single time instead of the grid")
    p.add_argument("--t-cut", type=float, help="intrusion time after which the attack influence is frozen")
    p.add_argument("--mode", choices=("delta_freeze", "literal"), help="continuation after t_cut")
    p.set_defaults(func=cmd_dynamic)

    p = sub.add_parser("sweep", help="one curve file per value of a swept field")
    _add_config_args(p)
    p.add_argument("--out", metavar="DIR", help="output directory (default: current directory)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--field", required=True, choices=("dependence", "rho", "theta", "t_patch"))
    p.add_argument("--values", required=True, type=_float_list, help="comma-separated values")
    p.add_argument("--which", choices=("sfdc",), help="sweep the SFDC curve instead of the joint curve (t_patch only)")
    p.add_argument("--t-cut", type=float)
    p.add_argument("--mode", choices=("delta_freeze", "literal"))
    p.add_argument("--prefix", default="", help="file name prefix")
    p.set_defaults(func=cmd_sweep, t=None)

    p = sub.add_parser("reproduce", help="recompute a published table and compare cell by cell")
    p.add_argument("table_id", help=f"one of {', '.join(TABLE_IDS)}, or all")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("verify", help="independent numerical checks")
    p.add_argument("mode", choices=("mc", "closed-form"))
    _add_config_args(p)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--n", type=int, default=1_000_000, help="Monte Carlo sample size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--times", type=_float_list, default=[50.0, 100.0, 150.0, 200.0], help="Monte Carlo check times")
    p.add_argument("--curve-out", metavar="PATH", help="also write the Monte Carlo curve as CSV")
    p.add_argument("--fuzz", type=int, default=100, help="random parameter sets for the closed-form check")
    p.add_argument("--grid-points", type=int, default=2001)
    p.set_defaults(func=cmd_verify, preset=None)

    p = sub.add_parser("bench", help="closed form vs quadrature timing benchmark (JSON report)")
    _add_config_args(p, default_preset="example1")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--groups", type=int, default=10)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--repetitions", type=int, default=100)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("presets", help="list experiment presets and reproducible tables")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_presets)
    return parser


_VERIFY_DEFAULT_PRESETS = {"mc": "results200", "closed-form": "example1"}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and args.preset is None and args.config is None:
        args.preset = _VERIFY_DEFAULT_PRESETS[args.mode]
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (CopulaRiskError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
