"""Command-line surface.

Subcommands: run, flag-grid, sweep, calibrate, curves, scenario. All outputs
are CSV (17 significant digits, metadata comment line first) or JSON. Exit
codes: 0 ok, 2 argument errors, 3 model construction errors (Feller, SPD,
positivity, unknown scenario), 4 runtime NaN.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .calibration import SwaptionSpec, calibrate_cir_theta, calibrate_hw_sigma, cir_shift_fit
from .errors import (
    FellerViolation,
    FvawwrError,
    NoRoot,
    NotSPD,
    ParseError,
    PositivityViolation,
    SimulationNan,
    UnknownScenario,
)
from .fva import FvaFlags, FvaResult
from .ratemodels import CirParams, with_shift
from .scenarios import (
    DEFAULT_SWEEP_GRID,
    FLAG_CELLS,
    RHO_RI_CURVES,
    build_models,
    load_scenario,
    resolve_curve,
    run_flag_grid,
    swap_variants,
    sweep_correlation,
)
from .simulation import SimConfig, simulate
from .swaps import pathwise_exposure

CONSTRUCTION_ERRORS = (FellerViolation, NotSPD, PositivityViolation, UnknownScenario,
                       ParseError, NoRoot)


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_table(path: Path, meta: dict, header: list[str], rows) -> None:
    lines = ["# " + " ".join(f"{k}={v}" for k, v in meta.items())]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else _fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, meta: dict, header: list[str], rows) -> None:
    payload = {"meta": meta, "rows": [dict(zip(header, r)) for r in rows]}
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _writer(fmt: str):
    return _write_json if fmt == "json" else _write_table


def _suffix(fmt: str) -> str:
    return "json" if fmt == "json" else "csv"


def _meta(args, cfg: SimConfig) -> dict:
    return {
        "tool": "fvawwr",
        "version": __version__,
        "scenario": args.scenario,
        "seed": cfg.seed,
        "paths": cfg.n_paths,
        "sub_steps": cfg.sub_steps,
        "dates_per_year": cfg.dates_per_year,
    }


def _sim_config(args) -> SimConfig:
    return SimConfig(n_paths=args.paths, dates_per_year=args.dates_per_year,
                     sub_steps=args.sub_steps, seed=args.seed,
                     antithetic=args.antithetic, threads=args.threads)


def _swap_for(args, models):
    direction, _, label = args.swap.partition(":")
    variants = swap_variants(models.hw.base_curve, notional=args.notional,
                             maturity=models.horizon, pay_freq=args.pay_freq)
    try:
        swap = variants[(direction, label or "atm")]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"swap must be receiver|payer:atm|itm|otm, got {args.swap!r}")
    if args.float_convention != "fixed_at_start":
        from dataclasses import replace

        swap = replace(swap, float_convention=args.float_convention)
    return swap


RESULT_HEADER = ["spread", "tau_i", "tau_c", "fva_indep", "fva_wwr", "fva_total",
                 "wwr_pct", "ratio", "se_indep", "se_wwr", "seed", "n_paths"]


def _result_row(flags: FvaFlags, r: FvaResult):
    return [flags.spread_kind, "incl" if flags.include_tau_i else "excl",
            "incl" if flags.include_tau_c else "excl",
            r.fva_indep, r.fva_wwr, r.fva_total, r.wwr_pct, r.ratio,
            r.se_indep, r.se_wwr, float(r.seed), float(r.n_paths)]


def cmd_run(args) -> int:
    models = build_models(load_scenario(args.scenario))
    cfg = _sim_config(args)
    swap = _swap_for(args, models)
    flags = FvaFlags(include_tau_i=args.tau_i == "include",
                     include_tau_c=args.tau_c == "include",
                     spread_kind=args.spread)
    paths = simulate(models.hw, models.credit_i, models.credit_c, models.corr,
                     models.horizon, cfg)
    h = pathwise_exposure(paths, swap, models.hw)
    from .fva import compute_fva

    result, profile = compute_fva(models, swap, flags, cfg, paths=paths, h=h)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = _meta(args, cfg)
    meta["swap"] = args.swap
    write, sfx = _writer(args.format), _suffix(args.format)
    write(out / f"fva_result.{sfx}", meta, RESULT_HEADER, [_result_row(flags, result)])
    prof_rows = list(zip(profile.grid, profile.epe_indep, profile.epe_wwr,
                         profile.se_indep, profile.se_wwr))
    write(out / f"exposure_profile.{sfx}", meta,
          ["u", "epe_indep", "epe_wwr", "se_indep", "se_wwr"], prof_rows)
    print(f"fva_indep={result.fva_indep:.6f} fva_wwr={result.fva_wwr:.6f} "
          f"ratio={result.ratio:.6f} -> {out}")
    return 0


def cmd_flag_grid(args) -> int:
    models = build_models(load_scenario(args.scenario))
    cfg = _sim_config(args)
    swap = _swap_for(args, models)
    paths = simulate(models.hw, models.credit_i, models.credit_c, models.corr,
                     models.horizon, cfg)
    spreads = ["stochastic", "deterministic"] if args.spread == "both" else [args.spread]
    rows = []
    for spread in spreads:
        grid = run_flag_grid(models, swap, cfg, spread, paths=paths)
        for cell in FLAG_CELLS:
            result, _ = grid[cell]
            rows.append(_result_row(FvaFlags(cell[0], cell[1], spread), result))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = _meta(args, cfg)
    meta["swap"] = args.swap
    _writer(args.format)(out / f"fva_result.{_suffix(args.format)}", meta,
                         RESULT_HEADER, rows)
    for row in rows:
        print(f"{row[0]:13s} tau_i={row[1]} tau_c={row[2]} fva_indep={row[3]:10.4f} "
              f"fva_wwr={row[4]:+9.4f} ratio={row[7]:.4f}")
    return 0


def cmd_sweep(args) -> int:
    scenario = load_scenario(args.scenario)
    cfg = _sim_config(args)
    models = build_models(scenario)
    swap = _swap_for(args, models)
    values = tuple(float(v) for v in args.grid.split(",") if v.strip())
    if not values:
        raise argparse.ArgumentTypeError("sweep grid must not be empty")
    flags = FvaFlags(include_tau_i=args.tau_i == "include",
                     include_tau_c=args.tau_c == "include", spread_kind=args.spread)
    sweep = sweep_correlation(scenario, args.axis, values, flags, cfg, swap=swap)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = _meta(args, cfg)
    meta.update(axis=args.axis, spread=args.spread, swap=args.swap)
    if args.axis == "rC":
        header = ["rho_rc"] + [f"ratio@rho_ri={ri:+.2f}" for ri in RHO_RI_CURVES]
        rows = [[v] + [sweep.curves[ri][i].ratio for ri in RHO_RI_CURVES]
                for i, v in enumerate(values)]
    else:
        header = ["rho", "fva_indep", "fva_wwr", "fva_total", "ratio"]
        rows = [[v, r.fva_indep, r.fva_wwr, r.fva_total, r.ratio]
                for v, r in zip(values, sweep.curves[None])]
    _writer(args.format)(out / f"sweep.{_suffix(args.format)}", meta, header, rows)
    print(f"sweep {args.axis} over {len(values)} points -> {out}")
    return 0


def cmd_calibrate(args) -> int:
    curve = resolve_curve(args.curve)
    if args.kind == "cir":
        res = calibrate_cir_theta(curve, args.x0, args.a, args.sigma)
        params = with_shift(CirParams(x0=args.x0, a=args.a, theta=res.theta,
                                      sigma=args.sigma, base_curve=curve))
        fit = cir_shift_fit(curve, params)
        report = {
            "theta": res.theta,
            "feller_ok": res.feller_ok,
            "feller_margin": res.feller_margin,
            "shift_min": fit.min_value,
            "shift_integral": fit.total_integral,
            "pillar_implied_thetas": [
                {"t": t, "theta": th} for t, th in res.implied
            ],
        }
    else:
        spec = SwaptionSpec(expiry=args.expiry, tenor=args.tenor, vol_quote=args.quote,
                            convention=args.convention, shift=args.black_shift)
        sigma = calibrate_hw_sigma(curve, args.a, spec)
        report = {"sigma_r": sigma, "convention": args.convention,
                  "expiry": args.expiry, "tenor": args.tenor, "vol_quote": args.quote}
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def cmd_curves(args) -> int:
    curve = resolve_curve(args.curve)
    ts = np.arange(0.0, curve.t_max + 1e-9, args.step)
    rows = []
    for t in ts:
        zero = curve.zero_rate(float(t)) if t > 0 else 0.0
        rows.append([float(t), curve.df(float(t)), zero, curve.inst_forward(float(t))])
    meta = {"tool": "fvawwr", "version": __version__, "curve": args.curve, "step": args.step}
    header = ["t", "df", "zero_rate", "inst_forward"]
    if args.out:
        _write_table(Path(args.out), meta, header, rows)
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(_fmt(v) for v in row))
    return 0


def cmd_scenario(args) -> int:
    scenario = load_scenario(args.scenario)
    print(scenario.to_json())
    return 0


def _add_sim_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dates-per-year", type=int, default=10, dest="dates_per_year")
    p.add_argument("--sub-steps", type=int, default=10, dest="sub_steps")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--antithetic", action="store_true")
    p.add_argument("--notional", type=float, default=10_000.0)
    p.add_argument("--pay-freq", type=int, default=1, dest="pay_freq")
    p.add_argument("--float-convention", default="fixed_at_start",
                   choices=["fixed_at_start", "fresh_reset"], dest="float_convention")
    p.add_argument("--swap", default="receiver:atm")
    p.add_argument("--out", default=".")
    p.add_argument("--format", default="csv", choices=["csv", "json"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fvawwr",
                                     description="FVA wrong-way-risk Monte Carlo engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="one scenario/flag regime")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--spread", default="stochastic",
                       choices=["stochastic", "deterministic"])
    p_run.add_argument("--tau-i", default="include", choices=["include", "exclude"],
                       dest="tau_i")
    p_run.add_argument("--tau-c", default="include", choices=["include", "exclude"],
                       dest="tau_c")
    _add_sim_args(p_run)
    p_run.set_defaults(func=cmd_run)

    p_grid = sub.add_parser("flag-grid", help="2x2 include/exclude grid, shared paths")
    p_grid.add_argument("--scenario", required=True)
    p_grid.add_argument("--spread", default="stochastic",
                        choices=["stochastic", "deterministic", "both"])
    _add_sim_args(p_grid)
    p_grid.set_defaults(func=cmd_flag_grid)

    p_sweep = sub.add_parser("sweep", help="correlation sweep, common random numbers")
    p_sweep.add_argument("--scenario", required=True)
    p_sweep.add_argument("--axis", default="rC", choices=["rI", "rC", "IC"])
    p_sweep.add_argument("--grid", default=",".join(str(v) for v in DEFAULT_SWEEP_GRID))
    p_sweep.add_argument("--spread", default="stochastic",
                         choices=["stochastic", "deterministic"])
    p_sweep.add_argument("--tau-i", default="include", choices=["include", "exclude"],
                         dest="tau_i")
    p_sweep.add_argument("--tau-c", default="include", choices=["include", "exclude"],
                         dest="tau_c")
    _add_sim_args(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_cal = sub.add_parser("calibrate", help="HW sigma or CIR++ theta calibration")
    p_cal.add_argument("--kind", required=True, choices=["hw", "cir"])
    p_cal.add_argument("--curve", required=True)
    p_cal.add_argument("--a", type=float, required=True)
    p_cal.add_argument("--x0", type=float, default=0.0)
    p_cal.add_argument("--sigma", type=float, default=0.0)
    p_cal.add_argument("--quote", type=float, default=0.1)
    p_cal.add_argument("--expiry", type=float, default=10.0)
    p_cal.add_argument("--tenor", type=float, default=20.0)
    p_cal.add_argument("--convention", default="shifted_lognormal",
                       choices=["lognormal", "normal", "shifted_lognormal"])
    p_cal.add_argument("--black-shift", type=float, default=0.03, dest="black_shift")
    p_cal.add_argument("--out", default=None)
    p_cal.set_defaults(func=cmd_calibrate)

    p_curves = sub.add_parser("curves", help="dump an interpolated curve")
    p_curves.add_argument("--curve", required=True)
    p_curves.add_argument("--step", type=float, default=0.25)
    p_curves.add_argument("--out", default=None)
    p_curves.set_defaults(func=cmd_curves)

    p_sc = sub.add_parser("scenario", help="print a catalog entry as JSON")
    p_sc.add_argument("--scenario", required=True)
    p_sc.set_defaults(func=cmd_scenario)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (argparse.ArgumentTypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CONSTRUCTION_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except SimulationNan as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
