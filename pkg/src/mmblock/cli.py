"""Command-line front end.

Exit codes: 0 success, 1 calibration gate failed (``compare``),
2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import replace

from . import __version__
from .config import Config, ConfigError, dump_config, load_config
from .errors import DegenerateScenario, NumericalError, ValidationError
from .planner import (average_path_loss, estimate_blockage, grid_from_range,
                      sweep_density, sweep_distance, sweep_tx_height)
from .point import p_los_point
from .model import BlockageEstimate
from .renewal import (blockage_prob_interval, interval_blockage, solve_for,
                      special_case_blockage, vacancy_blockage)
from .shadow import circumference_intensity, shadow_width_distribution
from .montecarlo import run_trials

METHOD_NAMES = {"point": "analytic-point", "interval": "analytic-interval",
                "mc": "monte-carlo"}
GATE = 0.1


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".12g")


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args) -> Config:
    return load_config(args.config) if args.config else Config()


def _shadow_stats(cfg: Config, scenario):
    """mu, E[W], E[eta], E[xi] from the closed forms (no renewal solve)."""
    n = cfg.numerics
    mu = circumference_intensity(scenario, n.quad_rel_tol)
    try:
        mean_w = shadow_width_distribution(scenario, n.grid_points, n.tail_eps,
                                           n.quad_rel_tol).mean
    except (DegenerateScenario, NumericalError):
        mean_w = math.nan
    if mu > 0:
        return mu, mean_w, math.expm1(mu * mean_w) / mu, math.exp(mu * mean_w) / mu
    return mu, mean_w, mean_w, math.inf


def cmd_analytic(args) -> int:
    cfg = _config(args)
    sc = cfg.scenario
    method = METHOD_NAMES[args.method]
    extra = {}
    sol = None
    if method == "analytic-point":
        est = p_los_point(sc)
    else:
        try:
            sol = solve_for(sc, **cfg.numerics.renewal_kwargs())
        except DegenerateScenario:
            est = BlockageEstimate(0.0, method, degenerate=True)
        else:
            est = blockage_prob_interval(sc, sol)
    if sol is None:
        mu, mean_w, mean_eta, mean_xi = _shadow_stats(cfg, sc)
    else:
        mu, mean_w = sol.mu, sol.mean_shadow
        mean_eta, mean_xi = sol.mean_blocked, sol.mean_cycle
        l = sc.rx_length_m
        short = l < sc.population.diameter_min_m
        extra["vacancy_p_block"] = vacancy_blockage(mu, mean_w)
        if short:
            extra["special_case_p_block"] = special_case_blockage(mu, mean_w, l)
        if args.as_printed:
            lit = solve_for(sc, as_printed=True, **cfg.numerics.renewal_kwargs())
            extra["as_printed_p_block"] = interval_blockage(lit, l)
            if short:
                extra["as_printed_special_case_p_block"] = special_case_blockage(
                    mu, mean_w, l, as_printed=True)
    report = dict(
        method=method, p_block=est.probability, p_los=est.p_los, mu=mu,
        mean_shadow=mean_w, mean_blocked=mean_eta, mean_cycle=mean_xi,
        avg_pl_db=average_path_loss(sc, cfg.pathloss, estimate=est),
        numerical_error=est.numerical_error, degenerate=est.degenerate,
    )
    report.update(extra)
    if args.csv:
        text = _csv_text(list(report), [list(report.values())])
    else:
        text = "".join(f"{k} = {fmt(v)}\n" for k, v in report.items())
    _emit(args, text)
    return 0


def _mc_settings(cfg, args):
    mc = cfg.mc
    over = {}
    for name in ("trials", "seed", "mode", "subsegments"):
        v = getattr(args, name, None)
        if v is not None:
            over[name] = v
    return replace(mc, **over) if over else mc


def cmd_simulate(args) -> int:
    cfg = _config(args)
    mc = _mc_settings(cfg, args)
    res = run_trials(cfg.scenario, **mc.run_kwargs(args.threads))
    rows = [(name, e.probability, e.half_width_95, e.trials)
            for name, e in (("full", res.full), ("half", res.half),
                            ("partial", res.partial))]
    _emit(args, _csv_text(["event", "probability", "ci95", "trials"], rows))
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(args)
    method = METHOD_NAMES[args.method]
    mc = _mc_settings(cfg, args)
    kw = dict(numerics=cfg.numerics.renewal_kwargs(), mc=mc.run_kwargs(args.threads))
    rng = (args.start, args.stop, args.step)
    sweep = {"distance": sweep_distance, "tx_height": sweep_tx_height,
             "density": sweep_density}[args.axis]
    res = sweep(cfg.scenario, cfg.pathloss, rng, method, **kw)
    rows = [(args.axis, v, e.probability, e.half_width_95, e.p_los, pl, e.method)
            for v, e, pl in zip(res.axis_values, res.blockage, res.avg_path_loss_db)]
    _emit(args, _csv_text(["axis", "value", "p_block", "ci95", "p_los", "avg_pl_db",
                           "method"], rows))
    if res.optimum is not None:
        where = "interior" if res.optimum_interior else "at grid edge"
        print(f"optimum {args.axis} = {fmt(res.optimum[0])} "
              f"(avg_pl_db = {fmt(res.optimum[1])}, {where})", file=sys.stderr)
    return 0


def compare_rows(cfg: Config, distances, threads=1, mc=None):
    mc = mc or cfg.mc
    rows = []
    for r in distances:
        sc = replace(cfg.scenario, distance_m=float(r))
        point = p_los_point(sc).probability
        interval = estimate_blockage(sc, "analytic-interval",
                                     numerics=cfg.numerics.renewal_kwargs()).probability
        sim = run_trials(sc, **mc.run_kwargs(threads)).full
        rows.append((float(r), point, interval, sim.probability, sim.half_width_95,
                     abs(point - sim.probability), abs(interval - sim.probability)))
    return rows


def cmd_compare(args) -> int:
    cfg = _config(args)
    mc = _mc_settings(cfg, args)
    distances = grid_from_range(args.r_from, args.r_to, args.step)
    rows = compare_rows(cfg, distances, args.threads, mc)
    _emit(args, _csv_text(["r", "analytic_point", "analytic_interval", "mc_full",
                           "mc_ci95", "abs_diff_point", "abs_diff_interval"], rows))
    worst_p = max(rows, key=lambda t: t[5])
    worst_i = max(rows, key=lambda t: t[6])
    summary = (f"max_abs_diff_point = {fmt(worst_p[5])} at r = {fmt(worst_p[0])}\n"
               f"max_abs_diff_interval = {fmt(worst_i[6])} at r = {fmt(worst_i[0])}\n")
    sys.stderr.write(summary)
    if max(worst_p[5], worst_i[6]) > GATE and not args.no_gate:
        sys.stderr.write(f"calibration gate failed: difference above {GATE}\n")
        return 1
    return 0


def cmd_dump_config(args) -> int:
    _emit(args, dump_config(_config(args)))
    return 0


def _global_options(parser, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--config", default=d(None), metavar="PATH",
                        help="TOML configuration (default: built-in reference scenario)")
    parser.add_argument("--threads", type=int, default=d(1), metavar="N",
                        help="worker threads for Monte Carlo trials")
    parser.add_argument("--as-printed", action="store_true", default=d(False),
                        help="also report the fixed-limit renewal variant and the uncorrected closed form")
    parser.add_argument("--out", default=d(None), metavar="PATH",
                        help="write data output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mmblock", description=__doc__.splitlines()[0] if __doc__ else None)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_options(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analytic", help="analytic blockage probability and path loss")
    _global_options(a, suppress=True)
    a.add_argument("--method", choices=["point", "interval"], default="interval")
    a.add_argument("--csv", action="store_true", help="single-row CSV instead of key = value")
    a.set_defaults(func=cmd_analytic)

    def mc_opts(q):
        q.add_argument("--trials", type=int)
        q.add_argument("--seed", type=int)
        q.add_argument("--mode", choices=["ppp", "matern2"])
        q.add_argument("--subsegments", type=int)

    s = sub.add_parser("simulate", help="Monte Carlo blockage frequencies")
    _global_options(s, suppress=True)
    mc_opts(s)
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", help="blockage and average path loss along one axis")
    _global_options(w, suppress=True)
    w.add_argument("--axis", choices=["distance", "tx_height", "density"], required=True)
    w.add_argument("--from", dest="start", type=float, required=True)
    w.add_argument("--to", dest="stop", type=float, required=True)
    w.add_argument("--step", type=float, required=True)
    w.add_argument("--method", choices=list(METHOD_NAMES), default="point")
    mc_opts(w)
    w.set_defaults(func=cmd_sweep)

    c = sub.add_parser("compare", help="analytic models against Monte Carlo over r")
    _global_options(c, suppress=True)
    c.add_argument("--r-from", type=float, default=10.0)
    c.add_argument("--r-to", type=float, default=150.0)
    c.add_argument("--step", type=float, default=10.0)
    c.add_argument("--no-gate", action="store_true",
                   help=f"exit 0 even if the max difference exceeds {GATE}")
    mc_opts(c)
    c.set_defaults(func=cmd_compare)

    d = sub.add_parser("dump-config", help="print the effective configuration as TOML")
    _global_options(d, suppress=True)
    d.set_defaults(func=cmd_dump_config)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except (ValidationError, ConfigError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except NumericalError as err:
        tol = f" (achieved {err.achieved_tolerance:.3g})" if err.achieved_tolerance else ""
        print(f"numerical failure: {err}{tol}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
