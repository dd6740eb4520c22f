"""Command-line front end: sweeps, optimization, simulation, CSV artifacts.

Every subcommand emits plot-ready CSV (comma separated, '#' metadata lines
recording the resolved configuration, values printed with 9 significant
digits) either to stdout or to --output. Parameter precedence: built-in
defaults < config file < --set overrides.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import timing
from .contention import analyze_stopped_process, build_round_model
from .reference import single_round_throughput_pps
from .sim import DcfConfig, run_dcf
from .throughput import (
    carryover_upper_bound,
    evaluate_throughput,
    lower_bound,
    optimize,
    throughput_profile,
)

__all__ = ["main"]


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".9g")


def _emit(out, meta: dict, header: list, rows):
    lines = []
    for key in sorted(meta):
        lines.append(f"# {key} = {meta[key]}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_set(pairs):
    overrides = {}
    for item in pairs or []:
        if "=" not in item:
            raise ValueError(f"--set expects key=value, got {item!r}")
        key, _, val = item.partition("=")
        overrides[key.strip()] = val.strip()
    return overrides


def _load(args):
    params = timing.load_params(args.config, _parse_set(args.set))
    return params, timing.derive_timings(params)


def _parse_lambda_sweep(spec: str):
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"lambda sweep must be start:step:stop, got {spec!r}")
    start, step, stop = (float(p) for p in parts)
    if start <= 0 or step <= 0 or stop < start:
        raise ValueError(f"invalid lambda sweep {spec!r}")
    return np.arange(start, stop + 1e-9, step)


def _parse_int_range(spec: str):
    if ":" in spec:
        lo, _, hi = spec.partition(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(p) for p in spec.split(",")]


def _meta(params, extra):
    meta = {f"params.{k}": _fmt(v) for k, v in vars(params).items()}
    meta.update(extra)
    return meta


def _single_round_star(mpr, timings, lam_hi):
    grid = np.arange(0.05, lam_hi + 1e-9, 0.05)
    vals = [single_round_throughput_pps(l, mpr, timings) for l in grid]
    i = int(np.argmax(vals))
    # small local refinement keeps this consistent with optimize()
    from .throughput import _golden_max

    lo, hi = grid[max(0, i - 1)], grid[min(len(grid) - 1, i + 1)]
    _, v = _golden_max(
        lambda l: single_round_throughput_pps(l, mpr, timings), lo, hi, 1e-4
    )
    return max(v, vals[i])


def _auto_range(mpr):
    return (0.05, max(30.0, 1.5 * mpr + 10.0))


def cmd_pmf(args):
    params, timings = _load(args)
    model = build_round_model(args.lam, args.m)
    rows = [("x", k, model.x_pmf[k]) for k in range(args.m + 1)]
    extra = {"mode": "pmf", "lambda": _fmt(args.lam), "m": args.m}
    if args.theta is not None:
        analysis = analyze_stopped_process(model, args.theta)
        extra["theta"] = args.theta
        rows += [
            ("stopped_sum", s, analysis.stopped_sum_pmf[s])
            for s in range(args.theta, args.theta + args.m)
        ]
        rows += [
            ("stop_time", n + 1, p) for n, p in enumerate(analysis.stop_time_pmf)
        ]
    _emit(args.output, _meta(params, extra), ["kind", "index", "probability"], rows)
    return 0


def cmd_surface(args):
    params, timings = _load(args)
    lams = _parse_lambda_sweep(args.lam)
    thetas = _parse_int_range(args.theta)
    rows = []
    for lam in lams:
        model = build_round_model(float(lam), args.m)
        prof = throughput_profile(model, timings)
        for theta in thetas:
            pps = prof[theta - 1]
            rows.append((lam, theta, pps, pps * timings.payload_bits * 1e-6))
    extra = {"mode": "throughput-surface", "m": args.m, "lambda": args.lam,
             "theta": args.theta}
    _emit(args.output, _meta(params, extra),
          ["lambda", "theta", "s_pps", "s_mbps"], rows)
    return 0


def cmd_optimize(args):
    params, timings = _load(args)
    rng = _auto_range(args.m) if args.lambda_range is None else tuple(
        float(p) for p in args.lambda_range.split(":")
    )
    res = optimize(args.m, timings, rng, args.resolution)
    print(f"lambda_star = {_fmt(res.best.lam)}")
    print(f"theta_star  = {res.theta_star}")
    print(f"s_star      = {_fmt(res.s_star)} packets/s "
          f"({_fmt(res.best.throughput_mbps)} Mbps)")
    print(f"b_l_star    = {_fmt(res.b_l_star)} packets/s")
    print(f"s_c_star    = {_fmt(res.s_c_star)} packets/s "
          f"(lambda_c_star = {_fmt(res.lambda_c_star)})")
    ok = res.b_l_star <= res.s_star * (1 + 1e-9) and res.s_star <= res.s_c_star * (1 + 1e-9)
    print(f"ordering b_l_star <= s_star <= s_c_star: {'holds' if ok else 'VIOLATED'}")
    if args.output:
        extra = {"mode": "optimize", "m": args.m,
                 "lambda_range": f"{rng[0]}:{rng[1]}",
                 "resolution": _fmt(args.resolution)}
        _emit(args.output, _meta(params, extra),
              ["m", "lambda_star", "theta_star", "s_star_pps", "s_star_mbps",
               "b_l_star_pps", "s_c_star_pps", "lambda_c_star"],
              [(args.m, res.best.lam, res.theta_star, res.s_star,
                res.best.throughput_mbps, res.b_l_star, res.s_c_star,
                res.lambda_c_star)])
    return 0 if ok else 1


def cmd_scaling(args):
    params, timings = _load(args)
    rows = []
    for mpr in _parse_int_range(args.m_list):
        rng = _auto_range(mpr)
        res = optimize(mpr, timings, rng, args.resolution)
        s1 = _single_round_star(mpr, timings, rng[1])
        rows.append((mpr, res.s_star, res.b_l_star, res.s_c_star, s1,
                     res.theta_star, res.best.lam))
    extra = {"mode": "scaling", "m_list": args.m_list,
             "resolution": _fmt(args.resolution)}
    _emit(args.output, _meta(params, extra),
          ["m", "s_star", "b_l_star", "s_c_star", "s_single_round_star",
           "theta_star", "lambda_star"], rows)
    return 0


def _report_row(prefix, report):
    return (report.throughput_pps, report.throughput_mbps,
            report.measured_lambda, report.mean_rounds_per_super_round,
            report.mean_payload_per_super_round, report.num_super_rounds,
            report.standard_error_pps)


def cmd_simulate(args):
    params, timings = _load(args)
    cfg = DcfConfig(
        num_stations=args.k,
        mpr_capability=args.m,
        theta=args.theta if args.theta is not None else args.m,
        min_window=args.w0,
        backoff_factor=args.r,
        max_backoff_stage=args.max_stage,
        warmup_slots=args.warmup,
        measured_slots=args.slots,
        rng_seed=args.seed,
    )
    report = run_dcf(cfg, timings)
    extra = {"mode": "simulate", "k": args.k, "m": args.m, "theta": cfg.theta,
             "w0": args.w0, "r": _fmt(args.r), "seed": args.seed,
             "warmup_slots": args.warmup, "measured_slots": args.slots}
    _emit(args.output, _meta(params, extra),
          ["throughput_pps", "throughput_mbps", "measured_lambda",
           "mean_rounds", "mean_payload", "num_super_rounds", "se_pps"],
          [_report_row("", report)])
    return 0


def cmd_compare(args):
    params, timings = _load(args)
    theta = args.theta if args.theta is not None else args.m
    rows = []
    for seed in range(args.seeds):
        cfg = DcfConfig(
            num_stations=args.k, mpr_capability=args.m, theta=theta,
            min_window=args.w0, backoff_factor=args.r,
            warmup_slots=args.warmup, measured_slots=args.slots,
            rng_seed=args.seed_base + seed,
        )
        report = run_dcf(cfg, timings)
        model = build_round_model(report.measured_lambda, args.m)
        analytic = evaluate_throughput(model, theta, timings)
        rel = (report.throughput_pps - analytic.throughput_pps) / analytic.throughput_pps
        rows.append((args.m, cfg.rng_seed, report.measured_lambda,
                     report.throughput_pps, analytic.throughput_pps, rel,
                     report.standard_error_pps))
    extra = {"mode": "compare", "k": args.k, "m": args.m, "theta": theta,
             "seeds": args.seeds, "w0": args.w0, "r": _fmt(args.r),
             "warmup_slots": args.warmup, "measured_slots": args.slots}
    _emit(args.output, _meta(params, extra),
          ["m", "seed", "measured_lambda", "simulated_pps", "analytic_pps",
           "rel_err", "se_pps"], rows)
    return 0


def cmd_bounds(args):
    params, timings = _load(args)
    rows = []
    for lam in _parse_lambda_sweep(args.lam):
        model = build_round_model(float(lam), args.m)
        prof = throughput_profile(model, timings)
        theta_star = int(np.argmax(prof)) + 1
        bl = lower_bound(model, timings).throughput_pps
        sc = carryover_upper_bound(model, timings).throughput_pps
        rows.append((lam, bl, prof[theta_star - 1], theta_star, sc))
    extra = {"mode": "bounds", "m": args.m, "lambda": args.lam}
    _emit(args.output, _meta(params, extra),
          ["lambda", "b_l_pps", "s_best_pps", "theta_star", "s_c_pps"], rows)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mprwlan",
        description="Multi-round contention analysis for multipacket-reception WLANs",
    )
    parser.add_argument("--config", help="key-value PHY/MAC parameter file")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a PHY/MAC parameter (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("--output", help="CSV output path (default stdout)")
        return p

    p = add("pmf", cmd_pmf, help="per-round and stopped-process distributions")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--theta", type=int)

    p = add("throughput-surface", cmd_surface, help="S over a (lambda, theta) grid")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True, metavar="START:STEP:STOP")
    p.add_argument("--theta", required=True, metavar="LO:HI")

    p = add("optimize", cmd_optimize, help="jointly optimize lambda and theta")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lambda-range", metavar="LO:HI")
    p.add_argument("--resolution", type=float, default=0.05)

    p = add("scaling", cmd_scaling, help="optimal throughput and bounds vs M")
    p.add_argument("--m-list", required=True, metavar="1,2,5 or LO:HI")
    p.add_argument("--resolution", type=float, default=0.05)

    for name, fn in (("simulate", cmd_simulate), ("compare", cmd_compare)):
        p = add(name, fn, help=f"slotted DCF {name}")
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--theta", type=int)
        p.add_argument("--w0", type=int, default=16)
        p.add_argument("--r", type=float, default=2.0)
        p.add_argument("--warmup", type=int, default=5000)
        p.add_argument("--slots", type=int, default=100_000)
        if name == "simulate":
            p.add_argument("--max-stage", type=int)
            p.add_argument("--seed", type=int, default=0)
        else:
            p.add_argument("--seeds", type=int, default=5)
            p.add_argument("--seed-base", type=int, default=0)

    p = add("bounds", cmd_bounds, help="B_L / S / S_c ordering along lambda")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True, metavar="START:STEP:STOP")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
