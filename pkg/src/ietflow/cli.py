"""Command-line front end.

Subcommand groups: iet, rv, zip, flow, bs, dc, ratner, mix.  Results are
line-delimited JSON on stdout (CSV series via --csv), and every invocation
can append an experiment record carrying the full configuration echo, the
seed, and a fingerprint of the induction type word, so that a record
replays bit-for-bit for exact outputs.

Exit codes: 0 ok, 1 a requested check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from fractions import Fraction
from importlib import resources

from . import kernels
from .birkhoff import sigma, sigma_set
from .diophantine import (
    IndeterminateComparison,
    ParamWindowError,
    mixing_dc_report,
    ratner_dc_partial,
    summability_partial,
    validate_params,
)
from .exact import ExactScalar
from .iet import Iet, keane_check
from .rauzy import InductionTrace, RVUndefinedError, select_accel_times, towers
from .ratner import (
    BumpObservable,
    WitnessConfig,
    forbac_scan,
    mixing_correlation,
    sample_good_pairs,
    sr_pair_test,
    verify_witness_high_precision,
)
from .roof import FlowPoint, birkhoff_sum, discrete_iterations, flow, roof_area
from .serialize import (
    load_iet,
    load_roof,
    loads_iet,
    loads_roof,
    records_to_jsonl,
    series_to_csv,
    trace_records,
)
from .zippered import ZipperedRectangles, backward_rv_step, generic_tau

DEFAULT_PRECISION = int(os.environ.get("IETFLOW_PRECISION", "17"))


def _bundled(name: str) -> str:
    return resources.files("ietflow").joinpath("data", name).read_text()


def _load_iet(args) -> Iet:
    if args.iet:
        return load_iet(args.iet)
    return loads_iet(_bundled("golden_rotation.iet"))


def _load_roof(args, iet: Iet):
    if getattr(args, "roof", None):
        return load_roof(args.roof, iet)
    name = ("asymmetric_roof.roof" if iet.perm.d == 2
            else "asymmetric_roof3.roof")
    return loads_roof(_bundled(name), iet)


def _emit(payload, args):
    line = json.dumps(payload, sort_keys=True)
    print(line)
    return payload


def _fingerprint(trace: InductionTrace) -> str:
    return hashlib.sha256(trace.type_word().encode()).hexdigest()[:16]


def _log_record(args, command: str, payload, trace=None, seed=None):
    path = getattr(args, "log", None)
    if not path:
        return
    record = {
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "command": command,
        "config": {k: v for k, v in sorted(vars(args).items())
                   if k not in ("func",) and v is not None},
        "seed": seed,
        "fingerprint": _fingerprint(trace) if trace is not None else None,
        "results": payload,
    }
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True, default=str) + "\n")


def _params_from(args):
    return validate_params(args.tau, args.tau_prime, args.eta, args.xi,
                           nu=Fraction(args.nu), lbar=args.lbar, d=args.d,
                           window=args.window)


def _accel_from(args, trace):
    return select_accel_times(trace, Fraction(args.nu), lbar_max=args.lbar_max,
                              depth=trace.depth)


def _add_common(parser, roof=False, params=False):
    parser.add_argument("--iet", help="IET file (default: bundled golden "
                                      "rotation)")
    parser.add_argument("--log", help="append an experiment record to this "
                                      "JSONL file")
    parser.add_argument("--csv", action="store_true",
                        help="emit CSV series instead of JSON lines")
    if roof:
        parser.add_argument("--roof", help="roof file (default: bundled "
                                           "asymmetric single-log roof)")
    if params:
        parser.add_argument("--tau", default="1.01")
        parser.add_argument("--tau-prime", dest="tau_prime", default="0.995")
        parser.add_argument("--eta", default="0.9")
        parser.add_argument("--xi", default="0.992")
        parser.add_argument("--nu", default="3")
        parser.add_argument("--lbar", type=int, default=2)
        parser.add_argument("--d", type=int, default=2)
        parser.add_argument("--window", default="para",
                            choices=["para", "asucons"])
        parser.add_argument("--lbar-max", dest="lbar_max", type=int,
                            default=6)
        parser.add_argument("--steps", type=int, default=46,
                            help="induction depth to compute")


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def cmd_iet_eval(args):
    iet = _load_iet(args)
    x = ExactScalar.parse(args.x)
    value = iet.iterate(x, args.n)
    payload = {"x": args.x, "n": args.n, "result": value.to_string(),
               "float": float(value)}
    _emit(payload, args)
    _log_record(args, "iet eval", payload)
    return 0


def cmd_iet_keane(args):
    iet = _load_iet(args)
    report = keane_check(iet, args.depth)
    payload = {"depth": args.depth,
               "satisfied_to_depth": report.satisfied_to_depth,
               "colliding_pair": repr(report.colliding_pair)
               if report.colliding_pair else None}
    _emit(payload, args)
    _log_record(args, "iet keane", payload)
    return 0 if report.satisfied_to_depth else 1


def cmd_rv_induct(args):
    iet = _load_iet(args)
    trace = InductionTrace(iet)
    try:
        records = list(trace_records(trace, args.steps))
    except RVUndefinedError as exc:
        print(json.dumps({"error": "RVUndefined", "detail": str(exc),
                          "depth_reached": trace.depth}))
        return 1
    out = records_to_jsonl(records)
    sys.stdout.write(out)
    _log_record(args, "rv induct", {"steps": args.steps,
                                    "sha256": hashlib.sha256(
                                        out.encode()).hexdigest()},
                trace=trace)
    return 0


def cmd_rv_towers(args):
    iet = _load_iet(args)
    trace = InductionTrace(iet)
    system = towers(trace, args.at)
    payload = {
        "at": args.at,
        "heights": {t.label: t.height for t in system.towers},
        "floor_count": system.floor_count(),
        "partition_exact": system.check_partition(),
        "bases": {t.label: [t.base_left.to_string(),
                            t.base_right.to_string()]
                  for t in system.towers},
    }
    _emit(payload, args)
    _log_record(args, "rv towers", payload, trace=trace)
    return 0 if payload["partition_exact"] else 1


def cmd_rv_accel(args):
    iet = _load_iet(args)
    trace = InductionTrace(iet)
    try:
        trace.extend(args.steps)
    except RVUndefinedError:
        pass
    accel = select_accel_times(trace, Fraction(args.nu),
                               lbar_max=args.lbar_max, depth=trace.depth)
    payload = {"nu": str(args.nu), "lbar": accel.lbar,
               "times": accel.times, "count": accel.count,
               "diagnostic": accel.diagnostic}
    _emit(payload, args)
    _log_record(args, "rv accel", payload, trace=trace)
    return 0 if accel.count else 1


def cmd_zip_backward(args):
    from .zippered import BackwardUndefinedError

    iet = _load_iet(args)
    z = ZipperedRectangles(iet, generic_tau(iet.perm, Fraction(args.eps)))
    steps = []
    cur = z
    stopped = None
    for k in range(args.steps):
        try:
            cur, matrix, step_type = backward_rv_step(cur)
        except BackwardUndefinedError as exc:
            # rational tau data always tie eventually; report the partial
            # expansion rather than discarding it
            stopped = {"error": "BackwardUndefined", "detail": str(exc),
                       "steps_completed": k}
            break
        steps.append({
            "index": -(k + 1), "type": step_type,
            "matrix": [list(row) for row in matrix],
            "lengths": [v.to_string() for v in cur.iet.lengths],
            "tau": [v.to_string() for v in cur.suspension.tau],
        })
    sys.stdout.write(records_to_jsonl(steps))
    if stopped:
        print(json.dumps(stopped))
    _log_record(args, "zip backward", {"steps": args.steps,
                                       "completed": len(steps)})
    return 0 if stopped is None else 1


def cmd_flow_orbit(args):
    iet = _load_iet(args)
    spec = _load_roof(args, iet)
    x = ExactScalar.parse(args.x)
    point = flow(iet, spec, FlowPoint(x, args.y), args.t)
    r = discrete_iterations(iet, spec, x, args.t + args.y)
    payload = {"x": args.x, "y": args.y, "t": args.t,
               "end_x": point.x.to_string(), "end_x_float": float(point.x),
               "end_y": point.y, "discrete_iterations": r}
    _emit(payload, args)
    _log_record(args, "flow orbit", payload)
    return 0


def cmd_flow_birkhoff(args):
    iet = _load_iet(args)
    spec = _load_roof(args, iet)
    x = ExactScalar.parse(args.x)
    value = birkhoff_sum(iet, spec, x, args.r, derivative=args.derivative)
    payload = {"x": args.x, "r": args.r, "derivative": args.derivative,
               "sum": value.value, "error_radius": value.err}
    _emit(payload, args)
    _log_record(args, "flow birkhoff", payload)
    return 0


def cmd_bs_growth(args):
    iet = _load_iet(args)
    spec = _load_roof(args, iet)
    trace = InductionTrace(iet).extend(args.steps)
    accel = _accel_from(args, trace)
    from .birkhoff import ExcludedPointError, derivative_growth_check
    grid = [int(tok) for tok in args.r_grid.split(",")]
    import random as _random
    rng = _random.Random(args.seed)
    rows = []
    cache = {}
    sampled = 0
    while sampled < args.points:
        x = Fraction(rng.randrange(10 ** 6 // 20, 10 ** 6 * 19 // 20), 10 ** 6)
        try:
            reports = [derivative_growth_check(accel, spec, x, r,
                                               eps=args.eps,
                                               tau_prime=float(args.tau_prime),
                                               sigma_cache=cache)
                       for r in grid]
        except ExcludedPointError:
            continue
        sampled += 1
        for rep in reports:
            rows.append((str(x), rep.r, rep.ell, rep.oriented_ratio,
                         rep.lower_ok, rep.upper_ok, rep.used_UV_slack))
    header = ["x", "r", "ell", "oriented_ratio", "lower_ok", "upper_ok",
              "used_UV_slack"]
    if args.csv:
        sys.stdout.write(series_to_csv(rows, header, DEFAULT_PRECISION))
    else:
        for row in rows:
            print(json.dumps(dict(zip(header, row))))
    ok = all(row[4] and row[5] for row in rows)
    _log_record(args, "bs growth", {"rows": len(rows), "all_bounds": ok},
                trace=trace, seed=args.seed)
    return 0 if ok else 1


def cmd_bs_sigma_sets(args):
    iet = _load_iet(args)
    trace = InductionTrace(iet).extend(args.steps)
    accel = _accel_from(args, trace)
    rows = []
    for ell in range(1, args.l_max + 1):
        sset = sigma_set(accel, ell, float(args.tau_prime))
        rows.append((ell, sset.sigma, float(sset.measure), float(sset.bound),
                     accel.q(ell), accel.A_norm(ell)))
    header = ["ell", "sigma", "measure", "bound", "q", "normA"]
    if args.csv:
        sys.stdout.write(series_to_csv(rows, header, DEFAULT_PRECISION))
    else:
        for row in rows:
            print(json.dumps(dict(zip(header, row))))
    ok = all(row[2] <= row[3] for row in rows)
    _log_record(args, "bs sigma-sets", {"l_max": args.l_max,
                                        "bounds_hold": ok}, trace=trace)
    return 0 if ok else 1


def _dc_setup(args):
    iet = _load_iet(args)
    params = _params_from(args)
    trace = InductionTrace(iet)
    try:
        trace.extend(args.steps)
    except RVUndefinedError:
        pass
    accel = _accel_from(args, trace)
    return iet, params, trace, accel


def cmd_dc_mixing(args):
    _, params, trace, accel = _dc_setup(args)
    report = mixing_dc_report(accel, params, args.depth)
    payload = {
        "depth": args.depth, "insufficient_depth": report.insufficient_depth,
        "all_balanced": report.all_balanced if not report.insufficient_depth
        else None,
        "all_windows_positive": report.all_windows_positive
        if not report.insufficient_depth else None,
        "max_diameter": report.max_diameter
        if not report.insufficient_depth else None,
        "integrability": report.integrability,
    }
    if args.csv and not report.insufficient_depth:
        rows = [(ell + 1, report.balanced[ell], report.windows_positive[ell],
                 report.diameters[ell], report.integrability[ell])
                for ell in range(args.depth)]
        sys.stdout.write(series_to_csv(
            rows, ["ell", "balanced", "window_positive", "diameter",
                   "normA_over_ell_tau"], DEFAULT_PRECISION))
    else:
        _emit(payload, args)
    _log_record(args, "dc mixing", payload, trace=trace)
    if report.insufficient_depth:
        return 1
    return 0 if (report.all_balanced and report.all_windows_positive) else 1


def cmd_dc_ratner(args):
    _, params, trace, accel = _dc_setup(args)
    if args.depth == 0:
        payload = {"depth": 0, "bad_indices": [], "partial_sum": 0.0,
                   "window": args.window_len if args.window_len is not None
                   else params.L}
        _emit(payload, args)
        _log_record(args, "dc ratner", payload, trace=trace)
        return 0
    out = ratner_dc_partial(accel, params, args.depth,
                            window_len=args.window_len)
    payload = {"depth": out.depth, "window": out.window_len,
               "bad_indices": out.bad_indices,
               "partial_sum": out.partial_sum}
    if args.csv:
        rows = [(ell, out.products[ell - 1], ell in out.bad_indices)
                for ell in range(1, out.depth + 1)]
        sys.stdout.write(series_to_csv(
            rows, ["ell", "window_norm_product", "bad"], DEFAULT_PRECISION))
    else:
        _emit(payload, args)
    _log_record(args, "dc ratner", payload, trace=trace)
    return 0


def cmd_dc_summability(args):
    _, params, trace, accel = _dc_setup(args)
    try:
        out = summability_partial(accel, params, args.depth,
                                  window_len=args.window_len)
    except IndeterminateComparison as exc:
        print(json.dumps({"error": "IndeterminateComparison",
                          "detail": str(exc)}))
        return 1
    payload = {"depth": out.depth, "window": out.window_len,
               "members": out.members, "non_members": out.non_members,
               "sum_sigma_eta": out.sum_sigma_eta,
               "sum_measures": out.sum_measures}
    if args.csv:
        rows = [(ell, ell in out.members) for ell in range(1, out.depth + 1)]
        sys.stdout.write(series_to_csv(rows, ["ell", "in_K_T"],
                                       DEFAULT_PRECISION))
    else:
        _emit(payload, args)
    _log_record(args, "dc summability", payload, trace=trace)
    return 0


def cmd_ratner_witness(args):
    iet = _load_iet(args)
    spec = _load_roof(args, iet)
    params = _params_from(args)
    trace = InductionTrace(iet).extend(args.steps)
    accel = _accel_from(args, trace)
    cfg = WitnessConfig(epsilon=args.eps, N=args.n_floor, params=params,
                        seed=args.seed, window_len=args.window_len)
    gap = Fraction(args.gap) if args.gap else Fraction(1, 10 ** 5)
    pairs, region = sample_good_pairs(accel, spec, cfg, args.pairs, gap)
    verified = 0
    reverified = 0
    rows = []
    for x, y in pairs:
        res = sr_pair_test(accel, spec, cfg, x, y, good_region=region)
        ok_hp = False
        if res.verdict == "verified":
            verified += 1
            ok_hp = verify_witness_high_precision(iet, spec, res, cfg.epsilon)
            reverified += ok_hp
        rows.append({"x": x.to_string(), "direction": res.direction,
                     "verdict": res.verdict, "p": res.p, "M": res.M,
                     "L": res.L, "max_dev": res.max_deviation,
                     "reverified": bool(ok_hp),
                     "reason": res.failure_reason})
    for row in rows:
        print(json.dumps(row))
    rate = verified / len(pairs) if pairs else 0.0
    payload = {"pairs": len(pairs), "verified": verified,
               "reverified": reverified, "rate": rate}
    _emit(payload, args)
    _log_record(args, "ratner witness", payload, trace=trace, seed=args.seed)
    return 0 if rate >= args.rate_floor and reverified == verified else 1


def cmd_ratner_forbac(args):
    iet = _load_iet(args)
    params = _params_from(args)
    trace = InductionTrace(iet).extend(args.steps)
    accel = _accel_from(args, trace)
    lo, _, hi = args.l_range.partition("..")
    rows = []
    failures = 0
    eps = args.eps
    margin = Fraction(eps).limit_denominator(10 ** 9) / 8
    for ell in range(int(lo), int(hi) + 1):
        for k in range(1, args.grid + 1):
            x = Fraction(k, args.grid + 1)
            if x <= margin or x >= 1 - margin:
                continue
            rep = forbac_scan(accel, x, ell, params)
            ok = rep.which_holds != "neither"
            failures += not ok
            rows.append((ell, str(x), rep.which_holds,
                         float(rep.forward_min), float(rep.backward_min),
                         float(rep.threshold)))
    header = ["ell", "x", "which_holds", "forward_min", "backward_min",
              "threshold"]
    if args.csv:
        sys.stdout.write(series_to_csv(rows, header, DEFAULT_PRECISION))
    else:
        for row in rows:
            print(json.dumps(dict(zip(header, row))))
    payload = {"points": len(rows), "failures": failures}
    _emit(payload, args)
    _log_record(args, "ratner forbac", payload, trace=trace)
    return 0 if failures == 0 else 1


def cmd_mix_correlate(args):
    iet = _load_iet(args)
    spec = _load_roof(args, iet)
    g = BumpObservable(x0=args.gx, wx=args.gw, y0=args.gy, wy=args.gwy)
    h = BumpObservable(x0=args.hx, wx=args.hw, y0=args.hy, wy=args.hwy)
    est = mixing_correlation(iet, spec, g, h, args.t, args.samples,
                             seed=args.seed)
    payload = {"t": args.t, "samples": args.samples,
               "estimate": est.value, "stderr": est.stderr,
               "area": roof_area(iet, spec),
               "kernel": kernels.implementation_name()}
    _emit(payload, args)
    _log_record(args, "mix correlate", payload, seed=args.seed)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ietflow",
        description="Interval exchange transformations, Rauzy-Veech "
                    "induction and special flows with log singularities.")
    sub = parser.add_subparsers(dest="group", required=True)

    g_iet = sub.add_parser("iet", help="evaluate and check IETs")
    s = g_iet.add_subparsers(dest="cmd", required=True)
    p = s.add_parser("eval")
    _add_common(p)
    p.add_argument("--x", required=True, help="exact point, e.g. 1/3")
    p.add_argument("--n", type=int, default=1, help="iterate count")
    p.set_defaults(func=cmd_iet_eval)
    p = s.add_parser("keane")
    _add_common(p)
    p.add_argument("--depth", type=int, default=100)
    p.set_defaults(func=cmd_iet_keane)

    g_rv = sub.add_parser("rv", help="Rauzy-Veech induction")
    s = g_rv.add_subparsers(dest="cmd", required=True)
    p = s.add_parser("induct")
    _add_common(p)
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(func=cmd_rv_induct)
    p = s.add_parser("towers")
    _add_common(p)
    p.add_argument("--at", type=int, required=True)
    p.set_defaults(func=cmd_rv_towers)
    p = s.add_parser("accel")
    _add_common(p)
    p.add_argument("--steps", type=int, default=40)
    p.add_argument("--nu", default="3")
    p.add_argument("--lbar-max", dest="lbar_max", type=int, required=True)
    p.set_defaults(func=cmd_rv_accel)

    g_zip = sub.add_parser("zip", help="zippered rectangles")
    s = g_zip.add_subparsers(dest="cmd", required=True)
    p = s.add_parser("backward")
    _add_common(p)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--eps", default="3/11",
                   help="off-boundary nudge for the seed suspension datum")
    p.set_defaults(func=cmd_zip_backward)

    g_flow = sub.add_parser("flow", help="special flow over the IET")
    s = g_flow.add_subparsers(dest="cmd", required=True)
    p = s.add_parser("orbit")
    _add_common(p, roof=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", type=float, default=0.0)
    p.set_defaults(func=cmd_flow_orbit)
    p = s.add_parser("birkhoff")
    _add_common(p, roof=True)
    p.add_argument("--x", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--derivative", action="store_true")
    p.set_defaults(func=cmd_flow_birkhoff)

    g_bs = sub.add_parser("bs", help="Birkhoff-sum diagnostics")
    s = g_bs.add_subparsers(dest="cmd", required=True)
    p = s.add_parser("growth")
    _add_common(p, roof=True, params=True)
    p.add_argument("--r-grid", dest="r_grid", default="1000,3000,10000")
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--eps", type=float, default=0.39)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bs_growth)
    p = s.add_parser("sigma-sets")
    _add_common(p, params=True)
    p.add_argument("--l-max", dest="l_max", type=int, required=True)
    p.set_defaults(func=cmd_bs_sigma_sets)

    g_dc = sub.add_parser("dc", help="Diophantine-condition diagnostics")
    s = g_dc.add_subparsers(dest="cmd", required=True)
    for name, func in (("mixing", cmd_dc_mixing), ("ratner", cmd_dc_ratner),
                       ("summability", cmd_dc_summability)):
        p = s.add_parser(name)
        _add_common(p, params=True)
        p.add_argument("--depth", type=int, required=True)
        if name != "mixing":
            p.add_argument("--window-len", dest="window_len", type=int,
                           default=None,
                           help="override the L-window (0 = consecutive "
                                "scales)")
        p.set_defaults(func=func)

    g_rat = sub.add_parser("ratner", help="switchable-Ratner witness")
    s = g_rat.add_subparsers(dest="cmd", required=True)
    p = s.add_parser("witness")
    _add_common(p, roof=True, params=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gap", default=None, help="pair separation (fraction)")
    p.add_argument("--n-floor", dest="n_floor", type=int, default=10)
    p.add_argument("--rate-floor", dest="rate_floor", type=float, default=0.9)
    p.add_argument("--window-len", dest="window_len", type=int, default=0)
    p.set_defaults(func=cmd_ratner_witness)
    p = s.add_parser("forbac")
    _add_common(p, params=True)
    p.add_argument("--l-range", dest="l_range", required=True,
                   help="e.g. 6..12")
    p.add_argument("--grid", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.2)
    p.set_defaults(func=cmd_ratner_forbac)

    g_mix = sub.add_parser("mix", help="Monte-Carlo mixing probes")
    s = g_mix.add_subparsers(dest="cmd", required=True)
    p = s.add_parser("correlate")
    _add_common(p, roof=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gx", type=float, default=0.3)
    p.add_argument("--gw", type=float, default=0.12)
    p.add_argument("--gy", type=float, default=0.45)
    p.add_argument("--gwy", type=float, default=0.3)
    p.add_argument("--hx", type=float, default=0.3)
    p.add_argument("--hw", type=float, default=0.12)
    p.add_argument("--hy", type=float, default=0.45)
    p.add_argument("--hwy", type=float, default=0.3)
    p.set_defaults(func=cmd_mix_correlate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParamWindowError as exc:
        print(json.dumps({"error": "usage", "field": exc.constraint,
                          "detail": str(exc)}), file=sys.stderr)
        return 2
    except IndeterminateComparison as exc:
        print(json.dumps({"error": "IndeterminateComparison",
                          "detail": str(exc)}), file=sys.stderr)
        return 1
    except (FileNotFoundError, ValueError) as exc:
        print(json.dumps({"error": "usage", "detail": str(exc)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
