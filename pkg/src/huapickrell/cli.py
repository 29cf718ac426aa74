"""Command-line front end.

Subcommands ``moment``, ``density``, ``verify``, ``limit`` and ``sample``
write CSV tables (or a JSON report for ``verify``) to ``--out`` or stdout.
Every file written gets a ``<out>.manifest.json`` sidecar describing the
run.  Exit codes: 0 when every check passes, 1 on a numeric check
failure, 2 on a usage or domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import density as dens
from . import moments as mom
from . import sampler as smp
from .errors import HuaPickrellError
from .kernels import BACKEND
from .pseudojacobi import EnsembleParams
from .verify import SUITES, run_suite

CSV_VERSION = "huapickrell-csv/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------------
# formatting


def fmt(v) -> str:
    """17 significant digits; integers and strings pass through."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def parse_complex(text: str) -> complex:
    """Accept ``2``, ``-0.5``, ``2+1i``, ``2-0.5j``, ``1i``."""
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _split(z: complex):
    z = complex(z)
    return z.real, z.imag


def _threads(arg) -> int:
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("HUAPICKRELL_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _pmap(fn, items, threads: int) -> list:
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _write_table(args, header, rows) -> str:
    buf = io.StringIO(newline="")
    buf.write(f"# {CSV_VERSION} {args.command}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _emit(args, text: str, manifest: dict):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        with open(args.out + ".manifest.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")
    else:
        sys.stdout.write(text)


def _manifest(args, t0: float, seeds=None, tolerances=None) -> dict:
    # complex values serialize as [re, im] through _json_default
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out", "command")}
    return {"command": args.command, "parameters": params, "version": __version__,
            "backend": BACKEND, "seeds": seeds or [], "tolerances": tolerances or {},
            "wall_time_s": time.perf_counter() - t0}


def _params(s, N) -> EnsembleParams:
    try:
        return EnsembleParams(s, N)
    except HuaPickrellError as exc:
        raise UsageError(str(exc)) from None


# --------------------------------------------------------------------------
# moment


_ROUTES = ("hahn", "quadrature", "byparts", "recurrence")


def _moment_route(p: EnsembleParams, k: complex, route: str, tol: float):
    if route == "hahn":
        q = mom.q_hahn(p, k)
        return q, mom.j_value(p, k, "hahn"), math.nan
    if route == "quadrature":
        q = mom.q_quadrature(p, k, tol)
        return q, q / mom._gamma_pair(p, k), tol * abs(q)
    if route == "byparts":
        q = mom.q_byparts(p, k)
        return q, mom.j_value(p, k, "byparts"), math.nan
    # integer steps from the fractional base; closed-form seeds at k0 = 0
    n = math.floor(k.real)
    k0 = k - n
    if k0.imag == 0 and k0.real == 0:
        vals = mom.q_recurrence(p, 0, max(n, 1))
    elif n >= 1:
        vals = mom.q_recurrence(p, k0, n)
    else:
        vals = [mom.q_hahn(p, k)]
        n = 0
    q = complex(vals[n])
    return q, q / mom._gamma_pair(p, k), math.nan


def cmd_moment(args) -> int:
    t0 = time.perf_counter()
    p = _params(args.s, args.N)
    routes = _ROUTES if args.method == "all" else (args.method,)
    jobs = [(k, r) for k in args.k for r in routes]

    def run(job):
        k, r = job
        try:
            if not mom.MomentArgument(k).in_strip(p):
                return k, r, None, "outside-strip"
            return k, r, _moment_route(p, k, r, args.tol), "ok"
        except HuaPickrellError as exc:
            return k, r, None, type(exc).__name__

    results = _pmap(run, jobs, _threads(args.threads))
    header = ["s_re", "s_im", "N", "k_re", "k_im", "method", "Q_re", "Q_im", "J_re", "J_im",
              "err_est", "status"]
    if args.method == "all":
        header.append("discrepancy")
    rows, failed = [], False
    for k in args.k:
        group = [x for x in results if x[0] == k]
        disc = math.nan
        good = [x[2][0] for x in group if x[2] is not None]
        if args.method == "all" and len(good) > 1:
            disc = max(abs(a - b) / max(abs(a), abs(b), 1e-300) for a in good for b in good)
        for _, r, val, status in group:
            if args.method == "all" and status == "ok" and not disc <= args.check_tol:
                status = "discrepant"
            failed |= status != "ok"
            q, j, err = val if val is not None else (math.nan, math.nan, math.nan)
            row = [*_split(p.s), p.N, *_split(k), r, *_split(q), *_split(j), err, status]
            if args.method == "all":
                row.append(disc)
            rows.append(row)
    _emit(args, _write_table(args, header, rows),
          _manifest(args, t0, tolerances={"quadrature": args.tol, "discrepancy": args.check_tol}))
    return EXIT_FAIL if failed else EXIT_OK


# --------------------------------------------------------------------------
# density


def cmd_density(args) -> int:
    t0 = time.perf_counter()
    if args.points < 1:
        raise UsageError("--points must be at least 1 (empty grid)")
    if args.xmax < args.xmin:
        raise UsageError("--xmax must not be below --xmin")
    p = _params(args.s, args.N)
    x = np.linspace(args.xmin, args.xmax, args.points)
    cols = {"x": x, "rho": dens.rho(p, x, nder=0).rho}
    pos = x > 0
    if args.scaled:
        sc = np.full_like(x, math.nan)
        if pos.any():
            sc[pos] = dens.rho_scaled(p, x[pos])
        cols["rho_scaled"] = sc
    if args.limit:
        if not p.is_real or not p.re_s > 0.5:
            raise UsageError("--limit needs real s > 1/2")
        lim = np.full_like(x, math.nan)
        if pos.any():
            lim[pos] = dens.rho_limit(p.re_s, x[pos]).rho_inf
        cols["rho_limit"] = lim
    failed = False
    if args.ode_residual:
        res = dens.ode3_residual(p, x)
        cols["ode_residual"] = res
        failed = bool(np.any(res > args.ode_tol))
    header = list(cols)
    rows = list(zip(*(cols[h] for h in header)))
    _emit(args, _write_table(args, header, rows),
          _manifest(args, t0, tolerances={"ode_residual": args.ode_tol}))
    return EXIT_FAIL if failed else EXIT_OK


# --------------------------------------------------------------------------
# verify


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(type(o).__name__)


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    pairs = None
    if args.s or args.N:
        ss = args.s or [2.0]
        ns = args.N or [3]
        pairs = [(s, N) for s in ss for N in ns]
        for s, N in pairs:
            _params(s, N)
    recs = run_suite(args.suite, pairs, args.perturb, _threads(args.threads))
    ok = bool(recs) and all(r.passed for r in recs)
    report = {"suite": args.suite, "perturb": args.perturb, "all_pass": ok,
              "checks": [r.as_dict() for r in recs],
              "manifest": _manifest(args, t0)}
    text = json.dumps(report, indent=2, default=_json_default, allow_nan=True) + "\n"
    _emit(args, text, report["manifest"])
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------
# limit


def cmd_limit(args) -> int:
    t0 = time.perf_counter()
    s, k = args.s, args.k
    try:
        lim = mom.large_n_limit(k, s)
    except HuaPickrellError as exc:
        raise UsageError(str(exc)) from None
    Ns = sorted(set(args.N_list))

    def run(N):
        return mom.q_hahn(EnsembleParams(s, N), k).real / N ** (2 * k + 2)

    vals = _pmap(run, Ns, _threads(args.threads))
    rows = []
    for N, v in zip(Ns, vals):
        err = abs(v - lim)
        rows.append([N, v, lim, err, err * N])
    header = ["N", "Q_over_N_pow", "limit", "abs_err", "err_x_N"]
    _emit(args, _write_table(args, header, rows), _manifest(args, t0))
    return EXIT_OK


# --------------------------------------------------------------------------
# sample


def cmd_sample(args) -> int:
    t0 = time.perf_counter()
    p = _params(args.s, args.N)
    try:
        cfg = smp.ChainConfig(args.seed, args.burnin, args.thin, args.kept, args.scale)
    except HuaPickrellError as exc:
        raise UsageError(str(exc)) from None
    chains = smp.run_chains(p, cfg, args.chains, _threads(args.threads))
    estimates = []
    failed = False
    for k in args.k_list:
        try:
            per = [smp.estimate_q(c, [k])[0] for c in chains]
        except HuaPickrellError as exc:
            raise UsageError(str(exc)) from None
        est = math.fsum(e.estimate for e in per) / len(per)
        se = math.sqrt(math.fsum(e.std_error ** 2 for e in per)) / len(per)
        rec = {"k": k, "estimate": est, "std_error": se,
               "ess": math.fsum(e.ess for e in per), "n_samples": sum(e.n_samples for e in per)}
        if p.is_real:
            ref = mom.q_hahn(p, k).real
            z = (est - ref) / se
            rec.update(q_hahn=ref, z_score=z)
            failed |= args.z_max is not None and abs(z) > args.z_max
        else:
            rec.update(q_hahn=None, z_score=None,
                       note="z-score disabled: the closed form needs real s")
        estimates.append(rec)
    report = {"estimator": "rao-blackwell" if p.is_real else "plain",
              "chains": [{"chain": c.config.chain, "acceptance_rate": c.acceptance_rate,
                          "proposal_scale": c.proposal_scale} for c in chains],
              "estimates": estimates}
    if not p.is_real:
        report["note"] = "z-score disabled: the closed form needs real s"
    seeds = [{"seed": args.seed, "chain": c.config.chain} for c in chains]
    man = _manifest(args, t0, seeds=seeds, tolerances={"z_max": args.z_max})
    report["manifest"] = man
    if args.out:
        header = ["chain", "step"] + [f"x{j + 1}" for j in range(p.N)]
        rows = []
        for c in chains:
            for i, row in enumerate(c.samples):
                rows.append([c.config.chain, (i + 1) * args.thin, *row])
        _emit(args, _write_table(args, header, rows), man)
    text = json.dumps(report, indent=2, default=_json_default) + "\n"
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_FAIL if failed else EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="huapickrell", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (default $HUAPICKRELL_THREADS or CPU count)")

    sp = sub.add_parser("moment", help="Q(k; s, N) by one or all routes")
    sp.add_argument("--s", type=parse_complex, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--k", type=parse_complex, action="append", required=True)
    sp.add_argument("--method", choices=_ROUTES + ("all",), default="hahn")
    sp.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance")
    sp.add_argument("--check-tol", type=float, default=1e-8,
                    help="largest route discrepancy accepted with --method all")
    common(sp)
    sp.set_defaults(func=cmd_moment)

    sp = sub.add_parser("density", help="one-point density on a grid")
    sp.add_argument("--s", type=parse_complex, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--xmin", type=float, required=True)
    sp.add_argument("--xmax", type=float, required=True)
    sp.add_argument("--points", type=int, required=True)
    sp.add_argument("--scaled", action="store_true", help="add N rho(N x)")
    sp.add_argument("--limit", action="store_true", help="add the large-N limit density")
    sp.add_argument("--ode-residual", action="store_true")
    sp.add_argument("--ode-tol", type=float, default=1e-7)
    common(sp)
    sp.set_defaults(func=cmd_density)

    sp = sub.add_parser("verify", help="identity checks, JSON report")
    sp.add_argument("--suite", choices=("all",) + SUITES, default="all")
    sp.add_argument("--s", type=parse_complex, action="append")
    sp.add_argument("--N", type=int, action="append")
    sp.add_argument("--perturb", type=float, default=0.0,
                    help="relative error injected into each identity")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("limit", help="Q / N^(2k+2) against its large-N limit")
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--k", type=float, required=True)
    sp.add_argument("--N-list", type=int, nargs="+", required=True)
    common(sp)
    sp.set_defaults(func=cmd_limit)

    sp = sub.add_parser("sample", help="MCMC chain and Monte Carlo moment estimates")
    sp.add_argument("--s", type=parse_complex, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--kept", type=int, default=10_000)
    sp.add_argument("--burnin", type=int, default=10_000)
    sp.add_argument("--thin", type=int, default=1)
    sp.add_argument("--scale", type=float, default=1.0, help="initial proposal scale")
    sp.add_argument("--chains", type=int, default=1)
    sp.add_argument("--k-list", type=float, nargs="+", default=[0.0])
    sp.add_argument("--z-max", type=float, default=3.0,
                    help="fail when some |z| exceeds this (real s only)")
    sp.add_argument("--report", help="estimator JSON file (default stdout)")
    common(sp)
    sp.set_defaults(func=cmd_sample)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"huapickrell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
