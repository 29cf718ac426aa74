"""Identity checks grouped into suites, shared by the CLI and the tests.

Every check returns a `CheckRecord`.  A nonzero ``perturb`` injects a
relative error into one term of each identity so that the harness can
prove it detects failures.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, NamedTuple

import numpy as np

from . import density as dens
from . import moments as mom
from .errors import HuaPickrellError
from .pseudojacobi import EnsembleParams

__all__ = ["CheckRecord", "SUITES", "TOLERANCES", "run_suite"]

TOLERANCES = {
    "initial": 1e-8,
    "ode": 1e-7,
    "diffrho": 1e-9,
    "mass": 1e-8,
    "ledoux": 1e-7,
    "recurrence": 1e-6,
    "reflection": 1e-10,
    "zeros": 1e-8,
    "polynomiality": 1e-9,
    "watson": 1e-7,
}


class CheckRecord(NamedTuple):
    name: str
    params: dict
    residual: float
    tolerance: float
    passed: bool
    detail: dict

    def as_dict(self) -> dict:
        return {"name": self.name, "params": self.params, "residual": self.residual,
                "tolerance": self.tolerance, "pass": self.passed, "detail": self.detail}


def _cplx(z) -> object:
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def _rec(name, params, residual, tol, **detail) -> CheckRecord:
    r = float(residual)
    return CheckRecord(name, params, r, tol, bool(r <= tol), detail)


def _pd(p: EnsembleParams, **extra) -> dict:
    d = {"s": _cplx(p.s), "N": p.N}
    d.update({k: _cplx(v) if isinstance(v, complex) else v for k, v in extra.items()})
    return d


# --------------------------------------------------------------------------
# individual checks


def check_initial(p: EnsembleParams, perturb: float = 0.0) -> list:
    q0, q1 = mom.initial_conditions(p)
    out = []
    for k, ref in ((0, q0), (1, q1)):
        ref = ref * (1.0 + perturb)
        vals = {"hahn": mom.q_hahn(p, k), "byparts": mom.q_byparts(p, k)}
        if mom.MomentArgument(k).in_strip(p):
            vals["quadrature"] = mom.q_quadrature(p, k)
        res = max(abs(v - ref) / abs(ref) for v in vals.values())
        out.append(_rec("initial_conditions", _pd(p, k=k), res, TOLERANCES["initial"],
                        routes=sorted(vals)))
    return out


def check_ode(p: EnsembleParams, xs, perturb: float = 0.0) -> list:
    res = np.max(dens.ode3_residual(p, np.asarray(xs, float), perturb))
    return [_rec("ode3", _pd(p), res, TOLERANCES["ode"], points=len(xs))]


def check_diffrho(p: EnsembleParams, xs, perturb: float = 0.0) -> list:
    res = np.max(dens.diffrho_residual(p, np.asarray(xs, float), perturb))
    return [_rec("diffrho", _pd(p), res, TOLERANCES["diffrho"], points=len(xs))]


def check_mass(p: EnsembleParams, perturb: float = 0.0) -> list:
    m = dens.density_mass(p).value * (1.0 + perturb)
    return [_rec("density_mass", _pd(p), abs(m - p.N) / p.N, TOLERANCES["mass"], mass=m)]


def check_ledoux(p: EnsembleParams, t: float, perturb: float = 0.0) -> list:
    res = mom.ledoux_identity_residual(p, t, perturb)
    return [_rec("ledoux", _pd(p, t=t), res, TOLERANCES["ledoux"])]


def check_k_recurrence(p: EnsembleParams, k, perturb: float = 0.0) -> list:
    return [_rec("k_recurrence", _pd(p, k=complex(k)), mom.recurrence_residual(p, k, perturb),
                 TOLERANCES["recurrence"])]


def check_j_difference(p: EnsembleParams, k, perturb: float = 0.0) -> list:
    return [_rec("j_difference", _pd(p, k=complex(k)),
                 mom.j_difference_residual(p, k, perturb), TOLERANCES["recurrence"])]


def check_general_recurrence(p: EnsembleParams, t: float, perturb: float = 0.0) -> list:
    return [_rec("general_recurrence", _pd(p, t=t),
                 mom.general_recurrence_residual(p, t, perturb), TOLERANCES["recurrence"])]


def check_tilde(p: EnsembleParams, m: int, perturb: float = 0.0) -> list:
    return [_rec("tilde_recurrence", _pd(p, m=m),
                 mom.tilde_recurrence_residual(p, m, perturb), TOLERANCES["recurrence"])]


def check_reflection(p: EnsembleParams, k, perturb: float = 0.0) -> list:
    k = complex(k)
    a = mom.j_value(p, -k - 2) * (1.0 + perturb)
    b = (-1) ** (p.N - 1) * mom.j_value(p, k)
    res = abs(a - b) / max(abs(a), abs(b), 1e-300)
    return [_rec("reflection", _pd(p, k=k), res, TOLERANCES["reflection"])]


def check_zeros(p: EnsembleParams, perturb: float = 0.0) -> list:
    if perturb == 0.0:
        roots = mom.j_zeros(p)
    else:
        # break the reflection parity of the polynomial in z = k + 1
        poly = mom.j_polynomial(p)
        c = np.array([float(a) for a in poly.shifted])
        if c.size > 1:
            c[-2] += perturb * abs(c[-1])
        roots = [complex(z) - 1.0 for z in np.roots(c[::-1])]
    dev = [abs(z.real + 1.0) / (1.0 + abs(z)) for z in roots]
    res = max(dev, default=0.0)
    return [_rec("zeros_on_line", _pd(p), res, TOLERANCES["zeros"],
                 roots=[[z.real, z.imag] for z in roots],
                 re_plus_one=[abs(z.real + 1.0) for z in roots])]


def check_polynomiality(p: EnsembleParams, k0: float = 0.0, perturb: float = 0.0) -> list:
    N = p.N
    vals = [mom.j_value(p, k0 + j) for j in range(N + 1)]
    vals[-1] *= 1.0 + perturb
    terms = [(-1) ** (N - j) * math.comb(N, j) * vals[j] for j in range(N + 1)]
    scale = sum(abs(t) for t in terms)
    res = abs(sum(terms)) / scale
    return [_rec("nth_difference", _pd(p, k0=k0), res, TOLERANCES["polynomiality"])]


def check_uniqueness(p: EnsembleParams, perturb: float = 0.0) -> list:
    r = mom.uniqueness_check(p, perturb=perturb)
    return [CheckRecord("uniqueness", _pd(p), float(r.null_dim), 1.0, r.null_dim == 1,
                        {"null_dim": r.null_dim, "singular_values": list(r.singular_values),
                         "degree_N_leading_residual": mom.uniqueness_check(
                             p, degree=p.N, perturb=perturb).leading_residual})]


def check_watson(y: float, s: float, perturb: float = 0.0) -> list:
    out = []
    closed = dens.limit_moment(y, s) * (1.0 + perturb)
    quad = dens.limit_moment_quadrature(y, s).value
    out.append(_rec("limit_moment", {"y": y, "s": s}, abs(quad - closed) / abs(closed),
                    TOLERANCES["watson"], closed=closed, quadrature=quad))
    for i, (mu, nu, lam) in enumerate(dens.watson_terms(y, s)):
        cf = dens.watson_closed_form(mu, nu, lam)
        q = dens.watson_integral(mu, nu, lam).value
        scale = max(abs(cf), abs(closed))
        # additive, since some of these integrals vanish exactly
        cf += perturb * scale
        out.append(_rec(f"watson_{i + 1}", {"mu": mu, "nu": nu, "lam": lam},
                        abs(q - cf) / scale, TOLERANCES["watson"], closed=cf, quadrature=q))
    return out


# --------------------------------------------------------------------------
# suites


def _grid_x():
    return np.concatenate([-np.logspace(2, -2, 9), [0.0], np.logspace(-2, 2, 9)])


def _ode_jobs(pairs, perturb):
    xs = _grid_x()
    jobs = []
    for s, N in pairs:
        p = EnsembleParams(s, N)
        jobs.append(lambda p=p: check_ode(p, xs, perturb))
        if p.is_real:
            jobs.append(lambda p=p: check_diffrho(p, xs, perturb))
        jobs.append(lambda p=p: check_mass(p, perturb))
    return jobs


def _real_pairs(pairs):
    return [(s, N) for s, N in pairs or () if complex(s).imag == 0]


def _suite_jobs(suite: str, pairs, perturb: float) -> list:
    P = EnsembleParams
    if suite == "ode":
        return _ode_jobs(pairs or [(2.0, 1), (2.0, 4), (0.3, 3), (2 + 1j, 3), (1.5 - 0.5j, 5)],
                         perturb)
    if suite == "ledoux":
        grid = [((4.0, 3), 3.5), ((5.0, 5), 4.0), ((4 + 1j, 2), 4.0)]
        if pairs:
            grid = [((s, N), 0.5 * (3.0 + 2.0 * complex(s).real - 2.0)) for s, N in pairs]
        return [lambda a=a, t=t: check_ledoux(P(*a), t, perturb) for a, t in grid]
    if suite == "recurrences":
        real = _real_pairs(pairs) or [(3.0, 3), (4.5, 2)]
        jobs = []
        for s, N in real:
            p = P(s, N)
            jobs.append(lambda p=p: check_initial(p, perturb))
            for k in (0.3, 1.0, 0.5 + 0.7j):
                jobs.append(lambda p=p, k=k: check_k_recurrence(p, k, perturb))
                jobs.append(lambda p=p, k=k: check_j_difference(p, k, perturb))
        for s, N in (pairs or [(4 + 1j, 2), (5.0 - 0.5j, 3)]):
            p = P(s, N)
            if 2 * p.re_s > 3.5:
                t = 0.5 * (3.0 + 2.0 * p.re_s)
                jobs.append(lambda p=p, t=t: check_general_recurrence(p, t, perturb))
            if 2 * p.re_s - 1 > 4:
                jobs.append(lambda p=p: check_tilde(p, 4, perturb))
        return jobs
    if suite == "reflection":
        real = _real_pairs(pairs) or [(2.0, 3), (3.5, 6), (1.0, 9)]
        return [lambda s=s, N=N, k=k: check_reflection(P(s, N), k, perturb)
                for s, N in real for k in (0.25, 1.5, -0.3 + 0.4j)]
    if suite == "zeros":
        real = _real_pairs(pairs) or [(2.0, 6), (3.5, 12), (1.0, 30)]
        return [lambda s=s, N=N: check_zeros(P(s, N), perturb) for s, N in real]
    if suite == "polynomiality":
        real = _real_pairs(pairs) or [(2.0, 3), (3.5, 8), (1.25, 12)]
        return [lambda s=s, N=N: check_polynomiality(P(s, N), 0.0, perturb) for s, N in real]
    if suite == "uniqueness":
        real = _real_pairs(pairs) or [(2.0, 4), (3.5, 6)]
        return [lambda s=s, N=N: check_uniqueness(P(s, N), perturb) for s, N in real]
    if suite == "watson":
        ss = sorted({complex(s).real for s, _ in _real_pairs(pairs)}) or [2.0]
        return [lambda y=y, s=s: check_watson(y, s, perturb)
                for s in ss for y in (1.2, 2.0, 3.0) if 1.0 < y < 2 * s + 1]
    raise ValueError(f"unknown suite {suite!r}")


SUITES = ("ode", "ledoux", "recurrences", "reflection", "zeros", "polynomiality",
          "uniqueness", "watson")


def run_suite(suite: str = "all", pairs=None, perturb: float = 0.0, threads: int = 1) -> list:
    """Run a suite and return its records in a thread-count independent order.

    Parameters
    ----------
    suite : str
        One of `SUITES` or ``"all"``.
    pairs : list of (s, N), optional
        Parameter grid overriding the suite defaults.
    """
    names = SUITES if suite == "all" else (suite,)
    jobs: list[Callable] = []
    for name in names:
        jobs.extend(_suite_jobs(name, pairs, perturb))
    def call(f):
        try:
            return f()
        except HuaPickrellError as exc:
            return [CheckRecord(type(exc).__name__, {}, math.nan, math.nan, False,
                                {"error": str(exc)})]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(call, jobs))
    else:
        parts = [call(f) for f in jobs]
    return [r for part in parts for r in part]
