"""Acceptance criteria 1-9, each at its stated tolerance and runtime limit.

Every criterion prints one line ``criterion <n> PASS|FAIL: ...``.  Run
directly (``python3 tests/test_acceptance.py``) for the lines alone.
"""

import math
import time

import numpy as np
import pytest

from huapickrell.density import (density_mass, diffrho_residual, limit_moment,
                                 limit_moment_quadrature, ode3_residual, watson_closed_form,
                                 watson_integral, watson_terms)
from huapickrell.moments import (general_recurrence_residual, initial_conditions,
                                 j_difference_residual, j_value, j_zeros,
                                 ledoux_identity_residual, q_byparts, q_hahn, q_quadrature,
                                 recurrence_residual, tilde_recurrence_residual,
                                 uniqueness_check)
from huapickrell.pseudojacobi import EnsembleParams
from huapickrell.sampler import ChainConfig, estimate_q, run_chain


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


class Outcome:
    def __init__(self, n, title, limit_s):
        self.n, self.title, self.limit_s = n, title, limit_s
        self.failures = []
        self.notes = []

    def check(self, ok, what):
        if not ok:
            self.failures.append(what)

    def note(self, text):
        self.notes.append(text)

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is not None:
            self.failures.append(f"{exc[0].__name__}: {exc[1]}")
        if self.elapsed > self.limit_s:
            self.failures.append(f"runtime {self.elapsed:.1f} s over {self.limit_s:g} s")
        self.passed = not self.failures
        tag = "PASS" if self.passed else "FAIL"
        detail = "; ".join(self.notes + self.failures[:3])
        self.line = (f"criterion {self.n} {tag}: {self.title} ({detail}; "
                     f"{self.elapsed:.2f} s of {self.limit_s:g} s)")
        return True


def criterion_1():
    with Outcome(1, "initial conditions on three routes", 10) as o:
        worst = 0.0
        for s in (1.0, 2.5, 4.0):
            for N in range(1, 11):
                p = EnsembleParams(s, N)
                for k, ref in zip((0, 1), initial_conditions(p)):
                    vals = [q_hahn(p, k), q_byparts(p, k)]
                    # Q(1) at s = 1 lies outside the strip: no integral exists there
                    if k < s - 0.5:
                        vals.append(q_quadrature(p, k))
                    worst = max(worst, *(_rel(v, ref) for v in vals))
        o.check(worst <= 1e-8, f"max rel err {worst:.2e} > 1e-8")
        o.note(f"max rel err {worst:.1e}")
    return o


def criterion_2():
    with Outcome(2, "closed form against density quadrature", 60) as o:
        worst = 0.0
        count = 0
        for s in (1.0, 2.5, 4.0):
            for N in range(1, 9):
                p = EnsembleParams(s, N)
                for k in (0.0, 0.3, 1.0, s / 2 - 0.4):
                    if k < s - 0.5:
                        worst = max(worst, _rel(q_hahn(p, k), q_quadrature(p, k)))
                        count += 1
        rng = np.random.default_rng(2)
        worst_c = 0.0
        for _ in range(20):
            s = float(rng.choice([1.0, 2.5, 4.0]))
            N = int(rng.integers(1, 9))
            k = complex(rng.uniform(-0.4, s - 0.6), rng.uniform(-2, 2))
            p = EnsembleParams(s, N)
            worst_c = max(worst_c, _rel(q_hahn(p, k), q_quadrature(p, k, tol=1e-11)))
        o.check(max(worst, worst_c) <= 1e-8, f"max rel err {max(worst, worst_c):.2e}")
        o.note(f"{count} real points {worst:.1e}, 20 complex k {worst_c:.1e}")
    return o


def criterion_3():
    with Outcome(3, "single-point beta oracle", 1) as o:
        rng = np.random.default_rng(3)
        worst = 0.0
        for _ in range(50):
            s = rng.uniform(0.2, 8.0)
            k = rng.uniform(-0.5, s - 0.5)
            ref = s * math.exp(math.lgamma(k + 0.5) + math.lgamma(s - k - 0.5)
                               - math.lgamma(s + 0.5)) / math.sqrt(math.pi)
            worst = max(worst, _rel(q_hahn(EnsembleParams(s, 1), k), ref))
        o.check(worst <= 1e-12, f"max rel err {worst:.2e}")
        o.note(f"max rel err {worst:.1e}")
    return o


def criterion_4():
    with Outcome(4, "recurrence identities", 120) as o:
        k_triples = [(3.3, 2, 0.2), (4.0, 3, 1.1), (4.0, 3, 0.3 + 0.7j), (5.5, 6, 2.2),
                     (2.2, 4, -0.3), (6.0, 10, 3.4), (3.0, 1, 0.75), (7.5, 15, 1.9 - 0.4j),
                     (1.8, 5, 0.4), (9.0, 8, 5.1)]
        j_triples = [(1.0, 3, 0.4 + 1j), (2.5, 8, -1.7), (4.0, 20, 2.2 - 3j), (0.3, 2, 5.5),
                     (3.7, 7, -3.1 + 0.2j), (6.0, 12, 0.0), (1.5, 1, 1.3j), (2.0, 30, 4.4),
                     (5.5, 5, -0.5), (8.0, 9, 2.5 + 2.5j)]
        g_triples = [(4 + 1j, 3, 5.5), (3 + 2j, 2, 5.0), (4.5 - 1j, 2, 6.5), (5 + 0.5j, 4, 7.0),
                     (3.5 + 3j, 1, 4.2), (6 - 2j, 3, 9.0), (4.2 + 0.3j, 5, 3.9),
                     (5.5 + 1.5j, 2, 8.3), (3.8 - 0.7j, 3, 6.1), (7 + 1j, 2, 11.0)]
        t_triples = [(3 + 1j, 2, 4), (4 + 1j, 3, 5), (4.5 - 0.5j, 2, 7), (5 + 2j, 2, 6),
                     (3.5 + 0.5j, 4, 5), (6 - 1j, 3, 8), (4 + 0.2j, 5, 6), (5.5 + 1j, 2, 9),
                     (3.2 - 2j, 3, 4), (6.5 + 0.7j, 2, 10)]
        res = {
            "k-rec": max(recurrence_residual(EnsembleParams(s, N), k) for s, N, k in k_triples),
            "J": max(j_difference_residual(EnsembleParams(s, N), k) for s, N, k in j_triples),
            "t-rec": max(general_recurrence_residual(EnsembleParams(s, N), t)
                         for s, N, t in g_triples),
            "tilde": max(tilde_recurrence_residual(EnsembleParams(s, N), m)
                         for s, N, m in t_triples),
        }
        for name, v in res.items():
            o.check(v <= 1e-6, f"{name} residual {v:.2e}")
        o.note(", ".join(f"{k} {v:.1e}" for k, v in res.items()))
    return o


def criterion_5():
    with Outcome(5, "Ledoux identity", 60) as o:
        res = [ledoux_identity_residual(EnsembleParams(s, N), t)
               for s, N, t in ((4.0, 3, 3.5), (5.0, 5, 4.0), (4 + 1j, 2, 4.0))]
        o.check(max(res) <= 1e-7, f"max residual {max(res):.2e}")
        o.note("residuals " + ", ".join(f"{r:.1e}" for r in res))
    return o


def criterion_6():
    with Outcome(6, "polynomiality, reflection, zeros, uniqueness", 30) as o:
        worst_d = 0.0
        for s, N in ((2.0, 3), (3.5, 6), (1.0, 9), (5.0, 12)):
            p = EnsembleParams(s, N)
            vals = np.array([complex(j_value(p, k)) for k in np.arange(N + 1.0) - 0.25])
            scale = np.max(np.abs(vals))
            worst_d = max(worst_d, abs(np.diff(vals, N)[0]) / scale)
        o.check(worst_d <= 1e-9, f"N-th difference {worst_d:.2e}")
        rng = np.random.default_rng(6)
        worst_r = 0.0
        for s, N in ((3.0, 5), (1.5, 8), (4.5, 2)):
            p = EnsembleParams(s, N)
            for _ in range(20):
                k = complex(rng.uniform(-4, 2), rng.uniform(-3, 3))
                a, b = j_value(p, k), j_value(p, -k - 2)
                worst_r = max(worst_r, abs(b - (-1) ** (N - 1) * a) / abs(a))
        o.check(worst_r <= 1e-10, f"reflection {worst_r:.2e}")
        worst_z = 0.0
        for s in (0.7, 2.0, 3.5):
            for N in range(2, 31):
                for z in j_zeros(EnsembleParams(s, N)):
                    worst_z = max(worst_z, abs(z.real + 1) / (1 + abs(z)))
        o.check(worst_z <= 1e-8, f"zero line {worst_z:.2e}")
        dims = [uniqueness_check(EnsembleParams(s, N)).null_dim for s, N in ((1.0, 4), (2.5, 10))]
        o.check(dims == [1, 1], f"null dims {dims}")
        o.note(f"diff {worst_d:.1e}, reflection {worst_r:.1e}, zeros {worst_z:.1e}, "
               f"null dims {dims}")
    return o


def criterion_7():
    with Outcome(7, "density identities", 60) as o:
        x = np.concatenate([-np.logspace(2, -2, 21), [0.0], np.logspace(-2, 2, 21)])
        grid = [(2.0, 3), (0.4, 5), (-0.3, 4), (6.5, 12), (2 + 1j, 3), (1.5 - 0.5j, 6),
                (-0.45 + 1j, 5), (0.1 + 2j, 2), (3.0, 1)]
        m = d = e = 0.0
        for s, N in grid:
            p = EnsembleParams(s, N)
            m = max(m, abs(density_mass(p).value - N) / N)
            d = max(d, float(np.max(diffrho_residual(p, x))))
            e = max(e, float(np.max(ode3_residual(p, x))))
        o.check(m <= 1e-8, f"mass {m:.2e}")
        o.check(d <= 1e-9, f"diffrho {d:.2e}")
        o.check(e <= 1e-7, f"ode {e:.2e}")
        o.note(f"mass {m:.1e}, diffrho {d:.1e}, ode {e:.1e}")
    return o


def criterion_8():
    with Outcome(8, "large-N asymptotics", 120) as o:
        err = {N: abs(q_hahn(EnsembleParams(2.0, N), 0.0) / N ** 2 - 4 / 15) for N in (100, 200)}
        ratio = err[100] / err[200]
        o.check(err[200] <= 0.01, f"N=200 error {err[200]:.3g}")
        o.check(1.6 <= ratio <= 2.4, f"error ratio {ratio:.3f}")
        lm = w = 0.0
        for y in (1.2, 2.0, 3.0):
            lm = max(lm, _rel(limit_moment_quadrature(y, 2.0).value, limit_moment(y, 2.0)))
            for mu, nu, lam in watson_terms(y, 2.0):
                ref = watson_closed_form(mu, nu, lam)
                w = max(w, abs(watson_integral(mu, nu, lam).value - ref) / max(abs(ref), 1.0))
        o.check(lm <= 1e-7, f"limit moment {lm:.2e}")
        o.check(w <= 1e-7, f"Watson {w:.2e}")
        o.note(f"N=200 error {err[200]:.4f}, ratio {ratio:.2f}, limit moment {lm:.1e}, "
               f"Watson {w:.1e}")
    return o


def _ks_single(samples):
    # N = 1, s = 2: CDF of (8/(3 pi)) (1+x^2)^{-3} through theta = atan x
    x = np.sort(samples)
    t = np.arctan(x)
    F = 0.5 + (3 * t / 8 + np.sin(2 * t) / 4 + np.sin(4 * t) / 32) / (3 * math.pi / 8)
    n = x.size
    return max(np.max(np.arange(1, n + 1) / n - F), np.max(F - np.arange(n) / n))


def criterion_9():
    with Outcome(9, "Monte Carlo oracle", 300) as o:
        p = EnsembleParams(3.0, 5)
        chain = run_chain(p, ChainConfig(seed=20240901, burn_in=50000, total_kept=1_000_000))
        (est,) = estimate_q(chain, [1.0])
        ref = q_hahn(p, 1.0)
        z = (est.estimate - ref) / est.std_error
        o.check(abs(z) <= 3, f"z = {z:.2f}")
        single = run_chain(EnsembleParams(2.0, 1),
                           ChainConfig(seed=7, burn_in=5000, thinning=5, total_kept=100_000))
        D = _ks_single(single.samples[:, 0])
        o.check(D <= 0.01, f"KS {D:.4f}")
        o.note(f"Q {est.estimate:.5f} vs {ref:.5f}, z {z:+.2f}, KS {D:.4f}")
    return o


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i + 1}" for i in range(9)])
def test_criterion(crit, capsys):
    o = crit()
    with capsys.disabled():
        print("\n" + o.line)
    assert o.passed, o.line


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    for r in results:
        print(r.line)
    raise SystemExit(0 if all(r.passed for r in results) else 1)
