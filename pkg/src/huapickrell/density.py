"""One-point density, its differential identities and the large-N limit.

The density of N points is the Christoffel-Darboux diagonal

    rho(x) = gamma^2 phi(x) [p_{N-1}(x) p_N'(x) - p_N(x) p_{N-1}'(x)],

evaluated on the scaled polynomials ``p_j / (1+x^2)^{j/2}`` so that the
weight absorbs all growth.  Derivatives up to third order are assembled
analytically from the polynomial derivatives and the logarithmic
derivatives of ``phi``.

The limit density is a Wronskian of Bessel functions in ``u = 1/x``:

    rho_inf(x) = (1/2) x^{-3} [J'_{s+1/2}(u) J_{s-1/2}(u) - J_{s+1/2}(u) J'_{s-1/2}(u)].
"""

from __future__ import annotations

import cmath
import math
from math import comb
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .kernels import bessel_ladder_array
from .pseudojacobi import EnsembleParams, log_norm_gamma_sq, p_scaled
from .quadrature import QuadratureResult, integrate_interval, integrate_line
from .specfun import gamma_ratio, GammaRatioSpec, log_gamma, rgamma

__all__ = [
    "DensityEval",
    "LimitDensityEval",
    "bessel_product_integral",
    "density_mass",
    "diffrho_residual",
    "limit_moment",
    "limit_moment_quadrature",
    "limit_prefactor",
    "ode3_residual",
    "rho",
    "rho_continued",
    "rho_limit",
    "rho_scaled",
    "watson_closed_form",
    "watson_integral",
    "watson_terms",
]


class DensityEval(NamedTuple):
    """Density and its first three derivatives at ``x``."""

    x: np.ndarray
    rho: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray


class LimitDensityEval(NamedTuple):
    """Limit density at ``x > 0``."""

    x: np.ndarray
    rho_inf: np.ndarray


def _gamma_sq_continued(params: EnsembleParams) -> complex:
    # holomorphic continuation of gamma^2 from real s
    s, N = params.s, params.N
    lg = (2.0 * s * math.log(2.0) - math.log(math.pi) + log_gamma(2 * s + N + 1)
          + 2.0 * log_gamma(s + 1) - log_gamma(N) - log_gamma(2 * s + 1)
          - log_gamma(2 * s + 2))
    return cmath.exp(lg)


def _log_weight_derivs(x, nr, im):
    # derivatives 1..3 of log phi, phi = (1+x^2)^(-nr) exp(2 im atan x)
    v = 1.0 + x * x
    d1 = (2.0 * im - 2.0 * nr * x) / v
    d2 = (2.0 * nr * x * x - 4.0 * im * x - 2.0 * nr) / (v * v)
    d3 = (-4.0 * nr * x ** 3 + 12.0 * im * x * x + 12.0 * nr * x - 4.0 * im) / (v ** 3)
    return d1, d2, d3


def _density(params: EnsembleParams, x, nder: int, holomorphic: bool):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    N = params.N
    arr = p_scaled(params, N, x, nder=nder + 1, continued=True, holomorphic=holomorphic)
    A, B = arr[0], arr[1]
    # scaled Wronskian derivatives W^(j) = sum_i C(j,i) [A^(i) B^(j-i+1) - B^(i) A^(j-i+1)]
    W = []
    for j in range(nder + 1):
        w = 0.0
        for i in range(j + 1):
            w = w + comb(j, i) * (A[i] * B[j - i + 1] - B[i] * A[j - i + 1])
        W.append(w)
    lv = np.log1p(x * x)
    if holomorphic:
        nr, im = params.s + N, 0.0
        g2 = _gamma_sq_continued(params)
        phi_hat = np.exp(-(0.5 + params.s) * lv)
    else:
        nr, im = params.re_s + N, params.im_s
        g2 = math.exp(log_norm_gamma_sq(params))
        phi_hat = np.exp(-(0.5 + params.re_s) * lv + 2.0 * im * np.arctan(x))
    q1, q2, q3 = _log_weight_derivs(x, nr, im)
    P = [1.0, q1, q2 + q1 * q1, q3 + 3.0 * q1 * q2 + q1 ** 3]
    out = []
    for r in range(nder + 1):
        acc = 0.0
        for i in range(r + 1):
            acc = acc + comb(r, i) * P[i] * W[r - i]
        out.append(g2 * phi_hat * acc)
    if not holomorphic:
        out = [np.real(v) for v in out]
    return x, out, A, B, g2, phi_hat


def _shape(vals, like):
    if np.ndim(like) == 0:
        return [v[0].item() for v in vals]
    return [np.reshape(v, np.shape(like)) for v in vals]


def rho(params: EnsembleParams, x, nder: int = 3) -> DensityEval:
    """One-point density and derivatives up to order ``nder`` (at most 3).

    Real-valued for every admissible ``s``.  Derivatives above ``nder``
    are returned as NaN.

    Examples
    --------
    >>> round(rho(EnsembleParams(2.0, 1), 0.0).rho * 3 * math.pi / 8, 12)
    1.0
    """
    if not 0 <= nder <= 3:
        raise ValueError("nder must be in 0..3")
    xa, vals, *_ = _density(params, x, nder, holomorphic=False)
    vals = vals + [np.full_like(xa, np.nan)] * (3 - nder)
    return DensityEval(*_shape([xa] + vals, x))


def rho_continued(params: EnsembleParams, x) -> DensityEval:
    """Holomorphic continuation in ``s`` of the real-``s`` density.

    Equal to `rho` for real ``s``; complex-valued otherwise.  This is the
    object annihilated by the third-order operator of `ode3_residual`.
    """
    xa, vals, *_ = _density(params, x, 3, holomorphic=True)
    return DensityEval(*_shape([xa] + vals, x))


def _relative(terms):
    scale = np.max(np.abs(np.stack(terms)), axis=0)
    tot = np.abs(sum(terms))
    return np.where(scale > 0, tot / np.where(scale > 0, scale, 1.0), 0.0)


def diffrho_residual(params: EnsembleParams, x, perturb: float = 0.0):
    """Relative residual of ``d/dx[(1+x^2) rho] + 2 Re(s) gamma^2 phi p_N p_{N-1}``.

    Parameters
    ----------
    perturb : float
        Relative perturbation of ``gamma^2`` in the second term.
    """
    xa, vals, A, B, g2, phi_hat = _density(params, x, 1, holomorphic=False)
    t1 = 2.0 * xa * vals[0]
    t2 = (1.0 + xa * xa) * vals[1]
    t3 = np.real(2.0 * params.re_s * g2 * (1.0 + perturb) * phi_hat * A[0] * B[0])
    res = _relative([t1, t2, t3])
    return res if np.ndim(x) else float(res[0])


def ode3_terms(params: EnsembleParams, x):
    """The four terms of the third-order density operator at ``x``.

    For non-real ``s`` they are evaluated on `rho_continued`.
    """
    ev = _density(params, x, 3, holomorphic=not params.is_real)
    xa, (r0, r1, r2, r3) = ev[0], ev[1]
    s = params.s if not params.is_real else params.re_s
    N = params.N
    v = 1.0 + xa * xa
    nn = 2.0 * N * (N + 2.0 * s)
    return [
        v ** 3 * r3,
        8.0 * xa * v * v * r2,
        2.0 * v * (3.0 + nn + (7.0 - 2.0 * s * s) * xa * xa) * r1,
        4.0 * xa * (1.0 + s * s + nn + (1.0 - s * s) * xa * xa) * r0,
    ]


def ode3_residual(params: EnsembleParams, x, perturb: float = 0.0):
    """Relative residual of the third-order ODE of the density.

    ``(1+x^2)^3 rho''' + 8x(1+x^2)^2 rho'' + 2(1+x^2)(3+2N(N+2s)+(7-2s^2)x^2) rho'
    + 4x(1+s^2+2N(N+2s)+(1-s^2)x^2) rho``, divided by the largest term.

    Parameters
    ----------
    perturb : float
        Relative perturbation applied to the last term.
    """
    t = ode3_terms(params, x)
    t[3] = t[3] * (1.0 + perturb)
    res = _relative(t)
    return res if np.ndim(x) else float(res[0])


def density_mass(params: EnsembleParams, tol: float = 1e-10) -> QuadratureResult:
    """Quadrature of ``rho`` over the real line (equals ``N``)."""
    e = 2.0 * params.re_s + 2.0
    return integrate_line(lambda t: rho(params, t, nder=0).rho, e, tol)


def rho_scaled(params: EnsembleParams, x):
    """Scaled density ``N rho(N x)``."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("rho_scaled needs x > 0")
    N = params.N
    return N * rho(params, N * xa, nder=0).rho


# --------------------------------------------------------------------------
# large-N limit


def _check_limit_s(s):
    if isinstance(s, complex):
        if s.imag != 0.0:
            raise DomainError("the limit density needs real s")
        s = s.real
    if not s > 0.5:
        raise DomainError(f"the limit density needs s > 1/2, got {s}")
    return float(s)


def _wronskian_u(s: float, u):
    # J'_{s+1/2} J_{s-1/2} - J_{s+1/2} J'_{s-1/2} via J' = (J_{v-1} - J_{v+1})/2
    J = bessel_ladder_array(s - 1.5, 4, u)
    jm3, jm1, jp1, jp3 = J[:, 0], J[:, 1], J[:, 2], J[:, 3]
    return 0.5 * (jm1 * jm1 + jp1 * jp1 - jp3 * jm1 - jp1 * jm3)


def rho_limit(s: float, x) -> LimitDensityEval:
    """Limit of the scaled density ``N rho_N(N x)`` as ``N -> inf``.

    Parameters
    ----------
    s : float
        Real, ``s > 1/2``.
    x : float or array_like
        Positive points.
    """
    s = _check_limit_s(s)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa <= 0):
        raise DomainError("rho_limit needs x > 0")
    u = 1.0 / xa
    val = 0.5 * u ** 3 * _wronskian_u(s, u)
    if np.ndim(x) == 0:
        return LimitDensityEval(float(xa[0]), float(val[0]))
    return LimitDensityEval(xa.reshape(np.shape(x)), val.reshape(np.shape(x)))


def limit_prefactor(s: float) -> float:
    """``(1/2pi) Gamma[s+1, s+1, s+1/2, s+3/2 / 2s+1, 2s+2] 2^{4s}``; identically 1/4."""
    g = gamma_ratio(GammaRatioSpec((s + 1, s + 1, s + 0.5, s + 1.5), (2 * s + 1, 2 * s + 2)))
    return float((g * 2.0 ** (4 * s) / (2.0 * math.pi)).real)


def _check_strip(y: float, s: float):
    if not 1.0 < y < 2.0 * s + 1.0:
        raise DomainError(f"limit moment needs 1 < y < 2s+1, got y={y}, s={s}")


def limit_moment(y: float, s: float) -> float:
    """``int_0^inf x^y rho_inf(x) dx`` in closed form.

    ``s Gamma((y-1)/2) Gamma((1-y)/2 + s) / (4 sqrt(pi) Gamma(y/2+1) Gamma((1+y)/2+s))``.

    Examples
    --------
    >>> round(limit_moment(2.0, 2.0) * 15, 12)
    2.0
    """
    s = _check_limit_s(s)
    _check_strip(y, s)
    g = gamma_ratio(GammaRatioSpec(((y - 1) / 2, (1 - y) / 2 + s), (y / 2 + 1, (1 + y) / 2 + s)))
    return float((s * g / (4.0 * math.sqrt(math.pi))).real)


def watson_closed_form(mu: float, nu: float, lam: float) -> float:
    """``int_0^inf J_mu(t) J_nu(t) t^{-lam} dt`` in closed form.

    ``Gamma(lam) Gamma((mu+nu-lam+1)/2) / (2^lam Gamma((nu-mu+lam+1)/2)
    Gamma((mu+nu+lam+1)/2) Gamma((mu-nu+lam+1)/2))``, valid for
    ``mu + nu + 1 > lam > 0``.  Denominator gammas go through the
    reciprocal gamma, so their poles give exact zeros.
    """
    if not 0.0 < lam < mu + nu + 1.0:
        raise DomainError("Watson integral needs 0 < lam < mu + nu + 1")
    num = cmath.exp(log_gamma(lam) + log_gamma((mu + nu - lam + 1) / 2)).real
    den = (rgamma((nu - mu + lam + 1) / 2) * rgamma((mu + nu + lam + 1) / 2)
           * rgamma((mu - nu + lam + 1) / 2))
    return float((num * den).real / 2.0 ** lam)


# Hankel-expansion tail of Bessel products beyond U

_U_SPLIT = 40.0
_HANKEL_TERMS = 24


def _hankel_series(nu: float, K: int):
    # coefficients of A_nu(u) = sum_k i^k a_k(nu) u^{-k}
    a = [1.0]
    for k in range(1, K + 1):
        a.append(a[-1] * (4.0 * nu * nu - (2 * k - 1) ** 2) / (8.0 * k))
    return np.array([(1j) ** k * a[k] for k in range(K + 1)])


def _osc_tail(a: float, U: float) -> complex:
    # int_U^inf u^a e^{2iu} du by repeated integration by parts
    total = 0j
    t = 1.0 + 0j
    for m in range(60):
        total += t
        t *= -(a - m) / (2j * U)
        if abs(t) < 1e-18 * abs(total):
            break
    return -cmath.exp(2j * U) * U ** a / 2j * total


def _product_tail(mu: float, nu: float, lam: float, U: float) -> float:
    # int_U^inf u^{-lam} J_mu J_nu du from the Hankel expansions
    K = _HANKEL_TERMS
    am = _hankel_series(mu, K)
    an = _hankel_series(nu, K)
    bo = np.convolve(am, an)[:K + 1]
    bn = np.convolve(am, np.conj(an))[:K + 1]
    po = -(mu + nu) * math.pi / 2 - math.pi / 2
    pn = -(mu - nu) * math.pi / 2
    osc = sum(bo[n] * _osc_tail(-lam - 1.0 - n, U) for n in range(K + 1))
    non = sum(bn[n] * U ** (-lam - n) / (lam + n) for n in range(K + 1))
    return float((cmath.exp(1j * po) * osc + cmath.exp(1j * pn) * non).real / math.pi)


def bessel_product_integral(terms, lam: float, tol: float = 1e-11) -> QuadratureResult:
    """``int_0^inf u^{-lam} sum_j c_j J_{mu_j}(u) J_{nu_j}(u) du``.

    Gauss-Legendre on ``[0, U]`` with a mesh graded toward 0, and the
    tail ``[U, inf)`` integrated analytically from the Hankel expansions
    (power terms exactly, oscillatory terms by integration by parts).

    Parameters
    ----------
    terms : sequence of (c, mu, nu)
        Coefficients and orders; all orders within a common integer
        ladder are evaluated together.
    lam : float
        Power, ``lam > 0``.
    """
    terms = [(float(c), float(m), float(n)) for c, m, n in terms]
    base = min(min(m, n) for _, m, n in terms)
    top = max(max(m, n) for _, m, n in terms)
    count = int(round(top - base)) + 1
    idx = [(c, int(round(m - base)), int(round(n - base))) for c, m, n in terms]
    for (c, m, n), (_, i, j) in zip(terms, idx):
        if abs(m - base - i) > 1e-12 or abs(n - base - j) > 1e-12:
            raise ValueError("orders must differ by integers")

    def g(u):
        J = bessel_ladder_array(base, count, u)
        acc = np.zeros_like(u)
        for c, i, j in idx:
            acc += c * J[:, i] * J[:, j]
        return acc * u ** (-lam)

    U = _U_SPLIT
    pts = [0.0] + [U * 0.25 ** k for k in range(8, 0, -1)] + list(np.linspace(U / 4, U, 16)[1:])
    core = integrate_interval(g, sorted(set(pts)), tol)
    tail = sum(c * _product_tail(m, n, lam, U) for c, m, n in terms)
    return QuadratureResult(core.value + tail, core.error_estimate + 1e-15 * abs(tail),
                            core.nodes_used)


def watson_terms(y: float, s: float):
    """The four Bessel-product integrals of the limit moment.

    Returns a list of ``(mu, nu, lam)`` with ``lam = y - 1``; the limit
    moment equals ``(1/4)(W1 + W2 - W3 - W4)`` in this order.
    """
    lam = y - 1.0
    return [(s - 0.5, s - 0.5, lam), (s + 0.5, s + 0.5, lam),
            (s + 1.5, s - 0.5, lam), (s + 0.5, s - 1.5, lam)]


def watson_integral(mu: float, nu: float, lam: float, tol: float = 1e-11) -> QuadratureResult:
    """Quadrature of ``int_0^inf J_mu J_nu t^{-lam} dt``; see `watson_closed_form`."""
    if not 0.0 < lam < mu + nu + 1.0:
        raise DomainError("Watson integral needs 0 < lam < mu + nu + 1")
    return bessel_product_integral([(1.0, mu, nu)], lam, tol)


def limit_moment_quadrature(y: float, s: float, tol: float = 1e-11) -> QuadratureResult:
    """Quadrature of ``int_0^inf x^y rho_inf(x) dx``.

    Carried out in ``u = 1/x``, where it reads
    ``(1/2) int_0^inf u^{1-y} W(u) du`` with ``W`` the Bessel Wronskian.
    """
    s = _check_limit_s(s)
    _check_strip(y, s)
    coef = (1.0, 1.0, -1.0, -1.0)
    terms = [(0.25 * c, m, n) for c, (m, n, _) in zip(coef, watson_terms(y, s))]
    return bessel_product_integral(terms, y - 1.0, tol)
