"""Weight, monic pseudo-Jacobi polynomials, norms and normalization constants.

The polynomials ``p_m`` (``m < Re(s) + N - 1/2``) are monic and orthogonal
on the real line for the weight

    phi(x) = (1 + x^2)^(-N - Re s) * exp(2 Im(s) arctan x).

They are evaluated through the monic three-term recurrence

    p_{m+1} = (x - b_m) p_m - c_m p_{m-1}

whose coefficients follow from the explicit hypergeometric form: with
``R = Re(s) + N``, ``I = Im(s)`` and ``e_m = -m I / (R - m)`` the
subleading coefficient of ``p_m``,

    b_m = e_m - e_{m+1},
    c_m = 4 m (2R - m) ((R - m)^2 + I^2)
          / ((2R - 2m - 1) (2R - 2m)^2 (2R - 2m + 1)).

The hypergeometric form itself is available as an exact-arithmetic
reference (``method="hypergeometric"``).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import _exact
from .errors import DomainError, ExistenceError
from .kernels import pj_recurrence
from .specfun import log_gamma

__all__ = [
    "EnsembleParams",
    "NormalizationConstants",
    "PolyEval",
    "log_norm_gamma_sq",
    "norm_gamma_sq",
    "normalization_constants",
    "ode_residual",
    "p_eval",
    "p_scaled",
    "recurrence_coefficients",
    "weight",
]


@dataclass(frozen=True)
class EnsembleParams:
    """Parameters ``(s, N)`` of the generalized Cauchy ensemble.

    Parameters
    ----------
    s : complex
        Shape parameter with ``Re(s) > -1/2``.
    N : int
        Matrix size, ``N >= 1``.

    Examples
    --------
    >>> p = EnsembleParams(2 + 1j, 3)
    >>> p.alpha, p.beta
    (2.0, -4.0)
    """

    s: complex
    N: int

    def __post_init__(self):
        s = complex(self.s)
        object.__setattr__(self, "s", s)
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise DomainError(f"N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        if not s.real > -0.5:
            raise DomainError(f"Re(s) must exceed -1/2, got s = {s}")

    @property
    def is_real(self) -> bool:
        return self.s.imag == 0.0

    @property
    def re_s(self) -> float:
        return self.s.real

    @property
    def im_s(self) -> float:
        return self.s.imag

    @property
    def alpha(self) -> float:
        return 2.0 * self.s.imag

    @property
    def beta(self) -> float:
        return 1.0 - self.s.real - self.N

    def conj(self) -> "EnsembleParams":
        return EnsembleParams(self.s.conjugate(), self.N)


class PolyEval(NamedTuple):
    """Value and first two derivatives of a polynomial at ``x``."""

    value: complex
    derivative: complex
    second_derivative: complex


def weight(params: EnsembleParams, x):
    """Orthogonality weight ``(1+x^2)^(-N-Re s) exp(2 Im(s) arctan x)``.

    Examples
    --------
    >>> round(float(weight(EnsembleParams(2.0, 1), 1.0)), 15)
    0.125
    """
    x = np.asarray(x, dtype=float)
    out = np.exp(-(params.N + params.re_s) * np.log1p(x * x)
                 + 2.0 * params.im_s * np.arctan(x))
    return out if out.ndim else float(out)


def recurrence_coefficients(params: EnsembleParams, m_max: int,
                            continued: bool = False):
    """Monic recurrence coefficients ``b_j, c_j`` for ``j = 0, ..., m_max - 1``.

    Parameters
    ----------
    params : EnsembleParams
    m_max : int
        Highest degree that the coefficients must reach.
    continued : bool, optional
        Return the holomorphic continuation in ``s`` of the real-``s``
        coefficients (``b = 0``, ``c`` with ``Re s`` replaced by ``s``).

    Returns
    -------
    b, c : ndarray
        ``c[0]`` is zero by convention.
    """
    n = max(m_max, 1)
    if continued:
        sig = params.s + params.N
        b = np.zeros(n, dtype=complex)
        c = np.zeros(n, dtype=complex)
        for m in range(1, n):
            t = 2.0 * sig - 2.0 * m
            c[m] = 4.0 * m * (2.0 * sig - m) * (sig - m) ** 2 / ((t - 1.0) * t * t * (t + 1.0))
        return b, c
    R = params.re_s + params.N
    I = params.im_s
    b = np.zeros(n)
    c = np.zeros(n)
    if I != 0.0:
        e = [-m * I / (R - m) for m in range(n + 1)]
        for m in range(n):
            b[m] = e[m] - e[m + 1]
    for m in range(1, n):
        t = 2.0 * R - 2.0 * m
        c[m] = 4.0 * m * (2.0 * R - m) * ((R - m) ** 2 + I * I) / ((t - 1.0) * t * t * (t + 1.0))
    return b, c


def _check_degree(params: EnsembleParams, m: int, continued: bool = False):
    if m < 0:
        raise DomainError("polynomial degree must be non-negative")
    if continued:
        # analytic continuation of the explicit formula up to m = N
        if m > params.N:
            raise ExistenceError(f"degree {m} exceeds N = {params.N}")
        if m == params.N and params.re_s == 0.0 and params.im_s != 0.0:
            raise ExistenceError("lower parameter 2Re(s)+2N-2m vanishes")
        return
    if not m < params.re_s + params.N - 0.5:
        raise ExistenceError(
            f"p_{m} does not exist: need m < Re(s) + N - 1/2 = "
            f"{params.re_s + params.N - 0.5:g}")


def p_scaled(params: EnsembleParams, m: int, x, nder: int = 2,
             continued: bool = False, holomorphic: bool = False):
    """Scaled values ``p_j^{(r)}(x) / (1+x^2)^{j/2}`` for ``j = m-1, m``.

    Parameters
    ----------
    params : EnsembleParams
    m : int
        Top degree.
    x : array_like
        Real points.
    nder : int
        Highest derivative order.
    continued : bool
        Allow ``m = N`` beyond the strict existence bound (analytic
        continuation of the explicit formula).
    holomorphic : bool
        Use the holomorphic continuation in ``s`` of the real-``s``
        polynomials.

    Returns
    -------
    ndarray
        Shape ``(2, nder + 1, len(x))``.
    """
    if not holomorphic:
        _check_degree(params, m, continued)
    b, c = recurrence_coefficients(params, m, continued=holomorphic)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return pj_recurrence(x, b, c, m, nder)


def p_eval(params: EnsembleParams, m: int, x, method: str = "recurrence",
           continued: bool = False) -> PolyEval:
    """Monic pseudo-Jacobi polynomial ``p_m`` and two derivatives at ``x``.

    Parameters
    ----------
    params : EnsembleParams
    m : int
        Degree with ``0 <= m < Re(s) + N - 1/2``.
    x : float or array_like
        Real evaluation point(s).
    method : {"recurrence", "hypergeometric"}
        ``"recurrence"`` (default) runs the monic three-term recurrence.
        ``"hypergeometric"`` evaluates
        ``(x-i)^m 2F1(-m, s+N-m; 2Re(s)+2N-2m; 2/(1+ix))`` and its
        term-by-term derivatives exactly in rational arithmetic (scalar
        ``x`` only; slow, intended as a reference).
    continued : bool
        Permit ``m = N`` when ``Re(s) <= 1/2`` (analytic continuation).

    Raises
    ------
    ExistenceError
        If the degree violates the existence bound.

    Examples
    --------
    >>> p_eval(EnsembleParams(2.0, 3), 1, 0.7).value
    0.7
    """
    _check_degree(params, m, continued)
    if method == "hypergeometric":
        return _p_eval_exact(params, m, complex(x))
    if method != "recurrence":
        raise ValueError(f"unknown method {method!r}")
    xa = np.asarray(x, dtype=float)
    arr = p_scaled(params, m, xa.ravel(), nder=2, continued=continued)[1]
    scale = (1.0 + xa.ravel() ** 2) ** (0.5 * m)
    vals = [(arr[r] * scale).reshape(xa.shape) for r in range(3)]
    if xa.ndim == 0:
        vals = [v.item() for v in vals]
    return PolyEval(*vals)


def _p_eval_exact(params: EnsembleParams, m: int, x: complex) -> PolyEval:
    # p_m = (-i)^m sum_j c_j w^(m-j), w = 1 + i x, c_j from the 2F1 terms
    if m == 0:
        return PolyEval(1.0, 0.0, 0.0)
    sig = _exact.gaussian(params.s + params.N)
    sig_f = (Fraction(sig[0], sig[2]), Fraction(sig[1], sig[2]))
    R = Fraction(params.s.real) + params.N
    xf = Fraction(x.real)
    w = (Fraction(1), xf)  # 1 + i x
    coeffs = []
    cj = (Fraction(1), Fraction(0))
    for j in range(m + 1):
        coeffs.append(cj)
        if j == m:
            break
        # c_{j+1} = c_j (-m+j)(sigma-m+j) 2 / ((2R-2m+j)(j+1))
        a = (sig_f[0] - m + j, sig_f[1])
        fac = Fraction(2 * (-m + j)) / ((2 * R - 2 * m + j) * (j + 1))
        cj = _cmul(cj, (a[0] * fac, a[1] * fac))
    out = []
    for r in range(3):
        acc = (Fraction(0), Fraction(0))
        for j, cj in enumerate(coeffs):
            p = m - j
            if p < r:
                continue
            f = Fraction(math.perm(p, r))
            term = _cmul(cj, _cpow(w, p - r))
            acc = (acc[0] + term[0] * f, acc[1] + term[1] * f)
        # d/dx w = i, so each derivative brings a factor i
        acc = _cmul(acc, _ipow(r - m))
        out.append(complex(float(acc[0]), float(acc[1])))
    if params.is_real:
        out = [v.real for v in out]
    return PolyEval(*out)


def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _cpow(a, n):
    out = (Fraction(1), Fraction(0))
    for _ in range(n):
        out = _cmul(out, a)
    return out


def _ipow(n):
    return [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)),
            (Fraction(-1), Fraction(0)), (Fraction(0), Fraction(-1))][n % 4]


def ode_residual(params: EnsembleParams, m: int, x, perturb: float = 0.0):
    """Relative residual of the second-order ODE satisfied by ``p_m``.

    ``-(1+x^2) p'' + 2(-Im s + (Re s + N - 1) x) p' + m(m+1-2Re s-2N) p``,
    divided by the largest of the three terms.

    Parameters
    ----------
    perturb : float
        Relative perturbation applied to ``p''`` (sensitivity control).
    """
    pe = p_eval(params, m, x)
    t1 = -(1.0 + np.square(x)) * pe.second_derivative * (1.0 + perturb)
    t2 = 2.0 * (-params.im_s + (params.re_s + params.N - 1.0) * np.asarray(x)) * pe.derivative
    t3 = m * (m + 1.0 - 2.0 * params.re_s - 2.0 * params.N) * pe.value
    scale = np.maximum(np.maximum(np.abs(t1), np.abs(t2)), np.abs(t3))
    res = np.where(scale > 0, np.abs(t1 + t2 + t3) / np.where(scale > 0, scale, 1.0), 0.0)
    return res if res.ndim else float(res)


def log_norm_gamma_sq(params: EnsembleParams) -> float:
    """Natural log of `norm_gamma_sq`."""
    r = params.re_s
    s = params.s
    N = params.N
    val = (2.0 * r * math.log(2.0) - math.log(math.pi)
           + log_gamma(2 * r + N + 1) + log_gamma(s + 1) + log_gamma(s.conjugate() + 1)
           - log_gamma(N) - log_gamma(2 * r + 1) - log_gamma(2 * r + 2))
    return val.real


def norm_gamma_sq(params: EnsembleParams) -> float:
    """``gamma^2 = 1 / ||p_{N-1}||^2``.

    ``(2^{2Re s}/pi) Gamma[2Re s + N + 1, s + 1, conj(s) + 1 / N, 2Re s + 1, 2Re s + 2]``.

    Examples
    --------
    >>> round(norm_gamma_sq(EnsembleParams(2.0, 1)) * 3 * math.pi / 8, 14)
    1.0
    """
    return math.exp(log_norm_gamma_sq(params))


class NormalizationConstants(NamedTuple):
    """The normalizing constants of the matrix, circle and eigenvalue measures."""

    F: complex
    F_tilde: float
    G: complex
    T: float
    Y: float


def normalization_constants(params: EnsembleParams) -> NormalizationConstants:
    """Normalizing constants ``F, F~, G, T, Y`` evaluated in log space.

    ``T`` normalizes the eigenvalue density on ordered configurations
    (the quotient of ``R^N`` by permutations); the integral over all of
    ``R^N`` is ``N! T``.
    """
    s, N = params.s, params.N
    r = params.re_s
    sb = s.conjugate()
    log2, logpi = math.log(2.0), math.log(math.pi)
    lf = lft = lg = ly = 0j
    lt = N * logpi - N * (N + 2 * r - 1) * log2
    for j in range(1, N + 1):
        lf += j * logpi + log_gamma(2 * s + j) - (2 * s + 2 * j - 2) * log2 - 2 * log_gamma(s + j)
        lft += (j * logpi + log_gamma(2 * r + j) - (2 * r + 2 * j - 2) * log2
                - log_gamma(s + j) - log_gamma(sb + j))
        lg += log_gamma(2 * s + j) + math.lgamma(j + 1) - 2 * log_gamma(s + j)
        ly += log_gamma(2 * r + j) + math.lgamma(j + 1) - log_gamma(s + j) - log_gamma(sb + j)
    lg -= math.lgamma(N + 1)
    ly += math.lgamma(N + 1) + N * math.log(2 * math.pi)
    for j in range(N):
        lt += (math.lgamma(j + 1) + log_gamma(2 * r + N - j)
               - log_gamma(s + N - j) - log_gamma(sb + N - j))
    F = cmath.exp(lf)
    G = cmath.exp(lg)
    if params.is_real:
        F, G = F.real, G.real
    return NormalizationConstants(F, math.exp(lft.real), G, math.exp(lt.real),
                                  math.exp(ly.real))
