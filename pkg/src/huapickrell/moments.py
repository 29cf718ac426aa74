"""Moments ``Q(k; s, N)`` of the generalized Cauchy ensemble.

``Q(k) = E Tr(|H|^{2k+2} + |H|^{2k}) = int |x|^{2k} (1+x^2) rho(x) dx`` on
the strip ``-1/2 < Re k < Re s - 1/2``.  The route of record is the closed
form

    Q(k) = Gamma(k+1/2) Gamma(s-k-1/2) J(k),
    J(k) = i^{N+3} s (2s+N) / (2 sqrt(pi) Gamma(s+N+1/2))
           * S_{N-1}(-i(k+1); 1, s+1/2, 1, s+1/2),

with ``S_n`` a continuous Hahn polynomial.  Density quadrature and the
integration-by-parts form serve as independent routes; the recurrences
in ``k`` and ``t`` and the Ledoux identity are exposed as residuals.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .density import rho
from .errors import (ConditioningWarning, DomainError, PoleError,
                     RecurrencePivotError, StripError)
from .pseudojacobi import EnsembleParams, norm_gamma_sq, p_scaled
from .quadrature import QuadratureResult, integrate_half_line, integrate_line
from .specfun import (HahnSpec, continuous_hahn, is_pole, log_gamma,
                      quarter_turn)

__all__ = [
    "JPolynomial",
    "LedouxData",
    "MomentArgument",
    "UniquenessResult",
    "a_integral",
    "cayley",
    "circular_t",
    "general_recurrence_coefficients",
    "general_recurrence_residual",
    "hahn_prefactor",
    "initial_conditions",
    "inverse_cayley",
    "j_difference_residual",
    "j_polynomial",
    "j_value",
    "j_zeros",
    "large_n_limit",
    "ledoux_data",
    "ledoux_identity_residual",
    "q_byparts",
    "q_hahn",
    "q_quadrature",
    "q_recurrence",
    "recurrence_coefficients_k",
    "recurrence_residual",
    "tilde_coefficients",
    "tilde_q",
    "tilde_q_quadrature",
    "tilde_recurrence_residual",
    "uniqueness_check",
]

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class MomentArgument:
    """Moment exponent ``k`` and its continuous-Hahn variable ``x = -i(k+1)``."""

    k: complex

    def __post_init__(self):
        object.__setattr__(self, "k", complex(self.k))

    @property
    def hahn_x(self) -> complex:
        return -1j * (self.k + 1.0)

    def in_strip(self, params: EnsembleParams) -> bool:
        return -0.5 < self.k.real < params.re_s - 0.5

    def check(self, params: EnsembleParams) -> None:
        """Raise `StripError` unless ``-1/2 < Re k < Re s - 1/2``."""
        if not self.in_strip(params):
            raise StripError(
                f"k = {self.k} outside the strip -1/2 < Re k < {params.re_s - 0.5:g}")


def _real_s(params: EnsembleParams, what: str) -> float:
    if not params.is_real:
        raise DomainError(f"{what} needs real s")
    if not params.re_s > 0:
        raise DomainError(f"{what} needs s > 0")
    return params.re_s


def _squash(z: complex, params: EnsembleParams, k: complex):
    # real s and real k give real moments
    if params.is_real and complex(k).imag == 0.0:
        return complex(z).real
    return complex(z)


# --------------------------------------------------------------------------
# closed form


def hahn_prefactor(params: EnsembleParams, form: str = "reflected") -> complex:
    """Constant multiplying ``S_{N-1}`` in ``J``.

    ``form="reflected"`` (production) is the pole-free
    ``i^{N+3} s (2s+N) / (2 sqrt(pi) Gamma(s+N+1/2))`` with the quarter turn
    applied exactly.  ``form="raw"`` is
    ``i^{1-N} Gamma(1/2-s-N) s(2s+N) / (Gamma(s+3/2) Gamma(-s-1/2) 2 sqrt(pi))``,
    which has removable singularities at half-integer ``s``.
    """
    s = _real_s(params, "hahn_prefactor")
    N = params.N
    if form == "reflected":
        mag = s * (2 * s + N) / (2.0 * _SQRT_PI) * math.exp(-math.lgamma(s + N + 0.5))
        return quarter_turn(mag, N + 3)
    if form == "raw":
        for z in (0.5 - s - N, -s - 0.5):
            if is_pole(z):
                raise PoleError(f"raw prefactor has a gamma pole at {z}")
        g = (math.gamma(0.5 - s - N) / (math.gamma(s + 1.5) * math.gamma(-s - 0.5))
             if s + N < 170 else _raw_log(s, N))
        return quarter_turn(g * s * (2 * s + N) / (2.0 * _SQRT_PI), 1 - N)
    raise ValueError(f"unknown form {form!r}")


def _raw_log(s: float, N: int) -> float:
    lg = log_gamma(0.5 - s - N) - log_gamma(s + 1.5) - log_gamma(-s - 0.5)
    return cmath.exp(lg).real


def _hahn_spec(params: EnsembleParams) -> HahnSpec:
    s = params.re_s
    return HahnSpec(1.0, s + 0.5, 1.0, s + 0.5, params.N - 1)


def _j_hahn(params: EnsembleParams, k: complex) -> complex:
    # prefactor magnitude folded into the log of S_{N-1}; phase i^{N+3} exact
    s, N = params.re_s, params.N
    arg = MomentArgument(k)
    lmag = math.log(s * (2 * s + N) / (2.0 * _SQRT_PI)) - math.lgamma(s + N + 0.5)
    return quarter_turn(continuous_hahn(_hahn_spec(params), arg.hahn_x, lmag), N + 3)


def _gamma_pair(params: EnsembleParams, k: complex) -> complex:
    a, b = k + 0.5, params.s - k - 0.5
    for z in (a, b):
        if is_pole(z):
            raise PoleError(f"Gamma({z}) in the moment prefactor is a pole")
    return cmath.exp(log_gamma(a) + log_gamma(b))


def q_hahn(params: EnsembleParams, k) -> complex:
    """``Q(k; s, N)`` from the continuous-Hahn closed form.

    Meromorphic in ``k``: valid anywhere except the poles of
    ``Gamma(k+1/2) Gamma(s-k-1/2)``, which raise `PoleError`.

    Examples
    --------
    >>> round(q_hahn(EnsembleParams(2.0, 2), 0.0), 12)
    3.2
    """
    _real_s(params, "q_hahn")
    k = complex(k)
    return _squash(_gamma_pair(params, k) * _j_hahn(params, k), params, k)


def initial_conditions(params: EnsembleParams):
    """``(Q(0), Q(1))`` from the closed-form initial conditions of the k-recurrence."""
    s = _real_s(params, "initial_conditions")
    N = params.N
    q0 = 2 * s * N * (2 * s + N) / ((2 * s - 1) * (2 * s + 1))
    q1 = q0 * (2 * N * s + N * N + 2) / ((2 * s + 3) * (2 * s - 3))
    return q0, q1


# --------------------------------------------------------------------------
# integral routes


def q_quadrature(params: EnsembleParams, k, tol: float = 1e-10) -> complex:
    """``int |x|^{2k} (1+x^2) rho(x) dx`` by adaptive quadrature.

    Raises
    ------
    StripError
        If ``k`` is outside the validity strip.
    """
    arg = MomentArgument(k)
    arg.check(params)
    k = arg.k

    def f(x):
        ax = np.abs(x)
        with np.errstate(divide="ignore"):
            pw = np.exp(2.0 * k * np.log(ax)) if k != 0 else 1.0
        return pw * (1.0 + x * x) * rho(params, x, nder=0).rho

    e = 2.0 * params.re_s - 2.0 * k.real
    res = integrate_line(f, e, tol, breakpoints=(0.0,))
    return _squash(res.value, params, k)


def _pn_pnm1_phi(params: EnsembleParams, x):
    # p_N p_{N-1} phi, with the scaling absorbed into the weight
    arr = p_scaled(params, params.N, x, nder=0, continued=True)
    lv = np.log1p(x * x)
    w = np.exp(-(0.5 + params.re_s) * lv + 2.0 * params.im_s * np.arctan(x))
    return np.real(arr[0, 0] * arr[1, 0]) * w


def _poly_coeffs_exact(params: EnsembleParams):
    # monomial coefficients of p_{N-1} and p_N for real s (Fractions)
    R = Fraction(params.re_s) + params.N
    prev, cur = [Fraction(0)], [Fraction(1)]
    for m in range(params.N):
        if m == 0:
            c = Fraction(0)
        else:
            t = 2 * R - 2 * m
            c = 4 * m * (2 * R - m) * (R - m) ** 2 / ((t - 1) * t * t * (t + 1))
        nxt = [Fraction(0)] + cur
        for i, v in enumerate(prev):
            nxt[i] -= c * v
        prev, cur = cur, nxt
    return prev, cur


def _gfrac(z) -> tuple:
    z = complex(z)
    return (Fraction(z.real), Fraction(z.imag))


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gpoch(a, n: int):
    out = (Fraction(1), Fraction(0))
    for j in range(n):
        out = _gmul(out, (a[0] + j, a[1]))
    return out


def _to_complex(z) -> complex:
    return complex(float(z[0]), float(z[1]))


def _byparts_termwise_j(params: EnsembleParams, k: complex) -> complex:
    # J = 4 s gamma^2 / (4 Gamma(s+N)) sum_j c_{2j-1} (k+3/2)_{j-1} (s-k-1/2)_{N-j}
    s = params.re_s
    N = params.N
    pm1, pn = _poly_coeffs_exact(params)
    prod = [Fraction(0)] * (len(pm1) + len(pn) - 1)
    for i, a in enumerate(pm1):
        if a:
            for j, b in enumerate(pn):
                prod[i + j] += a * b
    kk = _gfrac(k)
    a0 = (kk[0] + Fraction(3, 2), kk[1])
    b0 = (Fraction(s) - kk[0] - Fraction(1, 2), -kk[1])
    acc = (Fraction(0), Fraction(0))
    for j in range(1, N + 1):
        c = prod[2 * j - 1]
        if c:
            t = _gmul(_gpoch(a0, j - 1), _gpoch(b0, N - j))
            acc = (acc[0] + c * t[0], acc[1] + c * t[1])
    scale = s * norm_gamma_sq(params) * math.exp(-math.lgamma(s + N))
    return scale * _to_complex(acc)


def q_byparts(params: EnsembleParams, k, method: str = "auto",
              tol: float = 1e-10) -> complex:
    """``Q(k)`` from ``4 s gamma^2 int_0^inf x^{2k+1}/(2k+1) p_N p_{N-1} phi dx``.

    Parameters
    ----------
    method : {"auto", "termwise", "quadrature"}
        ``"termwise"`` expands ``p_N p_{N-1}`` in odd monomials with exact
        rational coefficients and integrates each against the weight in
        closed form (a gamma ratio); it continues analytically in ``k``
        beyond the strip.  ``"quadrature"`` integrates numerically.
        ``"auto"`` is termwise.
    """
    s = _real_s(params, "q_byparts")
    k = complex(k)
    if method in ("auto", "termwise"):
        return _squash(_gamma_pair(params, k) * _byparts_termwise_j(params, k), params, k)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    MomentArgument(k).check(params)

    def f(x):
        return np.exp((2.0 * k + 1.0) * np.log(x)) * _pn_pnm1_phi(params, x)

    res = integrate_half_line(f, 2.0 * s - 2.0 * k.real, tol)
    val = 4.0 * s * norm_gamma_sq(params) * res.value / (2.0 * k + 1.0)
    return _squash(val, params, k)


# --------------------------------------------------------------------------
# recurrence in k


def recurrence_coefficients_k(params: EnsembleParams, k):
    """``(R(k), T(k), S(k))`` of the three-term recurrence in ``k``."""
    s = _real_s(params, "recurrence_coefficients_k")
    N = params.N
    R = (2 * k + 4) * (4 * s * s - (2 * k + 3) ** 2)
    T = -2 * (2 * k + 1) * (2 * N * (N + 2 * s) + (2 * k + 2) ** 2)
    S = -(2 * k + 1) * 2 * k * (2 * k - 1)
    return R, T, S


def recurrence_residual(params: EnsembleParams, k, perturb: float = 0.0) -> float:
    """Relative residual of ``R Q(k+1) + T Q(k) + S Q(k-1)`` on `q_hahn` values."""
    k = complex(k)
    R, T, S = recurrence_coefficients_k(params, k)
    terms = [R * q_hahn(params, k + 1), T * (1.0 + perturb) * q_hahn(params, k),
             S * q_hahn(params, k - 1)]
    return _rel(terms)


def q_recurrence(params: EnsembleParams, k0=0, n_steps: int = 1,
                 seeds: Sequence[complex] | None = None) -> list:
    """Forward propagation ``[Q(k0), Q(k0+1), ..., Q(k0+n_steps)]``.

    Parameters
    ----------
    k0 : complex
        Starting exponent.
    n_steps : int
        Number of unit steps beyond ``k0``.
    seeds : pair, optional
        ``(Q(k0), Q(k0+1))``.  Defaults to the closed-form initial
        conditions when ``k0 = 0`` and to `q_hahn` otherwise.

    Raises
    ------
    RecurrencePivotError
        If ``R(k)`` vanishes on the orbit.
    """
    _real_s(params, "q_recurrence")
    k0 = complex(k0)
    if seeds is None:
        if k0 == 0:
            seeds = initial_conditions(params)
        else:
            seeds = (q_hahn(params, k0), q_hahn(params, k0 + 1))
    out = [seeds[0], seeds[1]][:n_steps + 1]
    for j in range(1, n_steps):
        k = k0 + j
        R, T, S = recurrence_coefficients_k(params, k)
        if abs(R) <= 1e-14 * max(abs(T), abs(S), 1.0):
            raise RecurrencePivotError(f"R(k) vanishes at k = {k}")
        out.append(-(T * out[j] + S * out[j - 1]) / R)
    return [_squash(v, params, k0) for v in out]


# --------------------------------------------------------------------------
# J(k)


def j_value(params: EnsembleParams, k, route: str = "hahn", tol: float = 1e-10) -> complex:
    """``J(k) = Q(k) / (Gamma(k+1/2) Gamma(s-k-1/2))``.

    Parameters
    ----------
    route : {"hahn", "byparts", "quadrature"}
        ``"hahn"`` and ``"byparts"`` are gamma-division free and entire in
        ``k``; ``"quadrature"`` divides a strip integral.

    Examples
    --------
    >>> p = EnsembleParams(2.0, 1)
    >>> abs(j_value(p, -0.5) - 2.0 / (math.sqrt(math.pi) * math.gamma(2.5))) < 1e-15
    True
    """
    _real_s(params, "j_value")
    k = complex(k)
    if route == "hahn":
        v = _j_hahn(params, k)
    elif route == "byparts":
        v = _byparts_termwise_j(params, k)
    elif route == "quadrature":
        v = q_quadrature(params, k, tol) / _gamma_pair(params, k)
    else:
        raise ValueError(f"unknown route {route!r}")
    return _squash(v, params, k)


def j_difference_residual(params: EnsembleParams, k, perturb: float = 0.0) -> float:
    """Relative residual of the difference equation for ``J``.

    ``(2k+4)(2s+2k+3) J(k+1) + 2k(2k+1-2s) J(k-1) - 2(2N(N+2s) + (2k+2)^2) J(k)``.

    Parameters
    ----------
    perturb : float
        Relative perturbation of ``N(N+2s)``.
    """
    s = _real_s(params, "j_difference_residual")
    N = params.N
    k = complex(k)
    nn = N * (N + 2 * s) * (1.0 + perturb)
    terms = [(2 * k + 4) * (2 * s + 2 * k + 3) * _j_hahn(params, k + 1),
             2 * k * (2 * k + 1 - 2 * s) * _j_hahn(params, k - 1),
             -2 * (2 * nn + (2 * k + 2) ** 2) * _j_hahn(params, k)]
    return _rel(terms)


def _rel(terms) -> float:
    scale = max(abs(t) for t in terms)
    return abs(sum(terms)) / scale if scale > 0 else 0.0


@dataclass(frozen=True)
class JPolynomial:
    """``J(k; s, N)`` as a polynomial of degree ``N - 1`` in ``k``.

    Attributes
    ----------
    degree : int
    coefficients : tuple of complex
        Monomial coefficients in ``k``, lowest order first.
    route : str
        ``"exact"`` or ``"interpolate"``.
    shifted : tuple of Fraction or None
        For the exact route, rational coefficients in ``z = k + 1``; the
        polynomial is ``scale * sum shifted[m] z^m``.
    scale : float
    """

    degree: int
    coefficients: tuple
    route: str
    shifted: tuple | None = field(default=None, repr=False)
    scale: float = 1.0

    def __call__(self, k):
        k = np.asarray(k, dtype=complex)
        if self.shifted is not None:
            z = k + 1.0
            acc = np.zeros_like(z)
            for a in reversed(self.shifted):
                acc = acc * z + float(a)
            return self.scale * acc
        acc = np.zeros_like(k)
        for a in reversed(self.coefficients):
            acc = acc * k + a
        return acc


def _shifted_exact(params: EnsembleParams):
    # J(k) = K sum_m a_m (k+1)^m with exact rational a_m
    s = Fraction(params.re_s)
    N = params.N
    n = N - 1
    coeffs = [Fraction(0)] * (n + 1)
    t = Fraction(1)
    rising = [Fraction(1)]  # (z+1)_j in powers of z
    for j in range(n + 1):
        for m, c in enumerate(rising):
            coeffs[m] += t * c
        if j == n:
            break
        t = t * (-n + j) * (n + 2 * s + 2 + j) / ((2 + j) * (s + Fraction(3, 2) + j) * (j + 1))
        # multiply rising factorial by (z + j + 1)
        nxt = [Fraction(0)] * (len(rising) + 1)
        for m, c in enumerate(rising):
            nxt[m] += c * (j + 1)
            nxt[m + 1] += c
        rising = nxt
    sv = params.re_s
    K = (-1) ** (N + 1) * N * sv * (2 * sv + N) / (2.0 * _SQRT_PI) * math.exp(-math.lgamma(sv + 1.5))
    return coeffs, K


def j_polynomial(params: EnsembleParams, method: str = "exact") -> JPolynomial:
    """Coefficients of ``J(k)`` in the monomial basis of ``k``.

    Parameters
    ----------
    method : {"exact", "interpolate"}
        ``"exact"`` expands the terminating series in rising factorials of
        ``k + 2`` in rational arithmetic.  ``"interpolate"`` fits the
        Hahn-route values at ``N`` Chebyshev points of
        ``[-1/4, s - 3/4]`` by Newton divided differences; it warns with
        `ConditioningWarning` for ``N > 60``.
    """
    _real_s(params, "j_polynomial")
    N = params.N
    n = N - 1
    if method == "exact":
        shifted, K = _shifted_exact(params)
        # (k+1)^m expanded binomially, still exact
        mono = [Fraction(0)] * (n + 1)
        for m, a in enumerate(shifted):
            if a:
                for i in range(m + 1):
                    mono[i] += a * math.comb(m, i)
        coeffs = tuple(complex(K * float(c)) for c in mono)
        return JPolynomial(n, coeffs, "exact", tuple(shifted), K)
    if method != "interpolate":
        raise ValueError(f"unknown method {method!r}")
    if N > 60:
        warnings.warn("monomial interpolation beyond N = 60 is ill-conditioned",
                      ConditioningWarning, stacklevel=2)
    lo, hi = -0.25, params.re_s - 0.75
    j = np.arange(N)
    nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos((2 * j + 1) * math.pi / (2 * N))
    vals = [complex(j_value(params, x)) for x in nodes]
    # Newton divided differences, then Horner-style conversion to monomials
    dd = list(vals)
    for lev in range(1, N):
        for i in range(N - 1, lev - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - lev])
    poly = np.zeros(N, dtype=complex)
    poly[0] = dd[N - 1]
    deg = 0
    for i in range(N - 2, -1, -1):
        # poly = poly * (k - nodes[i]) + dd[i]
        new = np.zeros(N, dtype=complex)
        new[1:deg + 2] = poly[:deg + 1]
        new[:deg + 1] -= nodes[i] * poly[:deg + 1]
        new[0] += dd[i]
        poly = new
        deg += 1
    return JPolynomial(n, tuple(complex(c) for c in poly), "interpolate")


def _eval_exact(coeffs, z: complex):
    # exact Horner value and derivative of sum coeffs[m] z^m at a float point
    zz = _gfrac(z)
    p = (Fraction(0), Fraction(0))
    dp = (Fraction(0), Fraction(0))
    for a in reversed(coeffs):
        dp = _gmul(dp, zz)
        dp = (dp[0] + p[0], dp[1] + p[1])
        p = _gmul(p, zz)
        p = (p[0] + a, p[1])
    return _to_complex(p), _to_complex(dp)


def j_zeros(params: EnsembleParams) -> list:
    """The ``N - 1`` zeros of ``J`` in ``k``, sorted by imaginary part.

    Companion-matrix eigenvalues of the exact polynomial in ``z = k + 1``,
    polished by Newton steps with exact evaluation.  For ``N > 60`` the
    zeros are located by sign changes of ``J`` along ``Re k = -1`` and
    bisection; all ``N - 1`` must be found there or `DomainError` is raised.
    """
    _real_s(params, "j_zeros")
    n = params.N - 1
    if n == 0:
        return []
    shifted, _ = _shifted_exact(params)
    if params.N > 60:
        return _zeros_on_line(shifted, n)
    lead = shifted[-1]
    monic = np.array([float(a / lead) for a in reversed(shifted)])
    roots = np.roots(monic)
    out = []
    for z in roots:
        z = complex(z)
        for _ in range(50):
            p, dp = _eval_exact(shifted, z)
            if dp == 0:
                break
            step = p / dp
            z -= step
            if abs(step) <= 4e-16 * max(abs(z), 1.0):
                break
        out.append(z - 1.0)
    out.sort(key=lambda r: (r.imag, r.real))
    return out


def _zeros_on_line(shifted, n: int) -> list:
    # J(-1 + iy) = i^n r(y) with r real; bracket sign changes of r on y >= 0
    coeffs = [a * (1 if ((m - n) // 2) % 2 == 0 else -1) if (m - n) % 2 == 0 else Fraction(0)
              for m, a in enumerate(shifted)]

    def r(y: float) -> Fraction:
        yy = Fraction(y)
        acc = Fraction(0)
        for a in reversed(coeffs):
            acc = acc * yy + a
        return acc

    # Fujiwara bound on the moduli of the roots
    lead = abs(coeffs[-1])
    bound = 2.0 * max(float(abs(coeffs[n - i]) / lead) ** (1.0 / i) for i in range(1, n + 1))
    want = n // 2
    grid = 64
    while True:
        ys = np.linspace(0.0, bound, grid + 1)[1:]
        vals = [r(y) for y in ys]
        brackets = [(ys[i], ys[i + 1]) for i in range(len(ys) - 1) if vals[i] * vals[i + 1] < 0]
        if len(brackets) == want:
            break
        if grid > 1 << 16:
            raise DomainError("could not isolate all zeros on the line Re k = -1")
        grid *= 4
    pos = []
    for a, b in brackets:
        fa = r(a)
        for _ in range(200):
            m = 0.5 * (a + b)
            if m in (a, b):
                break
            fm = r(m)
            if fm == 0:
                a = b = m
                break
            if (fm < 0) == (fa < 0):
                a, fa = m, fm
            else:
                b = m
        pos.append(0.5 * (a + b))
    out = [complex(-1.0, -y) for y in reversed(pos)]
    if n % 2:
        out.append(complex(-1.0, 0.0))
    out += [complex(-1.0, y) for y in pos]
    return out


@dataclass(frozen=True)
class UniquenessResult:
    """Singular-value summary of the polynomial difference-equation system.

    ``bool(result)`` is true when the solution space is one-dimensional.

    Attributes
    ----------
    degree : int
        Degree of the trial space.
    singular_values : tuple of float
        Of the column-scaled system, largest first.
    null_dim : int
        Number of negligible singular values, or -1 when the gap to the
        next one is too small to decide.
    null_vector : tuple of float
        Coefficients (scaled basis) of the best solution.
    leading_residual : float
        Relative residual of the best solution whose top coefficient is
        fixed to 1; zero exactly when a solution of full degree exists.
    """

    degree: int
    singular_values: tuple
    null_dim: int
    null_vector: tuple
    leading_residual: float

    def __bool__(self) -> bool:
        return self.null_dim == 1


def uniqueness_check(params: EnsembleParams, degree: int | None = None,
                     zero_tol: float = 1e-10, gap: float = 1e-6,
                     perturb: float = 0.0) -> UniquenessResult:
    """Dimension of the polynomial solution space of the J difference equation.

    Polynomials of degree at most ``degree`` (default ``N - 1``) in the
    scaled basis ``((k - c)/h)^i`` are substituted into the equation at
    ``degree + 3`` Chebyshev points.  Each column is scaled by the size of
    its three contributions, so exact cancellation shows up as a tiny
    column.  A singular value counts as zero below ``zero_tol`` times the
    largest; the next one must exceed ``gap`` times the largest for the
    count to be trusted.  ``perturb`` scales ``N(N+2s)``, which leaves
    no polynomial solution.
    """
    s = _real_s(params, "uniqueness_check")
    N = params.N
    d = N - 1 if degree is None else degree
    c, h = 0.5 * s, max(2.0, float(d + 2))
    npts = d + 3
    j = np.arange(npts)
    xs = c + h * np.cos((2 * j + 1) * math.pi / (2 * npts))

    def basis(x):
        return ((x - c) / h)[:, None] ** np.arange(d + 1)[None, :]

    T1 = ((2 * xs + 4) * (2 * s + 2 * xs + 3))[:, None] * basis(xs + 1)
    T2 = (2 * xs * (2 * xs + 1 - 2 * s))[:, None] * basis(xs - 1)
    nn = N * (N + 2 * s) * (1.0 + perturb)
    T3 = -(2 * (2 * nn + (2 * xs + 2) ** 2))[:, None] * basis(xs)
    A = T1 + T2 + T3
    scale = np.linalg.norm(np.abs(T1) + np.abs(T2) + np.abs(T3), axis=0)
    As = A / scale
    _, sv, vt = np.linalg.svd(As, full_matrices=False)
    top = max(sv[0], 1.0)
    null = int(np.sum(sv <= zero_tol * top))
    if null < sv.size and null and sv[-null - 1] <= gap * top:
        null = -1
    vec = vt[-1] / scale
    rhs = -As[:, d]
    if d > 0:
        sol, *_ = np.linalg.lstsq(As[:, :d], rhs, rcond=None)
        lead = float(np.linalg.norm(As[:, :d] @ sol - rhs) / np.linalg.norm(rhs))
    else:
        lead = float(np.linalg.norm(rhs))
    return UniquenessResult(d, tuple(float(v) for v in sv), null,
                            tuple(float(v) for v in vec), lead)


# --------------------------------------------------------------------------
# a(t), its recurrence, and the odd-moment extension


def a_integral(params: EnsembleParams, t: float, tol: float = 1e-12) -> float:
    """``a(t) = int_0^inf x^t p_N p_{N-1} phi dx`` for ``-1 < t < 2 Re s``."""
    if not -1.0 < t < 2.0 * params.re_s:
        raise DomainError(f"a(t) diverges: need -1 < t < 2Re(s) = {2 * params.re_s:g}")

    def f(x):
        return np.exp(t * np.log(x)) * _pn_pnm1_phi(params, x)

    grade = float(t) != math.floor(t)
    return integrate_half_line(f, 1.0 + 2.0 * params.re_s - t, tol, grade_origin=grade).value


def general_recurrence_coefficients(params: EnsembleParams, t: float):
    """``(C1, C2, C3, C4, C5)`` of the five-term recurrence for ``a(t)``."""
    R, I, N = params.re_s, params.im_s, params.N
    C1 = 4 * R * R * (t + 1) * (t - 1) - 6 * t * (t - 1) ** 2 - t * (t - 1) * (t - 2) * (t - 3)
    C2 = 4 * I * (-R - N) * t * (2 * t - 1)
    C3 = t * (t - 1) * (-2 * (t - 1) ** 2 + 4 * I * I + 4 * N * (-N - 2 * R))
    C5 = -t * (t - 1) * (t - 2) * (t - 3)
    return C1, C2, C3, 0.0, C5


def general_recurrence_residual(params: EnsembleParams, t: float, perturb: float = 0.0,
                                tol: float = 1e-12) -> float:
    """Relative residual of ``sum_i C_i(t) a(t - i + 1)`` (``3 < t < 2 Re s``).

    Parameters
    ----------
    perturb : float
        Relative perturbation of ``C3``.
    """
    if not 3.0 < t < 2.0 * params.re_s:
        raise DomainError("the five-term recurrence needs 3 < t < 2Re(s)")
    C = list(general_recurrence_coefficients(params, t))
    C[2] *= 1.0 + perturb
    terms = [C[0] * a_integral(params, t, tol), C[2] * a_integral(params, t - 2, tol),
             C[4] * a_integral(params, t - 4, tol)]
    if C[1] != 0.0:
        terms.append(C[1] * a_integral(params, t - 1, tol))
    return _rel(terms)


def tilde_q(params: EnsembleParams, m: int, tol: float = 1e-12) -> float:
    """``E Tr(H^{m+2} + H^m)`` from ``a(m+1; s)`` and ``a(m+1; conj s)``.

    ``2 Re(s) gamma^2 / (m+1) [a(m+1; s) + (-1)^m a(m+1; conj s)]`` for
    integer ``0 <= m < 2 Re(s) - 1``.
    """
    m = int(m)
    if not 0 <= m < 2.0 * params.re_s - 1.0:
        raise DomainError("tilde_q needs 0 <= m < 2Re(s) - 1")
    a1 = a_integral(params, m + 1, tol)
    a2 = a_integral(params.conj(), m + 1, tol)
    return 2.0 * params.re_s * norm_gamma_sq(params) / (m + 1) * (a1 + (-1) ** m * a2)


def tilde_q_quadrature(params: EnsembleParams, m: int, tol: float = 1e-11) -> float:
    """``int x^m (1+x^2) rho(x) dx`` by direct density quadrature."""
    m = int(m)
    if not 0 <= m < 2.0 * params.re_s - 1.0:
        raise DomainError("tilde_q needs 0 <= m < 2Re(s) - 1")
    res = integrate_line(lambda x: x ** m * (1.0 + x * x) * rho(params, x, nder=0).rho,
                         2.0 * params.re_s - m, tol)
    return float(np.real(res.value))


def tilde_coefficients(params: EnsembleParams, m: int):
    """``(D1, D2, D3, D4)`` of the recurrence for ``E Tr(H^{m+2} + H^m)``."""
    R, I, N = params.re_s, params.im_s, params.N
    D1 = (m + 2) * (4 * R * R - (m + 1) ** 2)
    D2 = 4 * I * (-R - N) * (2 * m + 1)
    D3 = (m - 1) * (-2 * m * m + 4 * I * I + 4 * N * (-N - 2 * R))
    D4 = -(m - 1) * (m - 2) * (m - 3)
    return D1, D2, D3, D4


def tilde_recurrence_residual(params: EnsembleParams, m: int, perturb: float = 0.0,
                              tol: float = 1e-12) -> float:
    """Relative residual of ``D1 Q~(m) + D2 Q~(m-1) + D3 Q~(m-2) + D4 Q~(m-4)``.

    Needs ``4 <= m < 2 Re(s) - 1``.  ``perturb`` scales ``D3``.
    """
    if not 4 <= m < 2.0 * params.re_s - 1.0:
        raise DomainError("the tilde recurrence needs 4 <= m < 2Re(s) - 1")
    D1, D2, D3, D4 = tilde_coefficients(params, m)
    terms = [D1 * tilde_q(params, m, tol), D3 * (1.0 + perturb) * tilde_q(params, m - 2, tol),
             D4 * tilde_q(params, m - 4, tol)]
    if D2 != 0.0:
        terms.append(D2 * tilde_q(params, m - 1, tol))
    return _rel(terms)


# --------------------------------------------------------------------------
# Ledoux identity


class LedouxData(NamedTuple):
    """Scalars and polynomial coefficients (ascending powers of x) of the identity."""

    alpha: float
    beta: float
    tau_N: float
    tau_Nm1: float
    d_N: float
    d_Nm1: float
    D_N: tuple
    D_Nm1: tuple
    u: float
    v: float
    A: tuple
    B: tuple
    M: tuple


def ledoux_data(params: EnsembleParams, perturb: float = 0.0) -> LedouxData:
    """Assemble the operator data; ``perturb`` scales ``u``."""
    P = np.polynomial.polynomial
    N = params.N
    al, be = params.alpha, params.beta
    tN = -N * (N + 2 * be - 1)
    tN1 = -(N - 1) * (N + 2 * be - 2)
    dN = 2 * be - 2 + tN
    dN1 = 2 * be - 2 + tN1
    DN = (0.0, 2 * tN)
    DN1 = (0.0, 2 * tN1)
    u = 0.5 * (tN - tN1) * (dN - dN1 + tN - tN1) * (1.0 + perturb)
    v = 0.5 * (dN + dN1 - tN - tN1)
    A = np.array([-al, -2 * be])
    Ap = P.polyder(A)
    B = np.array([1.0, 0.0, 1.0])
    Bp = P.polyder(B)
    Bpp = P.polyder(B, 2)
    M4 = -P.polymul(B, B)
    M3 = -3 * P.polymul(B, Bp)
    M2 = P.polysub(P.polymul(A, A), P.polymul(Ap, B))
    M2 = P.polyadd(M2, 2 * P.polymul(A, Bp))
    M2 = P.polyadd(M2, (v - 2 * (tN + tN1)) * B)
    M2 = P.polysub(M2, 2 * P.polymul(B, Bpp))
    M1 = P.polysub(P.polysub(-v * A, np.array(DN)), np.array(DN1))
    M0 = np.array([-u])
    M = tuple(tuple(float(c) for c in m) for m in (M0, M1, M2, M3, M4))
    return LedouxData(al, be, tN, tN1, dN, dN1, DN, DN1, u, v,
                      tuple(A), tuple(B), M)


def ledoux_identity_residual(params: EnsembleParams, t: float, perturb: float = 0.0,
                             tol: float = 1e-12) -> float:
    """Relative residual of ``sum_i G(M_i theta^{(i)})`` with ``theta = x^t``.

    ``G(f) = int_0^inf f p_N p_{N-1} phi dx``; needs ``Re s > 5/2`` and
    ``3 < t < 2 Re(s) - 2``.
    """
    if not params.re_s > 2.5:
        raise DomainError("the Ledoux identity needs Re(s) > 5/2")
    if not 3.0 < t < 2.0 * params.re_s - 2.0:
        raise DomainError("the Ledoux identity needs 3 < t < 2Re(s) - 2")
    data = ledoux_data(params, perturb)
    falling = [1.0, t, t * (t - 1), t * (t - 1) * (t - 2), t * (t - 1) * (t - 2) * (t - 3)]
    G = []
    for i, Mi in enumerate(data.M):
        coef = np.array(Mi) * falling[i]
        e = 1.0 + 2.0 * params.re_s - t - (len(Mi) - 1) + i

        def f(x, coef=coef, i=i):
            return np.polynomial.polynomial.polyval(x, coef) * np.exp((t - i) * np.log(x)) \
                * _pn_pnm1_phi(params, x)

        G.append(integrate_half_line(f, e, tol).value)
    return _rel(G)


# --------------------------------------------------------------------------
# large N and the circle


def large_n_limit(k: float, s: float) -> float:
    """``lim Q(k; s, N) / N^{2k+2}``.

    ``s Gamma(k+1/2) Gamma(s-k-1/2) / (2 sqrt(pi) Gamma(k+2) Gamma(k+s+3/2))``
    for ``s > 1/2`` and ``0 <= k < s - 1/2``.

    Examples
    --------
    >>> round(large_n_limit(0.0, 2.0) * 15, 12)
    4.0
    """
    if not s > 0.5:
        raise DomainError("large_n_limit needs s > 1/2")
    if not 0.0 <= k < s - 0.5:
        raise DomainError("large_n_limit needs 0 <= k < s - 1/2")
    lg = (math.lgamma(k + 0.5) + math.lgamma(s - k - 0.5) - math.lgamma(k + 2)
          - math.lgamma(k + s + 1.5))
    return s * math.exp(lg) / (2.0 * _SQRT_PI)


def cayley(x):
    """Map the real line to the unit circle, ``x -> (i - x)/(i + x)``."""
    x = np.asarray(x, dtype=float)
    out = (1j - x) / (1j + x)
    return out if out.ndim else complex(out)


def inverse_cayley(u):
    """Inverse of `cayley`, ``U -> i (1 - U)/(1 + U)``, real part returned."""
    u = np.asarray(u, dtype=complex)
    out = np.real(1j * (1.0 - u) / (1.0 + u))
    return out if out.ndim else float(out)


def circular_t(params: EnsembleParams, k) -> complex:
    """Moment ``E sum |tan(theta_j/2)|^{2k} sec^2(theta_j/2)`` of the circle ensemble.

    Equal to ``Q(k; s, N)`` through the Cayley transform; computed by
    `q_hahn`.
    """
    MomentArgument(k).check(params)
    return q_hahn(params, k)
