"""Pure-Python reference implementations of the hot kernels.

The compiled module ``_ckernels`` implements the same algorithms with the
same operation order, so both produce identical results up to libm.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["pj_recurrence", "bessel_ladder", "bessel_ladder_array", "mh_run"]

_EPS_TERM = 1e-17


def pj_recurrence(x, b, c, m: int, nder: int):
    """Scaled monic recurrence values of p_{m-1} and p_m with derivatives.

    Runs ``p_{j+1} = (x - b_j) p_j - c_j p_{j-1}`` on the scaled quantities
    ``p_j^{(r)} / (1 + x^2)^{j/2}`` so that nothing overflows for large x.

    Parameters
    ----------
    x : ndarray
        Real evaluation points, 1-D.
    b, c : ndarray
        Recurrence coefficients; ``c[0]`` is ignored.  May be complex.
    m : int
        Top degree, ``m >= 0``.
    nder : int
        Highest derivative order returned.

    Returns
    -------
    ndarray
        Shape ``(2, nder + 1, len(x))``: index 0 holds degree ``m - 1``
        (zeros when ``m = 0``), index 1 holds degree ``m``.
    """
    x = np.asarray(x, dtype=float)
    dtype = np.result_type(x, np.asarray(b), np.asarray(c))
    sig = np.sqrt(1.0 + x * x)
    inv = 1.0 / sig
    inv2 = inv * inv
    prev = np.zeros((nder + 1, x.size), dtype=dtype)
    cur = np.zeros((nder + 1, x.size), dtype=dtype)
    cur[0] = 1.0
    for j in range(m):
        xb = (x - b[j]) * inv
        cj = c[j] * inv2 if j > 0 else 0.0
        nxt = np.empty_like(cur)
        for r in range(nder + 1):
            v = xb * cur[r] - cj * prev[r]
            if r > 0:
                v = v + r * cur[r - 1] * inv
            nxt[r] = v
        prev, cur = cur, nxt
    return np.stack([prev, cur])


# --------------------------------------------------------------------------
# Bessel J of real order


def _series(nu: float, x: float) -> float:
    # ascending series; caller guarantees bounded cancellation
    q = -0.25 * x * x
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= q / (k * (nu + k))
        total += term
        if abs(term) <= _EPS_TERM * abs(total):
            break
    if nu + 1.0 <= 0.0 and nu == math.floor(nu):
        return 0.0
    lg = math.lgamma(nu + 1.0)
    sgn = 1.0
    if nu + 1.0 < 0.0 and math.floor(nu + 1.0) % 2 != 0:
        sgn = -1.0
    return sgn * math.exp(nu * math.log(0.5 * x) - lg) * total


def _hankel(mu: float, x: float) -> float:
    mu4 = 4.0 * mu * mu
    p = 1.0
    q = 0.0
    a = 1.0
    k = 0
    last = 1.0
    while k < 60:
        k += 1
        a *= (mu4 - (2 * k - 1) ** 2) / (8.0 * k * x)
        t = abs(a)
        if t > last:
            break
        if k % 4 == 1:
            q += a
        elif k % 4 == 2:
            p -= a
        elif k % 4 == 3:
            q -= a
        else:
            p += a
        if t < _EPS_TERM:
            break
        last = t
    phase = (0.5 * mu + 0.25) * math.pi
    cx = math.cos(x)
    sx = math.sin(x)
    cp = math.cos(phase)
    sp = math.sin(phase)
    cchi = cx * cp + sx * sp
    schi = sx * cp - cx * sp
    return math.sqrt(2.0 / (math.pi * x)) * (p * cchi - q * schi)


def _miller_down(alpha: float, top: int, x: float, start: int):
    # unnormalized backward recurrence; returns g[0..start] (orders alpha+n)
    g = [0.0] * (start + 2)
    g[start] = 1e-280
    for n in range(start, 0, -1):
        g[n - 1] = 2.0 * (alpha + n) / x * g[n] - g[n + 1]
        if abs(g[n - 1]) > 1e250:
            for i in range(n - 1, start + 1):
                g[i] *= 1e-250
    big = 0.0
    for v in g:
        if abs(v) > big:
            big = abs(v)
    for i in range(start + 2):
        g[i] /= big
    return g


def _ladder_nonneg(nu0: float, count: int, x: float) -> list:
    if x <= 2.0 or x * x <= 8.0 * (nu0 + 1.0):
        return [_series(nu0 + j, x) for j in range(count)]
    n0 = int(math.floor(nu0))
    alpha = nu0 - n0
    top = n0 + count - 1
    if x >= 25.0:
        n1 = max(1, min(top, int(math.floor(x - alpha))))
        f = [0.0] * (max(top, n1) + 1)
        f[0] = _hankel(alpha, x)
        f[1] = _hankel(alpha + 1.0, x)
        for n in range(1, n1):
            f[n + 1] = 2.0 * (alpha + n) / x * f[n] - f[n - 1]
        if top > n1:
            start = top + 20 + int(10.0 * x ** (1.0 / 3.0))
            g = _miller_down(alpha, top, x, start)
            num = f[n1] * g[n1] + f[n1 - 1] * g[n1 - 1]
            den = g[n1] * g[n1] + g[n1 - 1] * g[n1 - 1]
            scale = num / den
            for n in range(n1 + 1, top + 1):
                f[n] = g[n] * scale
        return f[n0:n0 + count]
    start = int(max(top, x)) + 30
    if start % 2:
        start += 1
    g = _miller_down(alpha, top, x, start)
    # normalization: (x/2)^alpha = sum_k (alpha+2k) Gamma(alpha+k)/k! J_{alpha+2k}
    total = math.gamma(alpha + 1.0) * g[0]
    gk = math.gamma(alpha + 1.0)  # Gamma(alpha+k)/k! at k = 1
    k = 1
    while 2 * k <= start:
        total += (alpha + 2 * k) * gk * g[2 * k]
        gk *= (alpha + k) / (k + 1)
        k += 1
    scale = (0.5 * x) ** alpha / total
    return [g[n] * scale for n in range(n0, n0 + count)]


def bessel_ladder(nu0: float, count: int, x: float) -> list:
    """Values ``J_{nu0 + j}(x)`` for ``j = 0, ..., count - 1``.

    Negative base orders are reached by downward recurrence from the first
    non-negative order of the ladder.
    """
    if nu0 >= 0.0:
        return _ladder_nonneg(nu0, count, x)
    shift = int(math.ceil(-nu0))
    base = nu0 + shift
    vals = _ladder_nonneg(base, count + shift + 1, x)
    for i in range(shift):
        nu = base - i
        vals.insert(0, 2.0 * nu / x * vals[0] - vals[1])
    return vals[:count]


# --------------------------------------------------------------------------
# Metropolis-within-Gibbs single-site sweep


def mh_run(x, a: float, b: float, scale: float, props, logu,
           step0: int, thin: int, out, kept0: int, logd: float):
    """Advance the chain through ``len(props)`` single-site updates.

    The site updated at global step ``t`` is ``t mod N``.  The log target
    is ``2 sum_{j<k} log|x_j - x_k| - a sum log(1+x^2) + b sum atan(x)``.

    Parameters
    ----------
    x : ndarray
        Current configuration, updated in place.
    a, b : float
        ``Re(s) + N`` and ``2 Im(s)``.
    scale : float
        Proposal scale multiplying the standard Cauchy draws ``props``.
    props, logu : ndarray
        Standard Cauchy increments and log-uniforms, one per step.
    step0 : int
        Global index of the first step in this block.
    thin : int
        Snapshot stride in steps, or 0 for no snapshots.
    out : ndarray
        Snapshot buffer of shape ``(n_kept, N)``.
    kept0 : int
        Row of ``out`` to fill next.
    logd : float
        Running unnormalized log density of ``x``.

    Returns
    -------
    tuple
        ``(accepted, kept, logd)``.
    """
    n = x.shape[0]
    acc = 0
    kept = kept0
    for t in range(props.shape[0]):
        g = step0 + t
        i = g % n
        xi = x[i]
        y = xi + scale * props[t]
        d = -a * (math.log1p(y * y) - math.log1p(xi * xi)) \
            + b * (math.atan(y) - math.atan(xi))
        ok = True
        for j in range(n):
            if j != i:
                xj = x[j]
                if y == xj:
                    ok = False
                    break
                d += 2.0 * (math.log(abs(y - xj)) - math.log(abs(xi - xj)))
        if ok and logu[t] < d:
            x[i] = y
            acc += 1
            logd += d
        if thin > 0 and (g + 1) % thin == 0:
            for j in range(n):
                out[kept, j] = x[j]
            kept += 1
    return acc, kept, logd


def bessel_ladder_array(nu0: float, count: int, xs):
    """`bessel_ladder` at every point of a 1-D array; shape ``(len(xs), count)``."""
    xs = np.asarray(xs, dtype=float)
    out = np.empty((xs.size, count))
    for i in range(xs.size):
        out[i, :] = bessel_ladder(nu0, count, float(xs[i]))
    return out
