# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same algorithms and operation order as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, log1p, atan, cos, sin, fabs, floor, ceil, exp, lgamma, tgamma, pow, M_PI
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef double _EPS_TERM = 1e-17


def pj_recurrence(double[::1] x, double[::1] b, double[::1] c, int m, int nder):
    """Real-coefficient scaled monic recurrence; see ``_pykernels.pj_recurrence``."""
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[double, ndim=3] res = np.zeros((2, nder + 1, n))
    cdef double[:, :, ::1] R = res
    cdef double *prev = <double *> malloc((nder + 1) * sizeof(double))
    cdef double *cur = <double *> malloc((nder + 1) * sizeof(double))
    cdef double *nxt = <double *> malloc((nder + 1) * sizeof(double))
    cdef double *tmp
    cdef Py_ssize_t p
    cdef int j, r
    cdef double xp, inv, inv2, xb, cj, v
    if prev == NULL or cur == NULL or nxt == NULL:
        free(prev); free(cur); free(nxt)
        raise MemoryError()
    try:
        with nogil:
            for p in range(n):
                xp = x[p]
                inv = 1.0 / sqrt(1.0 + xp * xp)
                inv2 = inv * inv
                for r in range(nder + 1):
                    prev[r] = 0.0
                    cur[r] = 0.0
                cur[0] = 1.0
                for j in range(m):
                    xb = (xp - b[j]) * inv
                    cj = c[j] * inv2 if j > 0 else 0.0
                    for r in range(nder + 1):
                        v = xb * cur[r] - cj * prev[r]
                        if r > 0:
                            v = v + r * cur[r - 1] * inv
                        nxt[r] = v
                    tmp = prev
                    prev = cur
                    cur = nxt
                    nxt = tmp
                for r in range(nder + 1):
                    R[0, r, p] = prev[r]
                    R[1, r, p] = cur[r]
    finally:
        free(prev); free(cur); free(nxt)
    return res


# ---------------------------------------------------------------------------
# Bessel J of real order


cdef double _series(double nu, double x) nogil:
    cdef double q = -0.25 * x * x
    cdef double term = 1.0
    cdef double total = 1.0
    cdef int k = 0
    cdef double sgn
    while True:
        k += 1
        term *= q / (k * (nu + k))
        total += term
        if fabs(term) <= _EPS_TERM * fabs(total):
            break
    if nu + 1.0 <= 0.0 and nu == floor(nu):
        return 0.0
    sgn = 1.0
    if nu + 1.0 < 0.0 and (<long> floor(nu + 1.0)) % 2 != 0:
        sgn = -1.0
    return sgn * exp(nu * log(0.5 * x) - lgamma(nu + 1.0)) * total


cdef double _hankel(double mu, double x) nogil:
    cdef double mu4 = 4.0 * mu * mu
    cdef double p = 1.0, q = 0.0, a = 1.0, last = 1.0, t
    cdef int k = 0
    cdef double phase, cx, sx, cp, sp, cchi, schi
    while k < 60:
        k += 1
        a *= (mu4 - (2 * k - 1) * (2 * k - 1)) / (8.0 * k * x)
        t = fabs(a)
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
    phase = (0.5 * mu + 0.25) * M_PI
    cx = cos(x)
    sx = sin(x)
    cp = cos(phase)
    sp = sin(phase)
    cchi = cx * cp + sx * sp
    schi = sx * cp - cx * sp
    return sqrt(2.0 / (M_PI * x)) * (p * cchi - q * schi)


cdef void _miller_down(double alpha, double x, int start, double *g) nogil:
    # g has start + 2 entries
    cdef int n, i
    cdef double big
    for i in range(start + 2):
        g[i] = 0.0
    g[start] = 1e-280
    n = start
    while n > 0:
        g[n - 1] = 2.0 * (alpha + n) / x * g[n] - g[n + 1]
        if fabs(g[n - 1]) > 1e250:
            for i in range(n - 1, start + 1):
                g[i] *= 1e-250
        n -= 1
    big = 0.0
    for i in range(start + 2):
        if fabs(g[i]) > big:
            big = fabs(g[i])
    for i in range(start + 2):
        g[i] /= big


cdef int _ladder_nonneg(double nu0, int count, double x, double *out) nogil:
    # writes count values into out; returns 0, or -1 on allocation failure
    cdef int j, n0, top, n1, start, n, k, size
    cdef double alpha, num, den, scale, total, gk
    cdef double *f
    cdef double *g
    if x <= 2.0 or x * x <= 8.0 * (nu0 + 1.0):
        for j in range(count):
            out[j] = _series(nu0 + j, x)
        return 0
    n0 = <int> floor(nu0)
    alpha = nu0 - n0
    top = n0 + count - 1
    if x >= 25.0:
        n1 = <int> floor(x - alpha)
        if n1 > top:
            n1 = top
        if n1 < 1:
            n1 = 1
        size = (top if top > n1 else n1) + 1
        f = <double *> malloc(size * sizeof(double))
        if f == NULL:
            return -1
        for j in range(size):
            f[j] = 0.0
        f[0] = _hankel(alpha, x)
        f[1] = _hankel(alpha + 1.0, x)
        for n in range(1, n1):
            f[n + 1] = 2.0 * (alpha + n) / x * f[n] - f[n - 1]
        if top > n1:
            start = top + 20 + <int> (10.0 * pow(x, 1.0 / 3.0))
            g = <double *> malloc((start + 2) * sizeof(double))
            if g == NULL:
                free(f)
                return -1
            _miller_down(alpha, x, start, g)
            num = f[n1] * g[n1] + f[n1 - 1] * g[n1 - 1]
            den = g[n1] * g[n1] + g[n1 - 1] * g[n1 - 1]
            scale = num / den
            for n in range(n1 + 1, top + 1):
                f[n] = g[n] * scale
            free(g)
        for j in range(count):
            out[j] = f[n0 + j]
        free(f)
        return 0
    start = <int> (top if top > x else x) + 30
    if start % 2:
        start += 1
    g = <double *> malloc((start + 2) * sizeof(double))
    if g == NULL:
        return -1
    _miller_down(alpha, x, start, g)
    total = tgamma(alpha + 1.0) * g[0]
    gk = tgamma(alpha + 1.0)
    k = 1
    while 2 * k <= start:
        total += (alpha + 2 * k) * gk * g[2 * k]
        gk *= (alpha + k) / (k + 1)
        k += 1
    scale = pow(0.5 * x, alpha) / total
    for j in range(count):
        out[j] = g[n0 + j] * scale
    free(g)
    return 0


cdef int _ladder(double nu0, int count, double x, double *out) nogil:
    cdef int shift, i, rc
    cdef double base, nu
    cdef double *v
    if nu0 >= 0.0:
        return _ladder_nonneg(nu0, count, x, out)
    shift = <int> ceil(-nu0)
    base = nu0 + shift
    v = <double *> malloc((count + 2 * shift + 1) * sizeof(double))
    if v == NULL:
        return -1
    # v[shift ..] holds the non-negative ladder; fill downward below it
    rc = _ladder_nonneg(base, count + shift + 1, x, v + shift)
    if rc == 0:
        for i in range(shift):
            nu = base - i
            v[shift - i - 1] = 2.0 * nu / x * v[shift - i] - v[shift - i + 1]
        for i in range(count):
            out[i] = v[i]
    free(v)
    return rc


def bessel_ladder(double nu0, int count, double x):
    """Values ``J_{nu0 + j}(x)`` for ``j = 0, ..., count - 1``."""
    cdef double *buf = <double *> malloc(count * sizeof(double))
    cdef int rc, j
    if buf == NULL:
        raise MemoryError()
    rc = _ladder(nu0, count, x, buf)
    try:
        if rc != 0:
            raise MemoryError()
        return [buf[j] for j in range(count)]
    finally:
        free(buf)


def bessel_ladder_array(double nu0, int count, double[::1] xs):
    """`bessel_ladder` at every point of a 1-D array; shape ``(len(xs), count)``."""
    cdef Py_ssize_t n = xs.shape[0], i
    cdef cnp.ndarray[double, ndim=2] res = np.empty((n, count))
    cdef double[:, ::1] R = res
    cdef int rc = 0
    with nogil:
        for i in range(n):
            rc = _ladder(nu0, count, xs[i], &R[i, 0])
            if rc != 0:
                break
    if rc != 0:
        raise MemoryError()
    return res


# ---------------------------------------------------------------------------
# Metropolis-within-Gibbs single-site sweep


def mh_run(double[::1] x, double a, double b, double scale, double[::1] props,
           double[::1] logu, long long step0, long long thin, double[:, ::1] out,
           Py_ssize_t kept0, double logd):
    """Advance the chain; see ``_pykernels.mh_run``."""
    cdef Py_ssize_t n = x.shape[0], T = props.shape[0], t, i, j
    cdef Py_ssize_t kept = kept0
    cdef long long acc = 0, g
    cdef double xi, y, d, xj
    cdef bint ok
    with nogil:
        for t in range(T):
            g = step0 + t
            i = g % n
            xi = x[i]
            y = xi + scale * props[t]
            d = -a * (log1p(y * y) - log1p(xi * xi)) + b * (atan(y) - atan(xi))
            ok = True
            for j in range(n):
                if j != i:
                    xj = x[j]
                    if y == xj:
                        ok = False
                        break
                    d += 2.0 * (log(fabs(y - xj)) - log(fabs(xi - xj)))
            if ok and logu[t] < d:
                x[i] = y
                acc += 1
                logd += d
            if thin > 0 and (g + 1) % thin == 0:
                for j in range(n):
                    out[kept, j] = x[j]
                kept += 1
    return acc, kept, logd
