"""Hot kernels with a compiled core and a pure-Python fallback.

The compiled extension ``_ckernels`` is used when it was built and the
environment variable ``HUAPICKRELL_PURE_PYTHON`` is unset or ``0``.
``BACKEND`` names the active implementation.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

__all__ = ["BACKEND", "bessel_ladder", "bessel_ladder_array", "mh_run", "pj_recurrence", "python_kernels",
           "compiled_kernels"]

python_kernels = _pykernels
compiled_kernels = None

if os.environ.get("HUAPICKRELL_PURE_PYTHON", "0") in ("", "0"):
    try:
        from . import _ckernels as compiled_kernels  # type: ignore[no-redef]
    except ImportError:  # extension not built
        compiled_kernels = None

BACKEND = "cython" if compiled_kernels is not None else "python"
_impl = compiled_kernels if compiled_kernels is not None else _pykernels


def bessel_ladder(nu0: float, count: int, x: float) -> list:
    return _impl.bessel_ladder(nu0, count, x)


def bessel_ladder_array(nu0: float, count: int, xs):
    return _impl.bessel_ladder_array(nu0, count, np.ascontiguousarray(xs, dtype=float))


def pj_recurrence(x, b, c, m: int, nder: int):
    x = np.ascontiguousarray(x, dtype=float)
    b = np.asarray(b)
    c = np.asarray(c)
    if _impl is not _pykernels and not (np.iscomplexobj(b) or np.iscomplexobj(c)):
        return _impl.pj_recurrence(x, np.ascontiguousarray(b, dtype=float),
                                   np.ascontiguousarray(c, dtype=float), m, nder)
    return _pykernels.pj_recurrence(x, b, c, m, nder)


def mh_run(x, a, b, scale, props, logu, step0, thin, out, kept0, logd):
    return _impl.mh_run(x, a, b, scale, props, logu, step0, thin, out, kept0, logd)
