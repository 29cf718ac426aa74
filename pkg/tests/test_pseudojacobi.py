import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from huapickrell.errors import DomainError, ExistenceError
from huapickrell.pseudojacobi import (EnsembleParams, norm_gamma_sq, normalization_constants,
                                      ode_residual, p_eval, p_scaled, recurrence_coefficients,
                                      weight)
from huapickrell.quadrature import integrate_line, integrate_plane

from helpers import rel


def test_params_validation():
    with pytest.raises(DomainError):
        EnsembleParams(-0.5, 2)
    with pytest.raises(DomainError):
        EnsembleParams(1.0, 0)
    with pytest.raises(DomainError):
        EnsembleParams(1.0, 2.5)
    p = EnsembleParams(2 + 1j, 3)
    assert (p.alpha, p.beta) == (2.0, -4.0)
    assert p.conj().s == 2 - 1j


def test_weight_values():
    assert abs(weight(EnsembleParams(2.0, 1), 1.0) - 0.125) < 1e-15
    w = weight(EnsembleParams(1 + 0.5j, 2), np.array([0.0, 1.0]))
    assert abs(w[0] - 1.0) < 1e-15
    assert abs(w[1] - 2.0 ** -3 * math.exp(math.pi / 4)) < 1e-15


def test_low_degrees():
    p = EnsembleParams(2.0, 3)
    assert p_eval(p, 0, 0.4) == (1.0, 0.0, 0.0)
    v = p_eval(p, 1, 0.7)
    assert (v.value, v.derivative, v.second_derivative) == (0.7, 1.0, 0.0)
    # complex s: p_1 = x - b_0, b_0 = Im(s) / (Re(s) + N - 1) the weight mean
    q = EnsembleParams(2 + 1j, 3)
    assert abs(p_eval(q, 1, 0.7).value - (0.7 - 1.0 / 4.0)) < 1e-15
    m0 = integrate_line(lambda x: weight(q, x), 10.0, tol=1e-13).value
    m1 = integrate_line(lambda x: x * weight(q, x), 9.0, tol=1e-13).value
    assert abs(m1 / m0 - 0.25) < 1e-12


def test_existence_bound():
    p = EnsembleParams(0.3, 2)
    p_eval(p, 1, 0.0)
    with pytest.raises(ExistenceError):
        p_eval(p, 2, 0.0)
    p_eval(p, 2, 0.0, continued=True)
    with pytest.raises(DomainError):
        p_eval(p, -1, 0.0)


@pytest.mark.parametrize("s", [2.0, 3.5, 2 + 1j, 1.5 - 0.5j])
@pytest.mark.parametrize("m", [0, 1, 2, 3, 4])
def test_recurrence_matches_exact(s, m):
    p = EnsembleParams(s, 5)
    for x in (-2.3, 0.0, 0.41, 7.0):
        a = p_eval(p, m, x)
        b = p_eval(p, m, x, method="hypergeometric")
        for u, v in zip(a, b):
            assert abs(u - v) <= 1e-12 * max(1.0, abs(v)) * (1 + x * x) ** (m / 2)


@pytest.mark.parametrize("s", [0.7, 2.0, 3 + 1.5j])
def test_orthogonality(s):
    p = EnsembleParams(s, 4)
    for i in range(4):
        for j in range(i):
            def f(x, i=i, j=j):
                return p_eval(p, i, x).value * p_eval(p, j, x).value * weight(p, x)
            r = integrate_line(f, 2 * (p.re_s + 4) - i - j, tol=1e-12)
            nrm = math.sqrt(integrate_line(
                lambda x: p_eval(p, i, x).value ** 2 * weight(p, x), 2 * (p.re_s + 4) - 2 * i,
                tol=1e-12).value * integrate_line(
                lambda x: p_eval(p, j, x).value ** 2 * weight(p, x), 2 * (p.re_s + 4) - 2 * j,
                tol=1e-12).value)
            assert abs(r.value) <= 1e-10 * nrm


@given(st.floats(-50, 50), st.floats(0.1, 6), st.floats(-3, 3), st.integers(0, 5))
def test_parity(x, re, im, m):
    # p_m(-x; s) = (-1)^m p_m(x; conj s)
    p = EnsembleParams(complex(re, im), 6)
    a = p_eval(p, m, -x).value
    b = p_eval(p.conj(), m, x).value
    assert abs(a - (-1) ** m * b) <= 1e-12 * (1 + x * x) ** (m / 2)


@pytest.mark.parametrize("s, N", [(2.0, 1), (2.0, 4), (0.3, 3), (2 + 1j, 3), (1.5 - 0.5j, 5)])
def test_ode_residual(s, N):
    p = EnsembleParams(s, N)
    x = np.linspace(-20, 20, 81)
    for m in range(N):
        assert np.max(ode_residual(p, m, x)) <= 1e-10
    assert np.max(ode_residual(p, N - 1, x, perturb=0.01)) > 1e-3 or N == 1


def test_scaled_recurrence_large_x():
    p = EnsembleParams(1.0, 40)
    out = p_scaled(p, 39, [1e150])
    assert np.all(np.isfinite(out))
    assert abs(out[1, 0, 0] - 1.0) < 1e-12  # monic: p_m / |x|^m -> 1


def test_continued_coefficients_agree_on_real_axis():
    p = EnsembleParams(2.5, 4)
    b, c = recurrence_coefficients(p, 4)
    bc, cc = recurrence_coefficients(p, 4, continued=True)
    assert np.allclose(b, bc.real, atol=0) and np.allclose(c, cc.real, rtol=1e-15)


def test_gamma_sq_values():
    assert abs(norm_gamma_sq(EnsembleParams(2.0, 1)) - 8 / (3 * math.pi)) < 1e-15
    # mpmath at 30 digits
    assert rel(norm_gamma_sq(EnsembleParams(3.0, 4)), 122.230996294575618) < 1e-13
    assert rel(norm_gamma_sq(EnsembleParams(2 + 1j, 3)), 12.1225352542065719) < 1e-13


@pytest.mark.parametrize("s, N", [(2.0, 3), (0.4, 2), (1 + 0.5j, 3)])
def test_gamma_sq_is_inverse_norm(s, N):
    p = EnsembleParams(s, N)
    m = N - 1
    r = integrate_line(lambda x: np.abs(p_eval(p, m, x).value) ** 2 * weight(p, x),
                       2 * (p.re_s + N) - 2 * m, tol=1e-13)
    assert rel(r.value * norm_gamma_sq(p), 1.0) < 1e-11


def test_normalization_n1():
    nc = normalization_constants(EnsembleParams(1.0, 1))
    assert abs(nc.F - math.pi / 2) < 1e-14
    assert abs(nc.G - 2) < 1e-14
    assert abs(nc.T - math.pi / 2) < 1e-14
    assert abs(nc.Y - 4 * math.pi) < 1e-13


@pytest.mark.parametrize("s", [1.0, 2.5, 1 + 1j, 0.6 - 0.8j])
def test_normalization_t_two_points(s):
    p = EnsembleParams(s, 2)

    def f(a, b):
        return (a - b) ** 2 * weight(p, a) * weight(p, b)

    ordered = 0.5 * integrate_plane(f, panels=40)
    # the tensor rule converges slowly when the tail decay is weak
    assert rel(ordered, normalization_constants(p).T) < 1e-8


def test_normalization_real_s_consistency():
    nc = normalization_constants(EnsembleParams(2.5, 2))
    assert rel(nc.F, nc.F_tilde) < 1e-14
    assert rel(nc.T, 0.1393197278911567) < 1e-13
