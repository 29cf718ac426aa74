import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from huapickrell.errors import DomainError
from huapickrell.density import (density_mass, diffrho_residual, limit_moment,
                                 limit_moment_quadrature, limit_prefactor, ode3_residual, rho,
                                 rho_continued, rho_limit, rho_scaled, watson_closed_form,
                                 watson_integral, watson_terms)
from huapickrell.pseudojacobi import EnsembleParams
from huapickrell.quadrature import integrate_half_line

from helpers import rel


def test_single_point_density():
    # N = 1: rho = gamma^2 (1+x^2)^{-s-1}
    p = EnsembleParams(2.0, 1)
    x = np.linspace(-4, 4, 17)
    assert np.allclose(rho(p, x).rho, 8 / (3 * math.pi) * (1 + x * x) ** -3, rtol=1e-13, atol=0)


@pytest.mark.parametrize("s, N", [(2.0, 3), (0.3, 4), (2 + 1j, 3), (1.5 - 0.5j, 5), (4.0, 20)])
def test_mass(s, N):
    r = density_mass(EnsembleParams(s, N), tol=1e-11)
    assert abs(r.value - N) <= 1e-9 * N


@pytest.mark.parametrize("s, N", [(2.0, 3), (0.7, 6)])
def test_real_s_density_is_even(s, N):
    p = EnsembleParams(s, N)
    x = np.linspace(0.1, 9, 30)
    assert np.allclose(rho(p, x).rho, rho(p, -x).rho, rtol=1e-12, atol=0)


def test_complex_s_reflection():
    # rho(x; s) = rho(-x; conj s), and the density is real and positive
    p = EnsembleParams(1.5 + 0.8j, 4)
    x = np.linspace(-6, 6, 25)
    a = rho(p, x).rho
    assert np.isrealobj(a) and np.all(a > 0)
    assert np.allclose(a, rho(p.conj(), -x).rho, rtol=1e-12, atol=0)


def test_derivatives_against_finite_differences():
    p = EnsembleParams(2.5, 4)
    x = np.array([-1.3, 0.2, 2.7])
    h = 1e-4
    ev = rho(p, x)
    lo, hi = rho(p, x - h), rho(p, x + h)
    assert np.allclose((hi.rho - lo.rho) / (2 * h), ev.d1, rtol=1e-6, atol=1e-10)
    assert np.allclose((hi.d1 - lo.d1) / (2 * h), ev.d2, rtol=1e-6, atol=1e-10)
    assert np.allclose((hi.d2 - lo.d2) / (2 * h), ev.d3, rtol=1e-6, atol=1e-10)


def test_nder_masks_higher_derivatives():
    ev = rho(EnsembleParams(2.0, 2), 0.5, nder=1)
    assert math.isnan(ev.d2) and math.isnan(ev.d3)
    with pytest.raises(ValueError):
        rho(EnsembleParams(2.0, 2), 0.5, nder=4)


@pytest.mark.parametrize("s, N", [(3.0, 4), (0.4, 3), (2 + 1j, 3), (6.5, 12)])
def test_diffrho_identity(s, N):
    p = EnsembleParams(s, N)
    x = np.linspace(-8, 8, 33)
    assert np.max(diffrho_residual(p, x)) <= 1e-12
    assert np.max(diffrho_residual(p, x, perturb=0.01)) > 1e-4


@pytest.mark.parametrize("s, N", [(2.0, 3), (0.75, 3), (2 + 1j, 3), (1.2 - 0.7j, 6), (5.0, 15)])
def test_third_order_ode(s, N):
    p = EnsembleParams(s, N)
    x = np.linspace(-7, 7, 29)
    assert np.max(ode3_residual(p, x)) <= 1e-10
    assert np.max(ode3_residual(p, x, perturb=0.01)) > 1e-4


def test_continued_density_agrees_for_real_s():
    p = EnsembleParams(2.5, 4)
    x = np.linspace(-3, 3, 7)
    assert np.allclose(rho_continued(p, x).rho, rho(p, x).rho, rtol=1e-13, atol=0)


def test_rho_scaled_domain():
    with pytest.raises(DomainError):
        rho_scaled(EnsembleParams(2.0, 3), [0.0, 1.0])


def test_limit_density_values():
    # mpmath at 30 digits
    assert rel(rho_limit(2.0, 0.5).rho_inf, 0.285945257432207424) < 1e-13
    r = rho_limit(1.5, np.array([0.2, 1.0, 5.0])).rho_inf
    assert r.shape == (3,) and np.all(r > 0)


def test_limit_density_domain():
    with pytest.raises(DomainError):
        rho_limit(0.5, 1.0)
    with pytest.raises(DomainError):
        rho_limit(2 + 1j, 1.0)
    with pytest.raises(DomainError):
        rho_limit(2.0, -1.0)


@given(st.floats(0.51, 40.0))
def test_limit_prefactor_is_quarter(s):
    assert abs(limit_prefactor(s) - 0.25) < 1e-12


def test_limit_moment_values():
    assert abs(limit_moment(2.0, 2.0) - 2 / 15) < 1e-15
    assert rel(limit_moment(1.5, 2.0), 0.401201481633960026) < 1e-13
    with pytest.raises(DomainError):
        limit_moment(5.0, 2.0)
    with pytest.raises(DomainError):
        limit_moment(1.0, 2.0)


@pytest.mark.parametrize("y, s", [(1.5, 2.0), (2.0, 2.0), (1.2, 0.8), (3.0, 3.5)])
def test_limit_moment_by_quadrature(y, s):
    q = limit_moment_quadrature(y, s)
    assert rel(q.value, limit_moment(y, s)) < 1e-9


def test_limit_moment_direct_integral():
    # the integrand decays like x^{y-2s-2}
    y, s = 2.0, 2.0
    r = integrate_half_line(lambda x: x ** y * rho_limit(s, x).rho_inf, 2 * s + 2 - y, tol=1e-10)
    assert rel(r.value, 2 / 15) < 1e-8


def test_watson_integral():
    # closed form cross-checked by direct mpmath quadrature plus analytic tail
    assert rel(watson_closed_form(1.5, 1.5, 0.2), 1.656231193322375) < 1e-13
    assert rel(watson_integral(1.5, 1.5, 0.2).value, 1.65623120) < 1e-8
    assert rel(watson_closed_form(2.5, 2.5, 1.0), 0.2) < 1e-14
    assert rel(watson_integral(2.5, 2.5, 1.0).value, 0.2) < 1e-10


@pytest.mark.parametrize("y", [1.2, 2.0, 3.0])
def test_watson_terms(y):
    s = 2.0
    w = [watson_closed_form(*t) for t in watson_terms(y, s)]
    assert rel(0.25 * (w[0] + w[1] - w[2] - w[3]), limit_moment(y, s)) < 1e-12
    for t, ref in zip(watson_terms(y, s), w):
        assert abs(watson_integral(*t).value - ref) < 1e-9 * max(1.0, abs(ref))


def test_watson_domain():
    with pytest.raises(DomainError):
        watson_closed_form(0.5, 0.5, 2.5)
    with pytest.raises(DomainError):
        watson_integral(0.5, 0.5, 0.0)


def test_scaled_density_converges_at_rate_one_over_n():
    x = np.array([0.3, 1.0, 3.0])
    ref = rho_limit(2.0, x).rho_inf
    err = [np.max(np.abs(rho_scaled(EnsembleParams(2.0, N), x) - ref) / ref)
           for N in (50, 100, 200)]
    assert err[0] / err[1] > 1.7 and err[1] / err[2] > 1.7
    assert err[2] < 0.06
