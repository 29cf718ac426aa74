import math
import warnings

import numpy as np
import pytest

from huapickrell.errors import AcceptanceRateWarning, DomainError
from huapickrell.kernels import mh_run
from huapickrell.moments import q_hahn
from huapickrell.pseudojacobi import EnsembleParams
from huapickrell.sampler import (ChainConfig, circle_statistic, estimate_q,
                                 initial_configuration, log_joint_density, q_statistic,
                                 rao_blackwell_statistic, run_chain, run_chains)


def test_log_density_values():
    assert log_joint_density(EnsembleParams(2.0, 1), [0.0]) == 0.0
    # N = 2, s = 1: log (x1-x2)^2 - 3 log(1+x1^2) - 3 log(1+x2^2)
    v = log_joint_density(EnsembleParams(1.0, 2), [0.0, 1.0])
    assert abs(v - (-3 * math.log(2.0))) < 1e-15
    w = log_joint_density(EnsembleParams(1 + 0.5j, 1), [1.0])
    assert abs(w - (-2 * math.log(2.0) + math.pi / 4)) < 1e-15


def test_log_density_coincident_and_invalid():
    assert log_joint_density(EnsembleParams(2.0, 3), [0.1, 0.5, 0.1]) == -math.inf
    with pytest.raises(DomainError):
        log_joint_density(EnsembleParams(2.0, 2), [0.0, math.nan])


def test_log_density_permutation_invariant(rng):
    p = EnsembleParams(1.5 + 0.7j, 6)
    x = rng.standard_cauchy(6)
    ref = log_joint_density(p, x)
    for _ in range(10):
        assert abs(log_joint_density(p, rng.permutation(x)) - ref) <= 1e-13 * max(1, abs(ref))


def test_config_validation():
    for kw in (dict(burn_in=-1), dict(thinning=0), dict(total_kept=10), dict(proposal_scale=0.0),
               dict(seed=-1)):
        args = dict(seed=1)
        args.update(kw)
        with pytest.raises(DomainError):
            ChainConfig(**args)


def test_initial_configuration():
    x = initial_configuration(5)
    assert len(set(x)) == 5 and abs(x[2]) < 1e-16
    assert np.allclose(x, -x[::-1])


def test_seed_determinism_and_block_invariance():
    p = EnsembleParams(2.0, 3)
    cfg = ChainConfig(seed=7, burn_in=1000, total_kept=500, thinning=3)
    a = run_chain(p, cfg)
    b = run_chain(p, cfg, block=37)
    c = run_chain(p, ChainConfig(seed=8, burn_in=1000, total_kept=500, thinning=3))
    assert np.array_equal(a.samples, b.samples)
    assert np.array_equal(a.final.eigenvalues, b.final.eigenvalues)
    assert a.final.log_density == b.final.log_density
    assert not np.array_equal(a.samples, c.samples)


def test_chain_streams_independent_and_ordered():
    p = EnsembleParams(2.0, 2)
    cfg = ChainConfig(seed=3, burn_in=200, total_kept=200)
    one = run_chains(p, cfg, 3, threads=1)
    many = run_chains(p, cfg, 3, threads=3)
    for a, b in zip(one, many):
        assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(one[0].samples, one[1].samples)
    assert np.array_equal(one[2].samples,
                          run_chain(p, ChainConfig(seed=3, burn_in=200, total_kept=200,
                                                   chain=2)).samples)


def test_running_log_density_tracks_state():
    p = EnsembleParams(1.5 + 0.5j, 4)
    r = run_chain(p, ChainConfig(seed=11, burn_in=500, total_kept=1000))
    assert abs(r.final.log_density - log_joint_density(p, r.final.eigenvalues)) < 1e-9
    st = next(r.states())
    assert st.step_count == 1 and st.log_density == log_joint_density(p, r.samples[0])


def test_detailed_balance_increment(rng):
    # the kernel accepts on log pi(y) - log pi(x), the exact ratio for a symmetric proposal
    p = EnsembleParams(2.5 + 0.3j, 5)
    a, b = p.re_s + p.N, 2 * p.im_s
    for _ in range(50):
        x = rng.standard_cauchy(5)
        y = x.copy()
        props = rng.standard_cauchy(1)
        i = 0
        y[i] = x[i] + 0.7 * props[0]
        lx, ly = log_joint_density(p, x), log_joint_density(p, y)
        xx = x.copy()
        acc, _, logd = mh_run(xx, a, b, 0.7, props, np.array([-np.inf]), 0, 0,
                              np.empty((0, 5)), 0, lx)
        assert acc == 1
        assert abs(logd - ly) <= 1e-13 * max(1.0, abs(lx), abs(ly))
        # reverse move gives the negated increment
        back = np.array([-props[0]])
        acc2, _, logd2 = mh_run(xx, a, b, 0.7, back, np.array([-np.inf]), 0, 0,
                                np.empty((0, 5)), 0, logd)
        assert acc2 == 1 and np.allclose(xx, x, rtol=0, atol=1e-14 * np.max(np.abs(x)))
        assert abs(logd2 - lx) <= 1e-13 * max(1.0, abs(lx))


def test_coincident_proposal_rejected():
    p = EnsembleParams(2.0, 2)
    x = np.array([0.0, 1.0])
    acc, _, _ = mh_run(x, 4.0, 0.0, 1.0, np.array([1.0]), np.array([-np.inf]), 0, 0,
                       np.empty((0, 2)), 0, log_joint_density(p, x))
    assert acc == 0 and np.array_equal(x, [0.0, 1.0])


def test_two_point_swap_symmetry():
    # for N = 2 the joint law is symmetric: both coordinates have the same marginal
    p = EnsembleParams(2.0, 2)
    r = run_chain(p, ChainConfig(seed=5, burn_in=2000, total_kept=40000, thinning=2))
    m0 = np.mean(r.samples[:, 0] ** 2 / (1 + r.samples[:, 0] ** 2))
    m1 = np.mean(r.samples[:, 1] ** 2 / (1 + r.samples[:, 1] ** 2))
    assert abs(m0 - m1) < 0.02


def _cdf_single(x):
    # N = 1, s = 2: density (8/(3 pi)) (1+x^2)^{-3}; in theta = atan x it is cos^4
    t = np.arctan(x)
    return 0.5 + (3 * t / 8 + np.sin(2 * t) / 4 + np.sin(4 * t) / 32) / (3 * math.pi / 8)


def test_single_point_marginal_ks():
    r = run_chain(EnsembleParams(2.0, 1), ChainConfig(seed=2024, burn_in=5000, thinning=5,
                                                      total_kept=100000))
    x = np.sort(r.samples[:, 0])
    F = _cdf_single(x)
    n = x.size
    D = max(np.max(np.arange(1, n + 1) / n - F), np.max(F - np.arange(n) / n))
    assert D < 0.01


def test_complex_s_mean_is_positive():
    p = EnsembleParams(2 + 1j, 2)
    r = run_chain(p, ChainConfig(seed=99, burn_in=4000, total_kept=40000, thinning=2))
    m = r.samples.sum(axis=1)
    b = 200
    means = m[: m.size // b * b].reshape(b, -1).mean(axis=1)
    se = means.std(ddof=1) / math.sqrt(b)
    assert m.mean() > 5 * se


def test_circle_statistic_equals_line_statistic(rng):
    x = rng.standard_cauchy((200, 4))
    for k in (0.0, 0.5, 1.3):
        a = q_statistic(x, k)
        b = circle_statistic(x, k)
        assert np.max(np.abs(a - b) / a) <= 1e-12


def test_rao_blackwell_unbiased_single_point():
    # N = 1: the conditional law is the marginal, so the statistic is constant
    p = EnsembleParams(3.0, 1)
    x = np.array([[0.1], [5.0], [-2.0]])
    v = rao_blackwell_statistic(x, 1.0, p)
    assert np.allclose(v, q_hahn(p, 1.0), rtol=1e-13)
    with pytest.raises(DomainError):
        rao_blackwell_statistic(x, 1.0, EnsembleParams(3 + 1j, 1))


def test_estimate_q_against_closed_form():
    p = EnsembleParams(3.0, 5)
    r = run_chain(p, ChainConfig(seed=1, burn_in=20000, total_kept=100000))
    (est,) = estimate_q(r, [1.0])
    ref = q_hahn(p, 1.0)
    assert abs(est.estimate - ref) < 4 * est.std_error
    assert est.std_error < 0.02 * ref and est.ess > 1000
    (plain,) = estimate_q(r, [1.0], estimator="plain")
    assert plain.n_samples == est.n_samples


def test_estimate_q_margins():
    p = EnsembleParams(3.0, 2)
    x = np.ones((200, 2)) * [0.3, -0.4]
    with pytest.raises(DomainError):
        estimate_q(x, [2.3], params=p)
    with pytest.raises(DomainError):
        estimate_q(x, [0.5])
    with pytest.raises(ValueError):
        estimate_q(x, [0.5], params=p, estimator="bogus")


def test_acceptance_warning():
    p = EnsembleParams(2.0, 3)
    with pytest.warns(AcceptanceRateWarning):
        run_chain(p, ChainConfig(seed=1, burn_in=0, total_kept=2000, proposal_scale=1e4))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        r = run_chain(p, ChainConfig(seed=1, burn_in=3000, total_kept=2000))
    assert 0.1 < r.acceptance_rate < 0.6


@pytest.mark.slow
def test_coverage():
    p = EnsembleParams(3.0, 4)
    ref = q_hahn(p, 1.0)
    hits = 0
    for seed in range(50):
        r = run_chain(p, ChainConfig(seed=seed, burn_in=10000, total_kept=40000))
        (est,) = estimate_q(r, [1.0])
        hits += abs(est.estimate - ref) <= 1.96 * est.std_error
    assert hits >= 43
