"""Metropolis-within-Gibbs sampling of the eigenvalue configuration.

The target is the unnormalized joint density of the N points,

    prod_{j<k} |x_j - x_k|^2  prod_j (1+x_j^2)^{-Re s - N} exp(2 Im(s) arctan x_j).

One step updates a single site, chosen in systematic scan order
(``step mod N``), with a Cauchy random-walk proposal.  The proposal scale
is adapted toward 30% acceptance during burn-in and frozen afterwards.

Random streams
--------------
Chain ``c`` of seed ``S`` draws its proposal uniforms from
``Philox(SeedSequence(S, spawn_key=(c, 0)))`` and its acceptance uniforms
from ``Philox(SeedSequence(S, spawn_key=(c, 1)))``, one uniform of each per
step, burn-in included.  A chain is therefore a pure function of
``(S, c)`` and the configuration, independent of the block size used to
draw the numbers.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import AcceptanceRateWarning, DomainError
from .kernels import mh_run
from .pseudojacobi import EnsembleParams

__all__ = [
    "ChainConfig",
    "ChainResult",
    "ChainState",
    "QEstimate",
    "circle_statistic",
    "estimate_q",
    "initial_configuration",
    "log_joint_density",
    "q_statistic",
    "rao_blackwell_statistic",
    "run_chain",
    "run_chains",
]

_TARGET_RATE = 0.3
_BLOCK = 1 << 16


@dataclass(frozen=True)
class ChainConfig:
    """Settings of one Markov chain.

    Parameters
    ----------
    seed : int
        64-bit seed.
    burn_in : int
        Single-site steps discarded before sampling; the proposal scale
        adapts during these steps.
    thinning : int
        Steps between kept snapshots.
    total_kept : int
        Number of snapshots, at least 100.
    proposal_scale : float
        Initial Cauchy scale.
    chain : int
        Chain index used in the stream derivation.
    """

    seed: int
    burn_in: int = 10_000
    thinning: int = 1
    total_kept: int = 10_000
    proposal_scale: float = 1.0
    chain: int = 0

    def __post_init__(self):
        if self.burn_in < 0:
            raise DomainError("burn_in must be >= 0")
        if self.thinning < 1:
            raise DomainError("thinning must be >= 1")
        if self.total_kept < 100:
            raise DomainError("total_kept must be >= 100")
        if not self.proposal_scale > 0:
            raise DomainError("proposal_scale must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")


class ChainState(NamedTuple):
    """Configuration and bookkeeping at one point of a chain."""

    eigenvalues: np.ndarray
    log_density: float
    accept_count: int
    step_count: int


@dataclass
class ChainResult:
    """Snapshots and diagnostics of a finished chain.

    Attributes
    ----------
    samples : ndarray
        Shape ``(total_kept, N)``; row ``i`` is the configuration after
        sampling step ``(i + 1) * thinning``.
    final : ChainState
        State after the last sampling step (counts cover sampling only).
    proposal_scale : float
        Frozen scale used after burn-in.
    burn_in_acceptance : float
    acceptance_rate : float
        Over the sampling phase.
    """

    params: EnsembleParams
    config: ChainConfig
    samples: np.ndarray
    final: ChainState
    proposal_scale: float
    burn_in_acceptance: float
    acceptance_rate: float

    def states(self):
        """Iterate over the snapshots as `ChainState` records (log density recomputed)."""
        t = self.config.thinning
        for i, row in enumerate(self.samples):
            yield ChainState(row.copy(), log_joint_density(self.params, row), -1, (i + 1) * t)


def log_joint_density(params: EnsembleParams, eigenvalues) -> float:
    """Unnormalized log density of a configuration; ``-inf`` on coincident points.

    Examples
    --------
    >>> log_joint_density(EnsembleParams(2.0, 1), [0.0])
    0.0
    """
    x = np.asarray(eigenvalues, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("eigenvalues must be finite")
    n = x.size
    diff = np.abs(x[:, None] - x[None, :])[np.triu_indices(n, 1)]
    if np.any(diff == 0):
        return -math.inf
    a = params.re_s + params.N
    return float(2.0 * np.sum(np.log(diff)) - a * np.sum(np.log1p(x * x))
                 + 2.0 * params.im_s * np.sum(np.arctan(x)))


def initial_configuration(N: int) -> np.ndarray:
    """Deterministic distinct starting points, Cauchy quantiles at half scale."""
    j = np.arange(N)
    return 0.5 * np.tan(math.pi * ((j + 0.5) / N - 0.5))


def _streams(seed: int, chain: int):
    mk = lambda key: np.random.Generator(np.random.Philox(
        np.random.SeedSequence(seed, spawn_key=(chain, key))))
    return mk(0), mk(1)


def _draw(gp, gu, n: int):
    props = np.tan(math.pi * (gp.random(n) - 0.5))
    logu = np.log1p(-gu.random(n))
    return props, logu


def run_chain(params: EnsembleParams, config: ChainConfig,
              initial: Sequence[float] | None = None, block: int = _BLOCK) -> ChainResult:
    """Run one chain: adaptive burn-in, then fixed-kernel sampling.

    During burn-in the scale is multiplied by ``exp(2 (rate - 0.3))`` after
    every window of ``50 N`` steps.  An `AcceptanceRateWarning` is emitted
    when the sampling-phase acceptance rate leaves ``(0.1, 0.6)``.

    Parameters
    ----------
    initial : sequence of float, optional
        Starting configuration; defaults to `initial_configuration`.
    block : int
        Random numbers are drawn in blocks of this many steps; the result
        does not depend on it.
    """
    N = params.N
    x = np.array(initial_configuration(N) if initial is None else initial, dtype=float)
    if x.shape != (N,):
        raise DomainError(f"initial configuration must have {N} entries")
    logd = log_joint_density(params, x)
    if not math.isfinite(logd):
        raise DomainError("initial configuration has zero density")
    a = params.re_s + N
    b = 2.0 * params.im_s
    gp, gu = _streams(config.seed, config.chain)
    scale = float(config.proposal_scale)
    dummy = np.empty((0, N))

    # burn-in with windowed adaptation
    window = 50 * N
    done = 0
    acc_burn = 0
    while done < config.burn_in:
        n = min(window, config.burn_in - done)
        props, logu = _draw(gp, gu, n)
        acc, _, logd = mh_run(x, a, b, scale, props, logu, done, 0, dummy, 0, logd)
        acc_burn += acc
        done += n
        if n == window:
            scale *= math.exp(2.0 * (acc / n - _TARGET_RATE))
    burn_rate = acc_burn / config.burn_in if config.burn_in else float("nan")

    # sampling with a frozen kernel
    total = config.total_kept * config.thinning
    out = np.empty((config.total_kept, N))
    kept = 0
    acc_tot = 0
    step = 0
    while step < total:
        n = min(block, total - step)
        props, logu = _draw(gp, gu, n)
        acc, kept, logd = mh_run(x, a, b, scale, props, logu, step, config.thinning,
                                 out, kept, logd)
        acc_tot += acc
        step += n
    rate = acc_tot / total
    if not 0.1 < rate < 0.6:
        warnings.warn(f"acceptance rate {rate:.3f} outside (0.1, 0.6)",
                      AcceptanceRateWarning, stacklevel=2)
    final = ChainState(x.copy(), logd, acc_tot, total)
    return ChainResult(params, config, out, final, scale, burn_rate, rate)


def run_chains(params: EnsembleParams, config: ChainConfig, n_chains: int,
               threads: int = 1) -> list:
    """Independent chains ``0 .. n_chains-1`` of the same seed, in parallel.

    Chain ``c`` uses ``config`` with ``chain = config.chain + c``.  The
    returned list is ordered by chain index whatever the thread count.
    """
    cfgs = [ChainConfig(config.seed, config.burn_in, config.thinning, config.total_kept,
                        config.proposal_scale, config.chain + c) for c in range(n_chains)]
    if threads <= 1:
        return [run_chain(params, c) for c in cfgs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda c: run_chain(params, c), cfgs))


def q_statistic(samples, k: float) -> np.ndarray:
    """Per-snapshot ``sum_j |x_j|^{2k} (1 + x_j^2)``."""
    x = np.asarray(samples, dtype=float)
    x2 = x * x
    if k == 0:
        return np.sum(1.0 + x2, axis=-1)
    with np.errstate(divide="ignore"):
        return np.sum(np.exp(k * np.log(x2)) * (1.0 + x2), axis=-1)


def circle_statistic(samples, k: float) -> np.ndarray:
    """The same statistic computed on the circle after the Cayley map.

    Each point becomes ``U = (i - x)/(i + x) = e^{i theta}`` and contributes
    ``|tan(theta/2)|^{2k} sec^2(theta/2)``.
    """
    x = np.asarray(samples, dtype=float)
    theta = np.angle((1j - x) / (1j + x))
    half = 0.5 * theta
    t = np.abs(np.tan(half))
    with np.errstate(divide="ignore"):
        pw = np.exp(2.0 * k * np.log(t)) if k != 0 else 1.0
    return np.sum(pw / np.cos(half) ** 2, axis=-1)


class QEstimate(NamedTuple):
    """Monte Carlo estimate of ``Q(k)`` with batch-means error."""

    k: float
    estimate: float
    std_error: float
    ess: float
    n_samples: int


def _log_abs_moments(a: float, alpha: float, top: int) -> np.ndarray:
    # log of int |x|^alpha x^m (1+x^2)^{-a} dx for even m = 0, 2, .., top
    m = np.arange(0, top + 1, 2, dtype=float)
    p = 0.5 * (alpha + m + 1.0)
    lg = np.vectorize(math.lgamma)
    return lg(p) + lg(a - p) - math.lgamma(a)


def rao_blackwell_statistic(samples, k: float, params: EnsembleParams, chunk: int = 1 << 15):
    """Per-snapshot ``sum_i E[|x_i|^{2k}(1+x_i^2) | x_j, j != i]``.

    Given the other points, site ``i`` has density proportional to
    ``prod_{j != i} (x - x_j)^2 (1+x^2)^{-s-N}``, so the conditional
    expectation is a ratio of two linear forms in the even power moments of
    the weight, which are beta functions.  Needs real ``s``.
    """
    if params.im_s != 0.0:
        raise DomainError("the Rao-Blackwell statistic needs real s")
    x = np.asarray(samples, dtype=float)
    n, N = x.shape
    a = params.re_s + N
    top = 2 * (N - 1)
    base = _log_abs_moments(a, 0.0, top)
    num = np.logaddexp(_log_abs_moments(a, 2.0 * k, top), _log_abs_moments(a, 2.0 * k + 2.0, top))
    # normalize by the largest denominator moment
    shift = np.max(base)
    mu = np.exp(base - shift)
    nu = np.exp(num - shift)
    out = np.empty(n)
    for lo in range(0, n, chunk):
        xs = x[lo:lo + chunk]
        acc = np.zeros(xs.shape[0])
        for i in range(N):
            # coefficients of prod_{j != i} (x - x_j)^2, lowest degree first
            C = np.zeros((xs.shape[0], top + 1))
            C[:, 0] = 1.0
            deg = 0
            for j in range(N):
                if j == i:
                    continue
                xj = xs[:, j:j + 1]
                new = xj * xj * C
                new[:, 1:] -= 2.0 * xj * C[:, :-1]
                new[:, 2:] += C[:, :-2]
                C = new
                deg += 2
            ev = C[:, 0::2]
            acc += (ev @ nu) / (ev @ mu)
        out[lo:lo + chunk] = acc
    return out


def estimate_q(chain, k_list: Sequence[float], params: EnsembleParams | None = None,
               n_batches: int | None = None, estimator: str = "auto") -> list:
    """Batch-means estimates of ``Q(k)`` from chain snapshots.

    Parameters
    ----------
    chain : ChainResult or array_like
        Snapshots of shape ``(n, N)``.  Arrays need ``params``.
    k_list : sequence of float
        Real exponents with ``k < Re(s) - 3/4``.
    n_batches : int, optional
        Defaults to ``floor(sqrt(n))``.
    estimator : {"auto", "rao-blackwell", "plain"}
        ``plain`` averages `q_statistic`; ``rao-blackwell`` averages
        `rao_blackwell_statistic`, which has finite variance on the whole
        strip where the plain statistic may not.  ``auto`` picks
        Rao-Blackwell for real ``s``.

    Raises
    ------
    DomainError
        If some ``k`` violates the variance margin.
    """
    if isinstance(chain, ChainResult):
        samples, params = chain.samples, chain.params
    else:
        samples = np.asarray(chain, dtype=float)
        if params is None:
            raise DomainError("params are required with raw samples")
    n = samples.shape[0]
    b = n_batches or max(2, int(math.isqrt(n)))
    m = n // b
    out = []
    for k in k_list:
        if isinstance(k, complex) or not -0.5 < float(k) < params.re_s - 0.75:
            raise DomainError(f"k = {k} outside -1/2 < k < Re(s) - 3/4")
        if estimator == "plain" or (estimator == "auto" and params.im_s != 0.0):
            stat = q_statistic(samples, float(k))
        elif estimator in ("auto", "rao-blackwell"):
            stat = rao_blackwell_statistic(samples, float(k), params)
        else:
            raise ValueError(f"unknown estimator {estimator!r}")
        est = math.fsum(stat) / n
        means = stat[:b * m].reshape(b, m).mean(axis=1)
        var_b = float(np.var(means, ddof=1))
        se = math.sqrt(var_b / b)
        var = float(np.var(stat, ddof=1))
        ess = n * var / (m * var_b) if var_b > 0 else float(n)
        out.append(QEstimate(float(k), est, se, min(ess, float(n)), n))
    return out
