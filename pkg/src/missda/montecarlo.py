"""Simulation engine: paired error-rate replications and bootstrap errors.

Each replication draws one sample from the canonical model, applies the
missing-label mechanism to produce the partially classified version, fits
both rules (closed form on the fully labeled data, full likelihood on the
partially classified data) and records their conditional error rates.  The
relative efficiency estimate is the ratio of mean excess errors over
replications, and its variability is assessed by a nonparametric bootstrap
over the replicate pairs.

Replicate seeds are spawned from a single root seed, so results are
identical for any thread count and execution order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .dataset import Dataset
from .errors import DataError, DegenerateCovarianceError, MissdaError
from .estimation import FitConfig, fit_complete, fit_full
from .missingness import DISCRIMINANT_SQUARE, MissParams, q_prob
from .model import (
    CanonicalModel,
    beta_from_theta,
    canonical_theta,
    conditional_error,
    optimal_error,
)

FAILURE_FLAG_FRACTION = 0.05


@dataclass(frozen=True)
class SimConfig:
    model: CanonicalModel
    xi: MissParams
    n: int
    B: int
    seed: int
    bootstrap_resamples: int = 1000
    mechanism: str = DISCRIMINANT_SQUARE
    threads: int = 1

    def __post_init__(self):
        if self.n < 20:
            raise ValueError(f"n must be at least 20, got {self.n}")
        if self.B < 1:
            raise ValueError(f"B must be at least 1, got {self.B}")


@dataclass(frozen=True)
class GeneratedSample:
    """A partially classified dataset together with its hidden truth."""

    data: Dataset
    z: np.ndarray
    m: np.ndarray

    def complete(self) -> Dataset:
        return self.data.with_labels(self.z)


@dataclass(frozen=True)
class SimResult:
    err_cc: np.ndarray
    err_full: np.ndarray
    re_hat: float
    bootstrap_se: float
    optimal_error: float
    B: int
    n_failed: int
    flagged: bool
    mean_missing: float
    bootstrap_redraws: int = 0


def gen_dataset(
    model: CanonicalModel,
    xi: MissParams,
    n: int,
    seed,
    mechanism: str = DISCRIMINANT_SQUARE,
) -> GeneratedSample:
    """Draw n records: class, features, then the missing-label indicator.

    `seed` may be an integer or a numpy SeedSequence; the draw order is
    fixed, so equal seeds give byte-identical samples.
    """
    ss = seed if isinstance(seed, SeedSequence) else SeedSequence(seed)
    rng = Generator(Philox(ss))
    theta = canonical_theta(model)
    beta = beta_from_theta(theta)
    z = np.where(rng.random(n) < model.pi1, 1, 2)
    y = rng.standard_normal((n, model.p))
    y[z == 1] += theta.mu1
    y[z == 2] += theta.mu2
    q = q_prob(beta, xi, y, mechanism)
    m = rng.random(n) < q
    labels = np.where(m, 0, z)
    return GeneratedSample(data=Dataset(y, labels), z=z, m=m)


def _replicate(task):
    model, xi, n, mechanism, gen_ss, fit_seed = task
    sample = gen_dataset(model, xi, n, gen_ss, mechanism)
    try:
        theta_cc = fit_complete(sample.complete())
        err_cc = conditional_error(beta_from_theta(theta_cc), model)
        fit = fit_full(
            sample.data,
            config=FitConfig(restart_seed=fit_seed),
            mechanism=mechanism,
        )
        if not fit.converged:
            return None, float(sample.m.mean())
        err_full = conditional_error(beta_from_theta(fit.params.theta), model)
    except (DataError, DegenerateCovarianceError):
        return None, float(sample.m.mean())
    return (err_cc, err_full), float(sample.m.mean())


def bootstrap_se(
    excess_cc: np.ndarray,
    excess_full: np.ndarray,
    resamples: int,
    seed,
) -> float:
    """Bootstrap standard error of the mean-excess-error ratio.

    Replicate (cc, full) pairs are resampled together to respect the
    pairing.  Resamples with a degenerate denominator are redrawn.
    """
    se, _ = _bootstrap_se_counted(excess_cc, excess_full, resamples, seed)
    return se


def _bootstrap_se_counted(excess_cc, excess_full, resamples, seed):
    excess_cc = np.asarray(excess_cc, dtype=float)
    excess_full = np.asarray(excess_full, dtype=float)
    B = excess_cc.size
    if B < 2:
        raise ValueError("need at least 2 replicates to bootstrap")
    ss = seed if isinstance(seed, SeedSequence) else SeedSequence(seed)
    rng = Generator(Philox(ss))
    values = np.empty(resamples)
    redraws = 0
    for r in range(resamples):
        while True:
            idx = rng.integers(0, B, size=B)
            den = excess_full[idx].mean()
            if den > 0.0:
                values[r] = excess_cc[idx].mean() / den
                break
            redraws += 1
            if redraws > 100 * resamples:
                raise MissdaError("bootstrap cannot find non-degenerate resamples")
    return float(np.std(values, ddof=1)), redraws


def run_replications(config: SimConfig) -> SimResult:
    """Run B paired replications and estimate the relative efficiency."""
    root = SeedSequence(config.seed)
    children = root.spawn(config.B + 1)
    tasks = []
    for b in range(config.B):
        gen_ss, fit_ss = children[b].spawn(2)
        fit_seed = int(fit_ss.generate_state(1)[0])
        tasks.append(
            (config.model, config.xi, config.n, config.mechanism, gen_ss, fit_seed)
        )

    if config.threads > 1:
        chunk = max(1, config.B // (config.threads * 4))
        try:
            with ProcessPoolExecutor(max_workers=config.threads) as pool:
                outcomes = list(pool.map(_replicate, tasks, chunksize=chunk))
        except (OSError, PermissionError):  # pool unavailable in the environment
            outcomes = [_replicate(t) for t in tasks]
    else:
        outcomes = [_replicate(t) for t in tasks]

    pairs = [o[0] for o in outcomes if o[0] is not None]
    missing_rates = [o[1] for o in outcomes]
    n_failed = config.B - len(pairs)
    if not pairs:
        raise MissdaError("every replication failed to produce a fitted pair")
    err = np.array(pairs)
    err_opt = optimal_error(config.model)
    excess_cc = err[:, 0] - err_opt
    excess_full = err[:, 1] - err_opt
    denominator = excess_full.mean()
    if denominator <= 0.0:
        raise MissdaError("mean excess error of the full-likelihood rule is zero")
    re_hat = float(excess_cc.mean() / denominator)
    if len(pairs) >= 2:
        se, redraws = _bootstrap_se_counted(
            excess_cc, excess_full, config.bootstrap_resamples, children[config.B]
        )
    else:
        se, redraws = float("nan"), 0
    return SimResult(
        err_cc=err[:, 0],
        err_full=err[:, 1],
        re_hat=re_hat,
        bootstrap_se=se,
        optimal_error=err_opt,
        B=config.B,
        n_failed=n_failed,
        flagged=n_failed > FAILURE_FLAG_FRACTION * config.B,
        mean_missing=float(np.mean(missing_rates)),
        bootstrap_redraws=redraws,
    )
