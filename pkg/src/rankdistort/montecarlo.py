"""Monte Carlo estimates of rank-difference moments.

Random numbers: replication ``r`` belongs to block ``r // BLOCK``; block ``b``
draws from ``numpy.random.Generator(PCG64(SeedSequence(seed, spawn_key=(b,))))``
and Gaussian variates come from ``Generator.standard_normal`` (ziggurat).
Rank differences are integers, so per-block sums are exact int64 values and
the merged result is identical for any number of workers.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .design import DesignMatrix
from .errors import InvalidConfig
from .projection import HatMatrix, compute_hat_matrix

BLOCK = 2048
TIE_ABS_TOL = 1e-12


def rank_of(v) -> np.ndarray:
    """1-based ascending ranks; equal values are ordered by index.

    Works row-wise on 2-d input.
    """
    v = np.asarray(v, dtype=float)
    order = np.argsort(v, axis=-1, kind="stable")
    ranks = np.empty_like(order)
    np.put_along_axis(ranks, order, np.arange(1, v.shape[-1] + 1), axis=-1)
    return ranks


@dataclass(frozen=True)
class SimulationConfig:
    design: DesignMatrix
    replications: int
    seed: int = 0
    theta: tuple[float, ...] | None = None
    sigma: float = 1.0

    def __post_init__(self):
        if int(self.replications) < 1:
            raise InvalidConfig(f"replications must be >= 1, got {self.replications}")
        if not self.sigma > 0:
            raise InvalidConfig(f"sigma must be positive, got {self.sigma}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidConfig("seed must be an unsigned 64-bit integer")
        if self.theta is None:
            object.__setattr__(self, "theta", (0.0,) * self.design.p)
        theta = tuple(float(t) for t in self.theta)
        if len(theta) != self.design.p:
            raise InvalidConfig(f"theta has {len(theta)} entries, design has p={self.design.p}")
        object.__setattr__(self, "theta", theta)

    def to_dict(self) -> dict:
        return {
            "n": self.design.n,
            "p": self.design.p,
            "replications": int(self.replications),
            "seed": int(self.seed),
            "theta": list(self.theta),
            "sigma": float(self.sigma),
        }


@dataclass(frozen=True)
class SimulationResult:
    mean_cov: np.ndarray
    se_cov: np.ndarray
    replications: int
    tie_events: int
    config: SimulationConfig | None = None

    @property
    def n(self) -> int:
        return self.mean_cov.shape[0]

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "replications": self.replications,
            "tie_events": self.tie_events,
            "mean_cov": self.mean_cov.tolist(),
            "se_cov": self.se_cov.tolist(),
        }
        if self.config is not None:
            out["config"] = self.config.to_dict()
        return out


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _draw(cfg: SimulationConfig, hat: HatMatrix, block: int, size: int):
    """Errors, responses and residuals for one block of replications."""
    rng = _block_rng(int(cfg.seed), block)
    eps = cfg.sigma * rng.standard_normal((size, hat.n))
    # residuals of Y = D theta + eps equal (I - H) eps; theta cancels exactly
    resid = eps - eps @ hat.entries
    return eps, resid


def _has_tie(resid: np.ndarray) -> np.ndarray:
    s = np.sort(resid, axis=-1)
    return np.any(np.diff(s, axis=-1) <= TIE_ABS_TOL, axis=-1)


def _block_sums(cfg, hat, block, size):
    eps, resid = _draw(cfg, hat, block, size)
    d = rank_of(resid) - rank_of(eps)
    d2 = d * d
    return d.T @ d, d2.T @ d2, int(_has_tie(resid).sum())


def _blocks(replications: int):
    full, rest = divmod(replications, BLOCK)
    sizes = [BLOCK] * full + ([rest] if rest else [])
    return list(enumerate(sizes))


def _run_blocks(fn, blocks, workers):
    if workers is None:
        workers = min(os.cpu_count() or 1, 8)
    workers = max(1, min(int(workers), len(blocks)))
    if workers == 1:
        return [fn(b, s) for b, s in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda bs: fn(*bs), blocks))


def simulate(cfg: SimulationConfig, workers: int | None = None, hat: HatMatrix | None = None):
    """Empirical mean and standard error of (Rhat_i - R_i)(Rhat_j - R_j)."""
    if hat is None:
        hat = compute_hat_matrix(cfg.design)
    n = hat.n
    reps = int(cfg.replications)
    parts = _run_blocks(lambda b, s: _block_sums(cfg, hat, b, s), _blocks(reps), workers)
    s1 = np.zeros((n, n), dtype=np.int64)
    s2 = np.zeros((n, n), dtype=np.int64)
    ties = 0
    for a, b, t in parts:
        s1 += a
        s2 += b
        ties += t
    mean = s1 / reps
    if reps > 1:
        var = (s2 - s1.astype(float) * s1 / reps) / (reps - 1)
        se = np.sqrt(np.maximum(var, 0.0) / reps)
    else:
        se = np.zeros((n, n))
    return SimulationResult(mean, se, reps, ties, cfg)


def residual_tie_scan(cfg: SimulationConfig, draws: int, workers: int | None = None) -> int:
    """Number of draws in which some pair of residuals is within 1e-12."""
    if draws < 1:
        raise InvalidConfig(f"draws must be >= 1, got {draws}")
    hat = compute_hat_matrix(cfg.design)
    counts = _run_blocks(
        lambda b, s: int(_has_tie(_draw(cfg, hat, b, s)[1]).sum()), _blocks(draws), workers
    )
    return sum(counts)
