"""Exact second moments of rank differences under Gaussian errors.

For errors ``eps ~ N(0, sigma^2 I)`` and residuals ``(I - H) eps`` the
covariance ``E (Rhat_i - R_i)(Rhat_j - R_j)`` is a finite sum of bivariate
Gaussian orthant probabilities, each an arcsine of a cosine between two
contrast vectors. Evaluating one entry costs O(n^2) arcsines; the full matrix
costs O(n^4).
"""

from __future__ import annotations

import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDenominator, DomainError, TieDetected
from .projection import HatMatrix, _check, contrast_matrix, delta_matrix, tie_report

CLAMP_TOL = 1e-12
DENOM_TOL = 1e-12


@dataclass
class ClampCounter:
    """Records how often (and by how much) arcsine arguments left [-1, 1]."""

    count: int = 0
    max_excess: float = 0.0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def record(self, excess: np.ndarray) -> None:
        with self._lock:
            self.count += int(excess.size)
            self.max_excess = max(self.max_excess, float(excess.max()))


def _asin(x, counter: ClampCounter | None = None):
    x = np.asarray(x, dtype=float)
    over = np.abs(x) > 1.0
    if np.any(over):
        excess = np.abs(x[over]) - 1.0
        if excess.max() > CLAMP_TOL:
            raise DomainError(f"arcsine argument outside [-1, 1] by {excess.max():.3e}")
        if counter is not None:
            counter.record(excess)
        x = np.clip(x, -1.0, 1.0)
    return np.arcsin(x)


def orthant_prob(rho: float) -> float:
    """P(Y1 <= 0, Y2 <= 0) for a centred bivariate normal with correlation ``rho``."""
    if not abs(rho) <= 1.0 + CLAMP_TOL:
        raise DomainError(f"correlation {rho} outside [-1, 1]")
    rho = min(1.0, max(-1.0, float(rho)))
    return (math.pi / 2 + math.asin(rho)) / (2 * math.pi)


def arcsin_holder_gap(x: float, y: float) -> float:
    """|asin x - asin y| - (pi / sqrt 2) sqrt|x - y|, which is never positive."""
    if not (-1.0 <= x <= 1.0 and -1.0 <= y <= 1.0):
        raise DomainError(f"arguments must lie in [-1, 1], got {x}, {y}")
    return abs(math.asin(x) - math.asin(y)) - math.pi / math.sqrt(2) * math.sqrt(abs(x - y))


def _require_tie_free(hat: HatMatrix) -> None:
    report = tie_report(hat)
    if not report.tie_free:
        raise TieDetected(f"residual pairs {list(report.tie_pairs)} coincide almost surely")


def _gap_vector(hat: HatMatrix, i0: int) -> np.ndarray:
    """2 - H_{kk,i} for all k, the squared norm of (I - H)(e_k - e_i)."""
    h = hat.entries
    lev = hat.leverages
    g = 2.0 - (lev + h[i0, i0] - 2.0 * h[:, i0])
    g[i0] = 2.0
    bad = np.nonzero(g <= DENOM_TOL)[0]
    if bad.size:
        raise DegenerateDenominator(
            f"2 - H_kk,i <= {DENOM_TOL} for i={i0 + 1}, k={bad[0] + 1}"
        )
    return g


def _cov_unchecked(hat: HatMatrix, i0: int, j0: int, counter=None) -> float:
    n = hat.n
    dlt = delta_matrix(n, i0, j0)
    num = dlt - contrast_matrix(hat, i0, j0)
    a = _gap_vector(hat, i0)
    b = _gap_vector(hat, j0)
    both = num / np.sqrt(np.outer(a, b))
    # cos of a vector with itself or its negative: exactly +-1, and arcsin
    # would amplify any rounding there to ~1e-8
    if i0 == j0:
        mask = np.eye(n, dtype=bool)
        mask[i0, i0] = False
        both[mask] = 1.0
    else:
        both[j0, i0] = -1.0
    terms = (
        _asin(dlt / 2.0, counter),
        _asin(both, counter),
        -_asin(num / np.sqrt(2.0 * a)[:, None], counter),
        -_asin(num / np.sqrt(2.0 * b)[None, :], counter),
    )
    return math.fsum(np.concatenate([t.ravel() for t in terms])) / (2 * math.pi)


def exact_cov(hat: HatMatrix, i: int, j: int, counter: ClampCounter | None = None) -> float:
    """E (Rhat_i - R_i)(Rhat_j - R_j) for 1-based indices ``i``, ``j``."""
    i0, j0 = _check(hat.n, i, j)
    _require_tie_free(hat)
    return _cov_unchecked(hat, i0, j0, counter)


def _var_unchecked(hat: HatMatrix, i0: int, counter=None) -> float:
    h = hat.entries
    a = _gap_vector(hat, i0)
    hk = 2.0 - a
    root = np.sqrt(np.clip(hk / 2.0, 0.0, 1.0))
    single = math.fsum(math.pi - 2.0 * np.arccos(root)) / (2 * math.pi)

    num = 1.0 - (h + h[i0, i0] - h[:, i0][:, None] - h[i0, :][None, :])
    ku, lu = np.triu_indices(hat.n, k=1)
    # pairs touching i contribute exactly zero; evaluated literally their
    # arcsine arguments can exceed 1 for high-leverage designs
    keep = (ku != i0) & (lu != i0)
    ku, lu = ku[keep], lu[keep]
    nu = num[ku, lu]
    pair = (
        math.pi / 6
        + _asin(nu / np.sqrt(a[ku] * a[lu]), counter)
        - _asin(nu / np.sqrt(2.0 * a[ku]), counter)
        - _asin(nu / np.sqrt(2.0 * a[lu]), counter)
    )
    return single + math.fsum(pair) / math.pi


def exact_var(hat: HatMatrix, i: int, counter: ClampCounter | None = None) -> float:
    """E (Rhat_i - R_i)^2 via the specialised single-index formula."""
    (i0,) = _check(hat.n, i)
    _require_tie_free(hat)
    return _var_unchecked(hat, i0, counter)


@dataclass(frozen=True)
class DistortionMatrix:
    cov: np.ndarray

    @property
    def n(self) -> int:
        return self.cov.shape[0]

    @property
    def rms(self) -> np.ndarray:
        """Rank distortions sqrt(E (Rhat_i - R_i)^2)."""
        return np.sqrt(np.maximum(np.diag(self.cov), 0.0))

    def to_dict(self) -> dict:
        return {"n": self.n, "cov": self.cov.tolist(), "rms": self.rms.tolist()}


def _fill(hat, pairs, counter):
    out = []
    for i0, j0 in pairs:
        if i0 == j0:
            out.append(_var_unchecked(hat, i0, counter))
        else:
            out.append(_cov_unchecked(hat, i0, j0, counter))
    return out


def exact_matrix(
    hat: HatMatrix, workers: int | None = None, counter: ClampCounter | None = None
) -> DistortionMatrix:
    """Full n x n distortion matrix.

    Upper-triangle pairs are split statically into ``workers`` contiguous
    chunks; every pair is evaluated independently, so the result does not
    depend on the worker count.
    """
    _require_tie_free(hat)
    n = hat.n
    iu, ju = np.triu_indices(n)
    pairs = list(zip(iu.tolist(), ju.tolist()))
    if workers is None:
        workers = min(os.cpu_count() or 1, 8)
    workers = max(1, min(int(workers), len(pairs)))
    if workers == 1:
        values = _fill(hat, pairs, counter)
    else:
        chunks = np.array_split(np.arange(len(pairs)), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(lambda c: _fill(hat, [pairs[t] for t in c], counter), chunks)
            values = [v for part in parts for v in part]
    cov = np.zeros((n, n))
    cov[iu, ju] = values
    cov[ju, iu] = values
    return DistortionMatrix(cov)
