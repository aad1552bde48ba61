"""Small-leverage approximations to the rank distortion matrix."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InterceptMissing, InterceptMissingWarning
from .projection import HatMatrix, _check, contrast_matrix

SQRT3 = math.sqrt(3.0)


def _divisor(same: bool) -> float:
    # 2 sqrt(4 - delta_ij) pi
    return 2.0 * (SQRT3 if same else 2.0) * math.pi


def gaussian_density_constants() -> tuple[float, float]:
    """(sigma^2 (E f(eps))^2, sigma^2 E f(eps)^2) for Gaussian errors.

    Equal to 1/(4 pi) and 1/(2 sqrt(3) pi), independent of sigma.
    """
    return 1.0 / (4.0 * math.pi), 1.0 / (2.0 * SQRT3 * math.pi)


def approx_cov(hat: HatMatrix, i: int, j: int) -> float:
    """(n^2 H_ij - n) / (2 sqrt(4 - delta_ij) pi).

    Only meaningful when the design contains an intercept; otherwise an
    :class:`InterceptMissingWarning` is issued and the value returned anyway.
    """
    i0, j0 = _check(hat.n, i, j)
    if not hat.has_intercept:
        warnings.warn("H @ 1 != 1; approximation hypothesis fails", InterceptMissingWarning, 2)
    n = hat.n
    return (n * n * hat.entries[i0, j0] - n) / _divisor(i0 == j0)


def heuristic_cov(hat: HatMatrix, i: int, j: int) -> float:
    """n^2 H_ij / (2 sqrt(4 - delta_ij) pi), without the centring term."""
    i0, j0 = _check(hat.n, i, j)
    n = hat.n
    return n * n * hat.entries[i0, j0] / _divisor(i0 == j0)


def approx_matrix(hat: HatMatrix) -> np.ndarray:
    n = hat.n
    div = np.full((n, n), _divisor(False))
    np.fill_diagonal(div, _divisor(True))
    out = (n * n * hat.entries - n) / div
    return (out + out.T) / 2


def contrast_sum_identity(hat: HatMatrix, i: int, j: int) -> float:
    """Directly summed sum_{k,l} H_{kl,ij}; equals n^2 H_ij - n for intercept designs."""
    i0, j0 = _check(hat.n, i, j)
    if not hat.has_intercept:
        raise InterceptMissing("identity requires H @ 1 == 1")
    return math.fsum(contrast_matrix(hat, i0, j0).ravel())


class RmsLines(NamedTuple):
    with_intercept: np.ndarray
    raw: np.ndarray
    floored: np.ndarray


def rms_lines(hat: HatMatrix) -> RmsLines:
    """Per-index lines n sqrt((H_ii - 1/n) / (2 pi sqrt 3)) and n sqrt(H_ii / (2 pi sqrt 3)).

    A negative radicand (H_ii < 1/n) is floored at 0 and flagged in ``floored``.
    """
    n = hat.n
    lev = hat.leverages
    scale = 2.0 * math.pi * SQRT3
    rad = (lev - 1.0 / n) / scale
    floored = rad < 0
    line1 = n * np.sqrt(np.where(floored, 0.0, rad))
    line2 = n * np.sqrt(np.maximum(lev, 0.0) / scale)
    return RmsLines(line1, line2, floored)


@dataclass(frozen=True)
class ApproxReport:
    approx_cov: np.ndarray
    rms_with_intercept: np.ndarray
    rms_raw: np.ndarray
    floored: np.ndarray
    eta: float
    has_intercept: bool

    @property
    def n(self) -> int:
        return self.approx_cov.shape[0]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "eta": self.eta,
            "has_intercept": self.has_intercept,
            "approx_cov": self.approx_cov.tolist(),
            "rms_with_intercept": self.rms_with_intercept.tolist(),
            "rms_raw": self.rms_raw.tolist(),
            "floored": self.floored.tolist(),
        }


def approx_report(hat: HatMatrix) -> ApproxReport:
    lines = rms_lines(hat)
    return ApproxReport(
        approx_cov=approx_matrix(hat),
        rms_with_intercept=lines.with_intercept,
        rms_raw=lines.raw,
        floored=lines.floored,
        eta=hat.eta,
        has_intercept=hat.has_intercept,
    )
