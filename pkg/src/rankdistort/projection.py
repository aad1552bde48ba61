"""Hat matrix of a design and the index contrasts built from it.

All public index arguments are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .design import RANK_RTOL, DesignMatrix
from .errors import IndexOutOfRange, RankDeficient, SameIndex

TIE_TOL = 1e-10


@dataclass(frozen=True)
class HatMatrix:
    """Orthogonal projection onto the column space of a design."""

    entries: np.ndarray
    p: int

    def __post_init__(self):
        h = np.array(self.entries, dtype=float)
        h = (h + h.T) / 2
        h.setflags(write=False)
        object.__setattr__(self, "entries", h)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def leverages(self) -> np.ndarray:
        lev = np.diag(self.entries).copy()
        lev.setflags(write=False)
        return lev

    @property
    def eta(self) -> float:
        """Largest leverage."""
        return float(self.leverages.max())

    @cached_property
    def has_intercept(self) -> bool:
        """Whether ``H @ 1 == 1`` to within 1e-9 per entry."""
        return bool(np.all(np.abs(self.entries.sum(axis=1) - 1.0) <= 1e-9))

    @cached_property
    def tie_pairs(self) -> tuple[tuple[int, int], ...]:
        """All 1-based pairs ``i < j`` satisfying :func:`tie_condition`."""
        h = self.entries
        lev = self.leverages
        cond = (np.abs(lev[:, None] - lev[None, :]) <= TIE_TOL) & (
            np.abs(lev[:, None] - h - 1.0) <= TIE_TOL
        )
        ii, jj = np.nonzero(np.triu(cond, k=1))
        return tuple((int(i) + 1, int(j) + 1) for i, j in zip(ii, jj))


def compute_hat_matrix(design: DesignMatrix) -> HatMatrix:
    """H = Q Q^T with Q an orthonormal basis of the column space of ``design``."""
    d = design.entries if isinstance(design, DesignMatrix) else DesignMatrix(design).entries
    q, r = np.linalg.qr(d / np.linalg.norm(d, axis=0))
    diag = np.abs(np.diag(r))
    if np.any(diag <= RANK_RTOL * diag.max()):
        raise RankDeficient("design is numerically rank deficient")
    return HatMatrix(q @ q.T, d.shape[1])


def _check(n: int, *indices: int) -> list[int]:
    out = []
    for idx in indices:
        if not 1 <= idx <= n:
            raise IndexOutOfRange(f"index {idx} outside 1..{n}")
        out.append(int(idx) - 1)
    return out


def kronecker(s: int, t: int) -> int:
    return 1 if s == t else 0


def delta(k: int, l: int, i: int, j: int, n: int | None = None) -> int:
    """Integer contrast delta_kl + delta_ij - delta_kj - delta_il."""
    if n is not None:
        _check(n, k, l, i, j)
    elif min(k, l, i, j) < 1:
        raise IndexOutOfRange("indices are 1-based")
    return kronecker(k, l) + kronecker(i, j) - kronecker(k, j) - kronecker(i, l)


def h_contrast(hat: HatMatrix, k: int, l: int, i: int, j: int) -> float:
    """H_kl + H_ij - H_kj - H_il, i.e. (e_k - e_i)^T H (e_l - e_j)."""
    k0, l0, i0, j0 = _check(hat.n, k, l, i, j)
    h = hat.entries
    # grouping makes k == i give exactly 0 and keeps the (k,l,i,j) <-> (l,k,j,i) symmetry exact
    return float((h[k0, l0] + h[i0, j0]) - (h[k0, j0] + h[i0, l0]))


def contrast_matrix(hat: HatMatrix, i0: int, j0: int) -> np.ndarray:
    """All H-contrasts for fixed 0-based (i, j); entry (k, l) is H_{kl,ij}."""
    h = hat.entries
    return (h + h[i0, j0]) - (h[:, j0][:, None] + h[i0, :][None, :])


def delta_matrix(n: int, i0: int, j0: int) -> np.ndarray:
    """All integer contrasts Delta_{kl,ij} for fixed 0-based (i, j)."""
    idx = np.arange(n)
    return (
        np.eye(n)
        + float(i0 == j0)
        - (idx == j0)[:, None].astype(float)
        - (idx == i0)[None, :].astype(float)
    )


def tie_condition(hat: HatMatrix, i: int, j: int) -> bool:
    """True iff residuals i and j coincide almost surely."""
    if i == j:
        raise SameIndex(f"need i != j, got {i}")
    i0, j0 = _check(hat.n, i, j)
    h = hat.entries
    return bool(
        abs(h[i0, i0] - h[j0, j0]) <= TIE_TOL and abs(h[i0, i0] - h[i0, j0] - 1.0) <= TIE_TOL
    )


@dataclass(frozen=True)
class TieReport:
    high_leverage: tuple[int, ...]
    tie_pairs: tuple[tuple[int, int], ...]

    @property
    def sufficient(self) -> bool:
        """At most one leverage is >= 1/2."""
        return len(self.high_leverage) <= 1

    @property
    def pairwise(self) -> bool:
        """No pair of indices meets the tie condition."""
        return not self.tie_pairs

    @property
    def tie_free(self) -> bool:
        return self.sufficient or self.pairwise


def tie_report(hat: HatMatrix) -> TieReport:
    high = tuple(int(i) + 1 for i in np.nonzero(hat.leverages >= 0.5 - TIE_TOL)[0])
    return TieReport(high, hat.tie_pairs)


def tie_free(hat: HatMatrix) -> bool:
    return tie_report(hat).tie_free
