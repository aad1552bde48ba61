"""Design matrices: polynomial builders, equispaced grids and CSV ingestion."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import InvalidCount, InvalidRange, IoError, ParseError, RankDeficient

RANK_RTOL = 1e-10


def effective_rank(entries: np.ndarray) -> int:
    """Rank of a matrix after scaling its columns to unit Euclidean norm.

    Uses a column-pivoted QR and counts diagonal entries of R whose magnitude
    exceeds ``RANK_RTOL`` times the largest one.
    """
    a = np.asarray(entries, dtype=float)
    norms = np.linalg.norm(a, axis=0)
    if np.any(norms == 0.0):
        norms = np.where(norms == 0.0, 1.0, norms)
    r = scipy.linalg.qr(a / norms, mode="r", pivoting=True)[0]
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0:
        return 0
    return int(np.count_nonzero(diag > RANK_RTOL * diag[0]))


@dataclass(frozen=True)
class DesignMatrix:
    """An n x p design matrix of full column rank with p < n."""

    entries: np.ndarray
    column_labels: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim == 1:
            a = a[:, None]
        if a.ndim != 2:
            raise InvalidCount(f"design must be two-dimensional, got shape {a.shape}")
        n, p = a.shape
        if p < 1 or p >= n:
            raise InvalidCount(f"need 1 <= p < n, got n={n}, p={p}")
        if not np.all(np.isfinite(a)):
            raise ParseError("design contains non-finite entries")
        if self.column_labels is not None:
            labels = tuple(str(s) for s in self.column_labels)
            if len(labels) != p:
                raise ParseError(f"{len(labels)} labels for {p} columns")
            object.__setattr__(self, "column_labels", labels)
        rank = effective_rank(a)
        if rank < p:
            raise RankDeficient(f"effective rank {rank} < p = {p}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def p(self) -> int:
        return self.entries.shape[1]


def equispaced(n: int, a: float, b: float) -> np.ndarray:
    """Return ``n`` equally spaced points from ``a`` to ``b`` inclusive."""
    if n < 2:
        raise InvalidCount(f"n must be >= 2, got {n}")
    if not a < b:
        raise InvalidRange(f"need a < b, got a={a}, b={b}")
    i = np.arange(n, dtype=float)
    x = a + i * ((b - a) / (n - 1))
    x[-1] = b
    return x


def polynomial_design(x, degree: int) -> DesignMatrix:
    """Monomial design with columns 1, x, x**2, ..., x**degree (raw, uncentred)."""
    x = np.asarray(x, dtype=float).ravel()
    if degree < 0:
        raise InvalidCount(f"degree must be >= 0, got {degree}")
    p = degree + 1
    if p >= x.size:
        raise InvalidCount(f"need degree + 1 < n, got p={p}, n={x.size}")
    if np.unique(x).size < p:
        raise RankDeficient(f"need at least {p} distinct x values")
    cols = [np.ones_like(x)]
    for _ in range(degree):
        cols.append(cols[-1] * x)
    labels = tuple("1" if j == 0 else ("x" if j == 1 else f"x^{j}") for j in range(p))
    return DesignMatrix(np.column_stack(cols), labels)


def _parse_row(row: list[str], lineno: int) -> list[float]:
    try:
        return [float(cell) for cell in row]
    except ValueError as exc:
        raise ParseError(f"line {lineno}: non-numeric cell ({exc})") from None


def parse_csv(text: str) -> tuple[np.ndarray, tuple[str, ...] | None]:
    """Parse a comma-separated numeric matrix, auto-detecting a header row."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty CSV")
    labels = None
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        labels = tuple(c.strip() for c in rows[0])
        rows = rows[1:]
    if not rows:
        raise ParseError("CSV has a header but no data rows")
    width = len(rows[0])
    body = []
    for lineno, row in enumerate(rows, start=2 if labels else 1):
        if len(row) != width:
            raise ParseError(f"line {lineno}: expected {width} cells, got {len(row)} (ragged rows)")
        body.append(_parse_row(row, lineno))
    if labels is not None and len(labels) != width:
        raise ParseError(f"header has {len(labels)} cells, body has {width}")
    return np.array(body, dtype=float), labels


def load_csv(path) -> DesignMatrix:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    entries, labels = parse_csv(text)
    return DesignMatrix(entries, labels)


def format_csv(matrix, labels=None) -> str:
    """Render a real matrix in the package's CSV dialect.

    Floats are written with ``repr`` so that :func:`parse_csv` reproduces them
    bit for bit.
    """
    a = np.atleast_2d(np.asarray(matrix, dtype=float))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if labels is not None:
        writer.writerow(labels)
    for row in a:
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def save_csv(design: DesignMatrix, path) -> None:
    try:
        Path(path).write_text(format_csv(design.entries, design.column_labels), encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
