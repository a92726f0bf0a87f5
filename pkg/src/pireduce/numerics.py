"""Small linear-algebra kernel.

Two regimes, deliberately separate: exact rational elimination for the
group-exponent systems (where correctness is a strict equality), and 64-bit
float routines (PCA, ridge) where numerical tolerance is natural. The float
side leans on numpy/LAPACK; the exact side is hand-rolled over
:class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import SingularSystemError

RationalLike = int | str | Fraction


def _frac(value: RationalLike) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


@dataclass(frozen=True)
class RationalMatrix:
    """Dense matrix of exact rationals, row-major."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise ValueError("matrix dimensions must be positive")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[RationalLike]]) -> "RationalMatrix":
        nrows = len(rows)
        if nrows == 0:
            raise ValueError("matrix must have at least one row")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(nrows, ncols, tuple(_frac(v) for row in rows for v in row))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls.from_rows(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        )

    def at(self, i: int, j: int) -> Fraction:
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[Fraction]]:
        return [
            list(self.entries[i * self.cols : (i + 1) * self.cols])
            for i in range(self.rows)
        ]

    def matvec(self, x: Sequence[RationalLike]) -> list[Fraction]:
        if len(x) != self.cols:
            raise ValueError("vector length does not match matrix columns")
        xs = [_frac(v) for v in x]
        return [
            sum((self.at(i, j) * xs[j] for j in range(self.cols)), Fraction(0))
            for i in range(self.rows)
        ]


def _coerce_matrix(A) -> RationalMatrix:
    return A if isinstance(A, RationalMatrix) else RationalMatrix.from_rows(A)


def solve_exact(A, b: Sequence[RationalLike]) -> list[Fraction]:
    """Solve A·x = b exactly for square nonsingular rational A.

    Raises :class:`SingularSystemError` when no pivot can be found, which in
    the dimensional-analysis setting means the chosen base subset does not
    span the dimensions.
    """
    M = _coerce_matrix(A)
    if M.rows != M.cols:
        raise ValueError(f"matrix must be square, got {M.rows}x{M.cols}")
    rhs = [_frac(v) for v in b]
    if len(rhs) != M.rows:
        raise ValueError("right-hand side length does not match matrix")

    n = M.rows
    aug = [row + [rhs[i]] for i, row in enumerate(M.to_rows())]
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot_row is None:
            raise SingularSystemError(
                f"singular system: no pivot in column {col}"
            )
        if pivot_row != col:
            aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        pivot = aug[col][col]
        for r in range(col + 1, n):
            factor = aug[r][col] / pivot
            if factor != 0:
                aug[r] = [rv - factor * cv for rv, cv in zip(aug[r], aug[col])]

    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = aug[i][n] - sum(
            (aug[i][j] * x[j] for j in range(i + 1, n)), Fraction(0)
        )
        x[i] = acc / aug[i][i]
    return x


def rank_exact(A) -> int:
    """Exact rank via Gaussian elimination over the rationals."""
    M = _coerce_matrix(A)
    work = M.to_rows()
    rank = 0
    row = 0
    for col in range(M.cols):
        pivot_row = next((r for r in range(row, M.rows) if work[r][col] != 0), None)
        if pivot_row is None:
            continue
        work[row], work[pivot_row] = work[pivot_row], work[row]
        pivot = work[row][col]
        for r in range(row + 1, M.rows):
            factor = work[r][col] / pivot
            if factor != 0:
                work[r] = [rv - factor * cv for rv, cv in zip(work[r], work[row])]
        rank += 1
        row += 1
        if row == M.rows:
            break
    return rank


def _check_finite(arr: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite values")
    return arr


def pca_fit(X, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Principal components of mean-centered X.

    Returns (components, means, explained_variance): `components` has k
    orthonormal rows ordered by descending explained variance; projection of
    new data is (X - means) @ components.T. Row signs are fixed so the
    entry of largest magnitude in each component is positive, which makes
    the decomposition deterministic.
    """
    X = _check_finite(X, "pca input")
    if X.ndim != 2:
        raise ValueError("pca input must be 2-D")
    n, d = X.shape
    if n < 2:
        raise ValueError("pca needs at least 2 rows")
    if k > d:
        raise ValueError(f"k={k} exceeds number of columns {d}")
    means = X.mean(axis=0)
    centered = X - means
    cov = centered.T @ centered / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order][:k]
    components = eigvecs[:, order][:, :k].T
    for i in range(components.shape[0]):
        lead = np.argmax(np.abs(components[i]))
        if components[i, lead] < 0:
            components[i] = -components[i]
    return components, means, np.maximum(eigvals, 0.0)


def ridge_solve(X, y, lam: float, intercept_col: int = 0) -> np.ndarray:
    """Ridge coefficients via the normal equations.

    X must already include an intercept column (`intercept_col`), which is
    excluded from the penalty; lam=0 reduces to ordinary least squares.
    """
    X = _check_finite(X, "design matrix")
    y = _check_finite(y, "target")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError("design matrix and target shapes do not match")
    d = X.shape[1]
    penalty = np.eye(d) * lam
    if 0 <= intercept_col < d:
        penalty[intercept_col, intercept_col] = 0.0
    return np.linalg.solve(X.T @ X + penalty, X.T @ y)
