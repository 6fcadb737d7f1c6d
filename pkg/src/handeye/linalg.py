"""Small dense linear-algebra helpers.

``vec`` is row-major: the entries of a matrix are read one row after the
other. With that convention ``vec(C @ D @ E) == kron(C, E.T) @ vec(D)``,
which is the identity every linear system in :mod:`handeye.solvers` is
built from.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from handeye.errors import DegeneracyError, DimensionError

DEFAULT_RANK_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class NullSpaceResult:
    """Right null space of a matrix as found by the SVD.

    ``basis`` holds one unit vector per row; ``singular_values`` are in
    non-increasing order.
    """

    basis: np.ndarray
    singular_values: np.ndarray
    numerical_rank: int

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]


def as_matrix(m, *, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError(f"{name} has non-finite entries")
    return arr


def vec(m) -> np.ndarray:
    """Stack the rows of ``m`` into a single vector."""
    return as_matrix(m).reshape(-1).copy()


def unvec(v, rows: int, cols: int) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size != rows * cols:
        raise DimensionError(f"cannot reshape vector of length {v.size} to {rows}x{cols}")
    return v.reshape(rows, cols).copy()


def kron(m, n) -> np.ndarray:
    """Kronecker product; block ``(i, j)`` of the result is ``m[i, j] * n``."""
    return np.kron(as_matrix(m), as_matrix(n))


def null_space(m, rank_tol: float = DEFAULT_RANK_TOL) -> NullSpaceResult:
    """Right null space of ``m``.

    A singular value counts toward the rank when it exceeds
    ``rank_tol * sigma_max``. An all-zero matrix has a full null space.
    """
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    a = as_matrix(m)
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.count_nonzero(s > rank_tol * smax)) if smax > 0 else 0
    return NullSpaceResult(basis=vt[rank:].copy(), singular_values=s, numerical_rank=rank)


def gap_ratio(singular_values, rank: int) -> float:
    """``sigma[rank-1] / sigma[rank]``; ``inf`` when the trailing value is zero.

    Singular values missing past the end of the array (wide matrices) count
    as zero.
    """
    s = np.asarray(singular_values, dtype=float)
    if rank <= 0:
        return 0.0
    hi = s[rank - 1]
    lo = s[rank] if rank < s.size else 0.0
    return float("inf") if lo == 0.0 else float(hi / lo)


def nearest_rotation(m) -> np.ndarray:
    """Closest rotation to ``m`` in the Frobenius norm (SVD polar factor).

    When the orthogonal factor would be a reflection, the sign of the
    direction with the smallest singular value is flipped.
    """
    a = as_matrix(m)
    if a.shape != (3, 3):
        raise DimensionError(f"expected 3x3, got {a.shape}")
    u, s, vt = np.linalg.svd(a)
    if s[0] == 0.0 or s[2] <= 1e-12 * s[0]:
        raise DegeneracyError("cannot project a singular matrix onto SO(3)")
    d = np.sign(np.linalg.det(u @ vt))
    return u @ np.diag([1.0, 1.0, d]) @ vt
