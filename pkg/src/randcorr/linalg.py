"""Cholesky factorization and log-determinants of correlation matrices.

Matrices are plain ``numpy`` arrays of shape ``(..., d, d)``; any leading
axes are treated as a batch and processed together.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "NotPositiveDefinite",
    "PIVOT_TOLERANCE",
    "check_correlation_matrix",
    "cholesky",
    "cholesky_log_det",
    "is_positive_definite",
]

PIVOT_TOLERANCE = 1e-12


class NotPositiveDefinite(np.linalg.LinAlgError):
    """Raised when a Cholesky pivot falls to or below ``PIVOT_TOLERANCE``."""


def check_correlation_matrix(R, atol=1e-12):
    """Validate shape, symmetry and unit diagonal; return ``R`` as floats."""
    R = np.asarray(R, dtype=float)
    if R.ndim < 2 or R.shape[-1] != R.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {R.shape}")
    if R.shape[-1] < 1:
        raise ValueError("empty matrix")
    if not np.allclose(np.diagonal(R, axis1=-2, axis2=-1), 1.0, rtol=0, atol=atol):
        raise ValueError("correlation matrix must have a unit diagonal")
    if not np.allclose(R, np.swapaxes(R, -1, -2), rtol=0, atol=atol):
        raise ValueError("correlation matrix must be symmetric")
    return R


def _factor(R):
    """Lower Cholesky factor and a mask of batch entries that failed."""
    d = R.shape[-1]
    L = np.zeros_like(R)
    failed = np.zeros(R.shape[:-2], dtype=bool)
    for j in range(d):
        # squared pivot
        piv = R[..., j, j] - np.sum(L[..., j, :j] ** 2, axis=-1)
        failed |= ~(piv > PIVOT_TOLERANCE)
        ljj = np.sqrt(np.where(failed, 1.0, piv))
        L[..., j, j] = ljj
        if j + 1 < d:
            col = R[..., j + 1:, j] - np.einsum("...ik,...k->...i", L[..., j + 1:, :j], L[..., j, :j])
            L[..., j + 1:, j] = col / ljj[..., None]
    return L, failed


def cholesky(R):
    """Lower-triangular ``L`` with ``L @ L.T == R``.

    Raises
    ------
    NotPositiveDefinite
        If any squared pivot is ``<= PIVOT_TOLERANCE``.
    """
    R = check_correlation_matrix(R)
    L, failed = _factor(R)
    if np.any(failed):
        raise NotPositiveDefinite("matrix is not positive definite")
    return L


def cholesky_log_det(R):
    """``ln det R`` as ``2 * sum(ln L_ii)``; batched over leading axes."""
    L = cholesky(R)
    out = 2.0 * np.sum(np.log(np.diagonal(L, axis1=-2, axis2=-1)), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def is_positive_definite(R):
    """True where the Cholesky factorization succeeds (array for batches)."""
    R = check_correlation_matrix(R)
    _, failed = _factor(R)
    ok = ~failed
    return bool(ok) if np.ndim(ok) == 0 else ok
