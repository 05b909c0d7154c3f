"""Rank-revealing subspace arithmetic with relative tolerances.

All subspaces are represented by matrices whose columns span them; every
routine uses SVD cutoffs relative to the largest singular value, so results
are scale invariant.
"""

from __future__ import annotations

import numpy as np

DEFAULT_TOL = 1e-9

__all__ = [
    "DEFAULT_TOL",
    "orthonormal_columns",
    "nullspace",
    "subspace_sum",
    "intersection_basis",
]


def orthonormal_columns(a: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the column space of ``a`` (SVD, relative cutoff)."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0 or a.shape[1] == 0:
        return np.zeros((a.shape[0], 0))
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[0], 0))
    r = int(np.sum(s > tol * s[0]))
    return u[:, :r]


def nullspace(a: np.ndarray, tol: float = DEFAULT_TOL,
              scale: float | None = 1.0) -> np.ndarray:
    """Orthonormal basis of ker(a), columns of the result.

    The rank cutoff is tol * max(sigma_max, scale); the default scale of 1
    is correct for matrices assembled from orthonormal factors (everything
    internal), where an all-tiny matrix must count as zero.  Pass scale=None
    for a purely relative cutoff on arbitrarily scaled input.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    u, s, vt = np.linalg.svd(a)
    if s.size == 0:
        return np.eye(a.shape[1])
    floor = s[0] if scale is None else max(s[0], scale)
    r = int(np.sum(s > tol * floor))
    return vt[r:].T


def subspace_sum(*mats: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the sum of the column spaces."""
    stacked = np.hstack([np.atleast_2d(np.asarray(m, float)) for m in mats])
    return orthonormal_columns(stacked, tol)


def intersection_basis(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of colspace(a) intersected with colspace(b).

    Uses the nullspace of the stacked frame [a, -b]: a pair (c, d) in the
    kernel means a c = b d, and a c is an intersection vector.
    """
    a = np.atleast_2d(np.asarray(a, float))
    b = np.atleast_2d(np.asarray(b, float))
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], 0))
    ker = nullspace(np.hstack([a, -b]), tol)
    if ker.shape[1] == 0:
        return np.zeros((a.shape[0], 0))
    vecs = a @ ker[: a.shape[1]]
    return orthonormal_columns(vecs, tol)
