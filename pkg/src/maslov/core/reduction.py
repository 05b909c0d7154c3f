"""Symplectic reduction modulo an isotropic subspace.

The reduced space of (V, omega) modulo an isotropic I is realized concretely
inside V as V_I = (J I)^perp ∩ I^perp, which is J-invariant and symplectic.
A Lagrangian L descends to the projection of L ∩ I^omega, a Lagrangian of
V_I.  We return reduced objects in standard coordinates through a symplectic
orthonormal basis (p_1..p_m, J p_1..J p_m) of V_I.
"""

from __future__ import annotations

import numpy as np

from .frames import FrameError, LagrangianFrame
from .linalg import DEFAULT_TOL, nullspace, orthonormal_columns
from .space import SymplecticSpace

__all__ = ["ReducedSpace", "reduction_basis", "symplectic_reduction"]


class ReducedSpace:
    """Adapter between V_I (columns of ``basis`` in the ambient space) and
    the standard symplectic space of half-dimension m."""

    def __init__(self, basis: np.ndarray, space: SymplecticSpace):
        self.basis = basis
        self.ambient = space
        m = basis.shape[1] // 2
        self.space = SymplecticSpace(m) if m > 0 else None

    @property
    def half_dim(self) -> int:
        return self.basis.shape[1] // 2

    def project_subspace(self, vectors: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
        """Coordinates in the adapted basis of the projection of ``vectors``."""
        return orthonormal_columns(self.basis.T @ vectors, tol)


def reduction_basis(iso: np.ndarray, space: SymplecticSpace,
                    tol: float = DEFAULT_TOL) -> ReducedSpace:
    """Adapted symplectic orthonormal basis of V_I for isotropic columns ``iso``.

    Pairs are built greedily: each new unit vector p orthogonal to the pairs
    found so far is matched with J p, which stays inside V_I because V_I is
    J-invariant.  In the resulting basis the restricted form is again the
    standard one.
    """
    iso = np.atleast_2d(np.asarray(iso, float))
    j = space.j
    i_basis = orthonormal_columns(iso, tol) if iso.shape[1] else np.zeros((space.dim, 0))
    if i_basis.shape[1]:
        defect = np.abs(i_basis.T @ j @ i_basis).max()
        if defect > max(tol, 1e-9):
            raise FrameError(f"subspace is not isotropic: defect {defect:.3e}")
    k = i_basis.shape[1]
    m = space.n - k
    if m == 0:
        return ReducedSpace(np.zeros((space.dim, 0)), space)

    # V_I = (J I)^perp ∩ I^perp: kernel of the stacked normal equations.
    normals = np.hstack([i_basis, j @ i_basis]) if k else np.zeros((space.dim, 0))
    vi = nullspace(normals.T, tol) if k else np.eye(space.dim)

    ps, qs = [], []
    for _ in range(m):
        taken = np.array(ps + qs).T if ps else np.zeros((space.dim, 0))
        cand = vi - taken @ (taken.T @ vi) if taken.shape[1] else vi
        norms = np.linalg.norm(cand, axis=0)
        p = cand[:, int(np.argmax(norms))]
        p = p / np.linalg.norm(p)
        ps.append(p)
        qs.append(j @ p)
    basis = np.column_stack(ps + qs)
    return ReducedSpace(basis, space)


def symplectic_reduction(iso: np.ndarray | LagrangianFrame, lag: LagrangianFrame,
                         tol: float = DEFAULT_TOL) -> LagrangianFrame | None:
    """Project a Lagrangian into the reduction modulo an isotropic subspace.

    Returns the reduced Lagrangian as a frame in the standard space of
    half-dimension n - dim(I), or None when I is itself Lagrangian and the
    reduced space is zero-dimensional.
    """
    if isinstance(iso, LagrangianFrame):
        iso_cols = iso.z
        space = iso.space
        if not space.same_as(lag.space):
            raise FrameError("isotropic subspace and Lagrangian live in different spaces")
    else:
        iso_cols = np.atleast_2d(np.asarray(iso, float))
        space = lag.space
    red = reduction_basis(iso_cols, space, tol)
    if red.half_dim == 0:
        return None
    # L ∩ I^omega, with I^omega = (J I)^perp.
    if iso_cols.shape[1]:
        ji = space.j @ orthonormal_columns(iso_cols, tol)
        coeff_ker = nullspace(ji.T @ lag.z, tol)
        meet = lag.z @ coeff_ker
    else:
        meet = lag.z
    coords = red.project_subspace(meet, tol)
    if coords.shape[1] != red.half_dim:
        raise FrameError(
            f"reduction produced a subspace of dimension {coords.shape[1]}, "
            f"expected {red.half_dim}")
    return LagrangianFrame(coords, red.space, tol)
