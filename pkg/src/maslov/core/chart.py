"""Quadratic forms attached to Lagrangian triples and the graph chart.

``chart_form(L0, L1, L)`` is the coordinate chart of the Lagrangian
Grassmannian at the decomposition (L0, L1): the symmetric form
omega(v, T v) on L0, where T: L0 -> L1 is the unique map whose graph is L.
Its kernel is L ∩ L0.

``triple_q_form(a, b, c)`` is the chart's extension to arbitrary triples: a
quadratic form on a ∩ (b + c) given by omega(v, v_c) for any splitting
v = v_b + v_c with v_b in b, v_c in c.  The splitting ambiguity lies in
b ∩ c = (b + c)^omega, so the value is well defined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import FrameError, LagrangianFrame, intersection_dim
from .linalg import DEFAULT_TOL, intersection_basis, subspace_sum

__all__ = ["QuadraticFormReport", "spectral_report", "chart_form", "triple_q_form"]

# Eigenvalues below this fraction of the spectral radius count as zero.
FORM_NULL_TOL = 1e-8


@dataclass(frozen=True)
class QuadraticFormReport:
    """Spectral data of a symmetric form: eigenvalues and inertia."""

    dim: int
    eigenvalues: tuple[float, ...]
    n_plus: int
    n_minus: int
    n_zero: int

    @property
    def signature(self) -> int:
        return self.n_plus - self.n_minus

    @property
    def coindex_extended(self) -> int:
        """Coindex plus nullity (the generalized coindex)."""
        return self.n_plus + self.n_zero

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "eigenvalues": list(self.eigenvalues),
            "index": self.n_minus,
            "coindex": self.n_plus,
            "nullity": self.n_zero,
            "signature": self.signature,
        }


def spectral_report(mat: np.ndarray, null_tol: float = FORM_NULL_TOL,
                    scale: float | None = None) -> QuadraticFormReport:
    """Inertia of a symmetric matrix with a relative zero threshold.

    ``scale`` optionally overrides the spectral radius used for the cutoff;
    forms expressed in orthonormal bases of unit-size problems pass None.
    """
    mat = np.atleast_2d(np.asarray(mat, float))
    if mat.size == 0:
        return QuadraticFormReport(0, (), 0, 0, 0)
    mat = 0.5 * (mat + mat.T)
    eig = np.linalg.eigvalsh(mat)
    radius = float(np.abs(eig).max()) if eig.size else 0.0
    cut = null_tol * max(radius, 1e-6 if scale is None else scale)
    n_plus = int(np.sum(eig > cut))
    n_minus = int(np.sum(eig < -cut))
    return QuadraticFormReport(
        dim=mat.shape[0],
        eigenvalues=tuple(float(x) for x in eig),
        n_plus=n_plus,
        n_minus=n_minus,
        n_zero=mat.shape[0] - n_plus - n_minus,
    )


def chart_form(l0: LagrangianFrame, l1: LagrangianFrame, l: LagrangianFrame,
               tol: float = DEFAULT_TOL) -> QuadraticFormReport:
    """Chart form of L at the Lagrangian decomposition (L0, L1).

    Requires L transverse to L1 and L0 transverse to L1.  The returned form
    is expressed in the orthonormal basis carried by ``l0``.
    """
    space = l0.space
    if not (space.same_as(l1.space) and space.same_as(l.space)):
        raise FrameError("chart arguments live in different spaces")
    if intersection_dim(l0, l1, tol) != 0:
        raise FrameError("(L0, L1) is not a Lagrangian decomposition")
    if intersection_dim(l, l1, tol) != 0:
        raise FrameError("L is not transverse to L1")

    n = space.n
    # Solve l.z c - l1.z d = v for every basis vector v of L0; then T v = l1.z d.
    lhs = np.hstack([l.z, -l1.z])
    sol, *_ = np.linalg.lstsq(lhs, l0.z, rcond=None)
    t_images = l1.z @ sol[n:]
    resid = np.abs(lhs @ sol - l0.z).max()
    if resid > 1e3 * tol:
        raise FrameError(f"graph map solve failed, residual {resid:.3e}")
    q = (space.j @ l0.z).T @ t_images
    return spectral_report(q)


def triple_q_form(a: LagrangianFrame, b: LagrangianFrame, c: LagrangianFrame,
                  tol: float = DEFAULT_TOL) -> QuadraticFormReport:
    """The chart form generalized to an arbitrary triple, on a ∩ (b + c)."""
    space = a.space
    if not (space.same_as(b.space) and space.same_as(c.space)):
        raise FrameError("triple arguments live in different spaces")
    bc = subspace_sum(b.z, c.z, tol=tol)
    dom = intersection_basis(a.z, bc, tol)
    if dom.shape[1] == 0:
        return QuadraticFormReport(0, (), 0, 0, 0)
    # Split each domain vector as v_b + v_c; omega(v, v_c) kills the ambiguity.
    lhs = np.hstack([b.z, c.z])
    sol, *_ = np.linalg.lstsq(lhs, dom, rcond=None)
    v_c = c.z @ sol[b.n :]
    q = (space.j @ dom).T @ v_c
    q = 0.5 * (q + q.T)
    return spectral_report(q)
