"""Lagrangian frames: full-rank 2n x n matrices spanning Lagrangian subspaces.

Frames are orthonormalized on construction, which stabilizes every rank
decision downstream.  Two frames represent the same subspace iff their
intersection has full dimension n; equality of subspaces is always tested
that way, never through matrix equality.
"""

from __future__ import annotations

import numpy as np

from .linalg import DEFAULT_TOL, intersection_basis, orthonormal_columns
from .space import SymplecticSpace

__all__ = [
    "FrameError",
    "LagrangianFrame",
    "dirichlet",
    "neumann",
    "graph_of_symmetric",
    "diagonal",
    "product_frame",
    "graph_frame",
    "intersection_dim",
    "frame_from_json",
    "frame_to_json",
]


class FrameError(ValueError):
    """Raised when a matrix fails to define a Lagrangian frame."""


class LagrangianFrame:
    """An n-dimensional Lagrangian subspace of a 2n-dimensional space.

    ``z`` holds an orthonormal spanning matrix (2n x n).  Construction checks
    full rank and isotropy z^T J z = 0 at the relative tolerance ``tol``.
    Instances are immutable and safe to share between threads.
    """

    def __init__(self, z: np.ndarray, space: SymplecticSpace | None = None,
                 tol: float = DEFAULT_TOL):
        z = np.atleast_2d(np.asarray(z, dtype=float))
        if z.ndim != 2 or z.shape[0] % 2 != 0:
            raise FrameError(f"frame matrix must be 2n x n, got shape {z.shape}")
        if not np.all(np.isfinite(z)):
            raise FrameError("frame matrix has non-finite entries")
        n = z.shape[0] // 2
        if z.shape[1] != n:
            raise FrameError(
                f"frame matrix must be 2n x n, got shape {z.shape} (expected {2*n} x {n})")
        if space is None:
            space = SymplecticSpace(n)
        elif space.n != n:
            raise FrameError(f"frame of size {z.shape} does not live in {space!r}")

        q = orthonormal_columns(z, tol)
        if q.shape[1] != n:
            raise FrameError(f"frame matrix is rank deficient at tolerance {tol:g}")
        defect = np.abs(q.T @ space.j @ q).max()
        if defect > max(tol, 1e3 * np.finfo(float).eps):
            raise FrameError(
                f"frame is not isotropic: |Z^T J Z| = {defect:.3e} exceeds {tol:g}")
        q.setflags(write=False)
        self.z = q
        self.space = space
        self.tol = tol

    @property
    def n(self) -> int:
        return self.space.n

    def transform(self, m: np.ndarray) -> "LagrangianFrame":
        """The image subspace m . L (m must preserve the symplectic form)."""
        return LagrangianFrame(np.asarray(m, float) @ self.z, self.space, self.tol)

    def same_subspace(self, other: "LagrangianFrame", tol: float | None = None) -> bool:
        tol = self.tol if tol is None else tol
        return intersection_dim(self, other, tol) == self.n

    def contains(self, v: np.ndarray, tol: float | None = None) -> bool:
        tol = self.tol if tol is None else tol
        v = np.asarray(v, float)
        resid = v - self.z @ (self.z.T @ v)
        return float(np.linalg.norm(resid)) <= tol * max(1.0, float(np.linalg.norm(v)))

    def __repr__(self) -> str:
        return f"LagrangianFrame(n={self.n})"


def dirichlet(n: int) -> LagrangianFrame:
    """L_D = R^n x {0}: momenta free, positions zero."""
    z = np.vstack([np.eye(n), np.zeros((n, n))])
    return LagrangianFrame(z)


def neumann(n: int) -> LagrangianFrame:
    """L_N = {0} x R^n: momenta zero, positions free."""
    z = np.vstack([np.zeros((n, n)), np.eye(n)])
    return LagrangianFrame(z)


def graph_of_symmetric(a: np.ndarray) -> LagrangianFrame:
    """The Lagrangian {(p, A p)} for a symmetric matrix A."""
    a = np.atleast_2d(np.asarray(a, float))
    if not np.allclose(a, a.T, atol=1e-10 * max(1.0, np.abs(a).max())):
        raise FrameError("graph generator must be symmetric")
    n = a.shape[0]
    return LagrangianFrame(np.vstack([np.eye(n), a]))


def diagonal(n: int) -> LagrangianFrame:
    """The diagonal {(v, v)} in the twisted product of SymplecticSpace(n)."""
    space = SymplecticSpace(n).double()
    z = np.vstack([np.eye(2 * n), np.eye(2 * n)])
    return LagrangianFrame(z, space)


def product_frame(l1: LagrangianFrame, l2: LagrangianFrame) -> LagrangianFrame:
    """L1 x L2 as a Lagrangian of the twisted product (-omega) x omega."""
    if not l1.space.same_as(l2.space):
        raise FrameError("product factors live in different spaces")
    d = l1.space.dim
    z = np.zeros((2 * d, d))
    z[:d, : l1.n] = l1.z
    z[d:, l1.n :] = l2.z
    return LagrangianFrame(z, l1.space.double())


def graph_frame(m: np.ndarray, space: SymplecticSpace | None = None,
                tol: float = DEFAULT_TOL) -> LagrangianFrame:
    """The graph {(v, M v)} of a symplectic matrix, Lagrangian for (-omega) x omega."""
    m = np.atleast_2d(np.asarray(m, float))
    if m.shape[0] != m.shape[1] or m.shape[0] % 2 != 0:
        raise FrameError(f"graph generator must be 2n x 2n, got {m.shape}")
    if space is None:
        space = SymplecticSpace(m.shape[0] // 2)
    defect = np.abs(m.T @ space.j @ m - space.j).max()
    if defect > max(1e4 * tol, 1e-8):
        raise FrameError(f"matrix is not symplectic: |M^T J M - J| = {defect:.3e}")
    z = np.vstack([np.eye(m.shape[0]), m])
    return LagrangianFrame(z, space.double(), tol)


def intersection_dim(l1: LagrangianFrame, l2: LagrangianFrame,
                     tol: float | None = None) -> int:
    """dim(L1 ∩ L2) by a rank-revealing decomposition of the stacked frames."""
    if not l1.space.same_as(l2.space):
        raise FrameError("frames live in different symplectic spaces")
    tol = l1.tol if tol is None else tol
    return intersection_basis(l1.z, l2.z, tol).shape[1]


_NAMED = {"dirichlet": dirichlet, "neumann": neumann, "diagonal": diagonal}


def frame_from_json(obj, tol: float = DEFAULT_TOL) -> LagrangianFrame:
    """Build a frame from its JSON form.

    Accepted shapes: {"name": "dirichlet"|"neumann"|"diagonal", "n": k},
    {"matrix": [[...]], "n": k, "space": "standard"|"double"},
    {"graph_of": [[...]]} (symplectic matrix) and
    {"product_of": [frame, frame]}.
    """
    if isinstance(obj, str):
        obj = {"name": obj}
    if not isinstance(obj, dict):
        raise FrameError(f"cannot parse frame from {type(obj).__name__}")
    if "name" in obj:
        name = obj["name"]
        if name not in _NAMED:
            raise FrameError(f"unknown frame name {name!r}; expected one of {sorted(_NAMED)}")
        n = obj.get("n")
        if n is None:
            raise FrameError("named frames require an explicit 'n'")
        return _NAMED[name](int(n))
    if "graph_of" in obj:
        return graph_frame(np.asarray(obj["graph_of"], float), tol=tol)
    if "product_of" in obj:
        parts = obj["product_of"]
        if len(parts) != 2:
            raise FrameError("'product_of' expects exactly two frames")
        return product_frame(frame_from_json(parts[0], tol), frame_from_json(parts[1], tol))
    if "matrix" in obj:
        z = np.asarray(obj["matrix"], float)
        n = int(obj.get("n", z.shape[0] // 2 if z.ndim == 2 else 0))
        if obj.get("space", "standard") == "double":
            space = SymplecticSpace(n // 2).double() if n % 2 == 0 else None
            if space is None:
                raise FrameError("a double-space frame needs even 'n'")
        else:
            space = SymplecticSpace(n)
        return LagrangianFrame(z, space, tol)
    raise FrameError("frame JSON needs one of 'name', 'matrix', 'graph_of', 'product_of'")


def frame_to_json(frame: LagrangianFrame) -> dict:
    """Row-major matrix serialization with an explicit half-dimension."""
    return {"n": frame.n, "matrix": [[float(x) for x in row] for row in frame.z]}
