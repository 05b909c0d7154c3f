"""Standard symplectic vector spaces (R^2n, omega0) and their twisted products.

Conventions fixed once for the whole package:

* coordinates split as (momentum block, position block),
* J = [[0, -Id], [Id, 0]],
* omega(v, w) = <J v, w>,
* the Dirichlet Lagrangian L_D = R^n x {0} is the first block (the fiber,
  positions vanish), the Neumann Lagrangian L_N = {0} x R^n the second.

The twisted product carries (-omega) x omega, so graphs of symplectic
matrices are Lagrangian there.
"""

from __future__ import annotations

import numpy as np

__all__ = ["SymplecticSpace", "standard_j"]


def standard_j(n: int) -> np.ndarray:
    """The 2n x 2n matrix [[0, -Id], [Id, 0]]."""
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = -np.eye(n)
    j[n:, :n] = np.eye(n)
    return j


class SymplecticSpace:
    """A 2n-dimensional real symplectic space with a fixed complex structure J.

    ``J`` must satisfy J^2 = -Id and J^T = -J (hence J is orthogonal); the
    symplectic form is omega(v, w) = <J v, w>.  The default is the standard
    structure; :meth:`double` builds the twisted product used for graphs.
    """

    def __init__(self, n: int, j: np.ndarray | None = None):
        if n < 1:
            raise ValueError(f"half-dimension must be positive, got {n}")
        self.n = int(n)
        self.dim = 2 * self.n
        if j is None:
            j = standard_j(self.n)
        j = np.asarray(j, dtype=float)
        if j.shape != (self.dim, self.dim):
            raise ValueError(f"J has shape {j.shape}, expected {(self.dim, self.dim)}")
        if not np.allclose(j @ j, -np.eye(self.dim), atol=1e-12):
            raise ValueError("J^2 != -Id")
        if not np.allclose(j.T, -j, atol=1e-12):
            raise ValueError("J is not antisymmetric")
        j.setflags(write=False)
        self.j = j

    def omega(self, v: np.ndarray, w: np.ndarray) -> float:
        """omega(v, w) = <J v, w>."""
        return float(np.dot(self.j @ np.asarray(v, float), np.asarray(w, float)))

    def gram(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Pairing matrix omega(a_i, b_j) for column collections a, b."""
        return (self.j @ a).T @ b

    def double(self) -> "SymplecticSpace":
        """The product space (R^2n x R^2n, -omega x omega), half-dimension 2n."""
        jd = np.zeros((2 * self.dim, 2 * self.dim))
        jd[: self.dim, : self.dim] = -self.j
        jd[self.dim :, self.dim :] = self.j
        return SymplecticSpace(2 * self.n, jd)

    def is_standard(self) -> bool:
        return np.array_equal(self.j, standard_j(self.n))

    def same_as(self, other: "SymplecticSpace") -> bool:
        return self.n == other.n and np.allclose(self.j, other.j, atol=1e-12)

    def __repr__(self) -> str:
        kind = "standard" if self.is_standard() else "twisted"
        return f"SymplecticSpace(n={self.n}, {kind})"
