"""Symmetric coefficient paths B(t) of linear Hamiltonian systems z' = J B(t) z.

Mechanical systems (Lagrangians quadratic in the velocity with unit mass)
produce B(t) = diag(Id, Hess V(x(t))): the momentum block of the Hessian of
the Hamiltonian is the identity and the mixed block vanishes.  Such paths
carry the ``mechanical`` flag, which additionally promises the brake
symmetry B(T/2 + t) = B(T/2 - t) on the path's own interval.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = ["CoefficientPath", "mechanical_coefficients", "sampled_table_coefficients",
           "piecewise_constant_coefficients"]


class CoefficientPath:
    """Continuously evaluable map t -> symmetric 2n x 2n matrix on [0, T]."""

    def __init__(self, fn: Callable[[float], np.ndarray], n: int, horizon: float,
                 mechanical: bool = False, constant: np.ndarray | None = None,
                 name: str = "", params: dict | None = None):
        if horizon <= 0:
            raise ValueError(f"horizon must be positive, got {horizon}")
        self.n = int(n)
        self.dim = 2 * self.n
        self.horizon = float(horizon)
        self.mechanical = bool(mechanical)
        self.name = name
        self.params = dict(params or {})
        self._fn = fn
        self.constant = None
        # Breakpoints and per-piece constant matrices, when the path is
        # piecewise constant (enables exact flow integration).
        self.pieces: tuple | None = None
        if constant is not None:
            constant = np.asarray(constant, float)
            _check_symmetric(constant, self.dim)
            constant.setflags(write=False)
            self.constant = constant

    def b(self, t: float) -> np.ndarray:
        if self.constant is not None:
            return self.constant
        return np.asarray(self._fn(float(t)), float)

    def __call__(self, t: float) -> np.ndarray:
        return self.b(t)

    def symmetry_defect(self, samples: int = 64) -> float:
        worst = 0.0
        for t in np.linspace(0.0, self.horizon, samples):
            b = self.b(t)
            worst = max(worst, float(np.abs(b - b.T).max()))
        return worst

    def brake_symmetry_defect(self, samples: int = 64) -> float:
        """max |B(T/2 + s) - B(T/2 - s)| over sampled s."""
        half = 0.5 * self.horizon
        worst = 0.0
        for s in np.linspace(0.0, half, samples):
            worst = max(worst, float(np.abs(self.b(half + s) - self.b(half - s)).max()))
        return worst

    def validate(self, tol: float = 1e-8, samples: int = 64):
        sym = self.symmetry_defect(samples)
        if sym > tol:
            raise ValueError(f"coefficient matrix is asymmetric: defect {sym:.3e}")
        if self.mechanical:
            brk = self.brake_symmetry_defect(samples)
            if brk > tol:
                raise ValueError(
                    f"mechanical flag set but brake symmetry fails: defect {brk:.3e}")
        return self


def _check_symmetric(b: np.ndarray, dim: int):
    if b.shape != (dim, dim):
        raise ValueError(f"coefficient matrix has shape {b.shape}, expected {(dim, dim)}")
    if np.abs(b - b.T).max() > 1e-8 * max(1.0, np.abs(b).max()):
        raise ValueError("coefficient matrix is not symmetric")


def mechanical_coefficients(hess_v, horizon: float, n: int | None = None) -> CoefficientPath:
    """B(t) = diag(Id, Hess V(x(t))) for a mechanical Lagrangian |v|^2/2 - V.

    ``hess_v`` is a symmetric n x n matrix (time independent Hessian) or a
    map t -> matrix.
    """
    if callable(hess_v):
        if n is None:
            n = np.asarray(hess_v(0.0), float).shape[0]

        def fn(t: float) -> np.ndarray:
            h = np.asarray(hess_v(t), float)
            if np.abs(h - h.T).max() > 1e-8 * max(1.0, np.abs(h).max()):
                raise ValueError(f"Hess V sample at t={t} is not symmetric")
            b = np.eye(2 * len(h))
            b[len(h):, len(h):] = h
            return b

        return CoefficientPath(fn, n, horizon, mechanical=True, name="mechanical")

    h = np.asarray(hess_v, float)
    n = h.shape[0]
    b = np.eye(2 * n)
    b[n:, n:] = h
    return CoefficientPath(lambda t: b, n, horizon, mechanical=True, constant=b,
                           name="mechanical")


def piecewise_constant_coefficients(breaks, mats, mechanical: bool = False) -> CoefficientPath:
    """Piecewise-constant B(t): mats[k] on [breaks[k], breaks[k+1])."""
    breaks = np.asarray(breaks, float)
    mats = [np.asarray(m, float) for m in mats]
    if len(breaks) != len(mats) + 1 or np.any(np.diff(breaks) <= 0):
        raise ValueError("need len(breaks) == len(mats) + 1 with increasing breaks")
    if breaks[0] != 0.0:
        raise ValueError("pieces must start at t = 0")
    dim = mats[0].shape[0]
    for m in mats:
        _check_symmetric(m, dim)

    def fn(t: float) -> np.ndarray:
        k = int(np.searchsorted(breaks, t, side="right")) - 1
        return mats[min(max(k, 0), len(mats) - 1)]

    path = CoefficientPath(fn, dim // 2, float(breaks[-1]), mechanical=mechanical,
                           name="piecewise")
    path.pieces = (breaks.copy(), tuple(mats))
    return path


def sampled_table_coefficients(ts, mats, mechanical: bool = False) -> CoefficientPath:
    """Piecewise-linear interpolation of a sampled coefficient table."""
    ts = np.asarray(ts, float)
    mats = np.asarray(mats, float)
    if ts.ndim != 1 or len(ts) < 2 or np.any(np.diff(ts) <= 0):
        raise ValueError("sample instants must be strictly increasing, length >= 2")
    if mats.shape[0] != len(ts) or mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise ValueError(f"need one square matrix per instant, got shape {mats.shape}")
    if ts[0] != 0.0:
        raise ValueError("sample table must start at t = 0")
    n = mats.shape[1] // 2

    def fn(t: float) -> np.ndarray:
        t = min(max(t, ts[0]), ts[-1])
        k = int(np.searchsorted(ts, t, side="right")) - 1
        k = min(k, len(ts) - 2)
        w = (t - ts[k]) / (ts[k + 1] - ts[k])
        return (1 - w) * mats[k] + w * mats[k + 1]

    return CoefficientPath(fn, n, float(ts[-1]), mechanical=mechanical, name="table")
