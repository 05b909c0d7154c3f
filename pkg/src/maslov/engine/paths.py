"""Continuously evaluable paths of Lagrangian subspaces.

A path carries a smooth (not re-orthonormalized) frame map t -> Z(t); the
smoothness matters because crossing detection tracks determinant signs.
Derivatives are analytic when the constructor supplies them and central
finite differences otherwise.

For paths of the form t -> psi(t) W with psi a symplectic flow solving
psi' = J B(t) psi, the derivative form Q(l, l')[w] reduces to <B(t) w, w>;
such paths carry B as their ``generator`` and the crossing machinery uses it
directly.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..core.frames import LagrangianFrame
from ..core.space import SymplecticSpace

__all__ = ["LagrangianPath", "constant_path", "principal_angle_gap"]


class LagrangianPath:
    """Map t -> Lagrangian frame on [a, b] with derivative access."""

    def __init__(self, frame_fn: Callable[[float], np.ndarray], interval,
                 space: SymplecticSpace,
                 derivative_fn: Callable[[float], np.ndarray] | None = None,
                 generator_fn: Callable[[float], np.ndarray] | None = None,
                 batch_fn: Callable[[np.ndarray], np.ndarray] | None = None,
                 fd_step: float | None = None):
        a, b = float(interval[0]), float(interval[1])
        if not b > a:
            raise ValueError(f"empty path interval [{a}, {b}]")
        self.interval = (a, b)
        self.space = space
        self._frame = frame_fn
        self._derivative = derivative_fn
        self._generator = generator_fn
        self._batch = batch_fn
        # Central-difference step for pointwise-only paths.
        self.fd_step = fd_step if fd_step is not None else 1e-6 * (b - a)

    # -- evaluation ---------------------------------------------------------

    def raw_frame(self, t: float) -> np.ndarray:
        return np.asarray(self._frame(float(t)), float)

    def frames(self, ts: np.ndarray) -> np.ndarray:
        """Stack of raw frames, shape (len(ts), 2n, n)."""
        ts = np.asarray(ts, float)
        if self._batch is not None:
            return np.asarray(self._batch(ts), float)
        return np.stack([self.raw_frame(t) for t in ts])

    def evaluate(self, t: float) -> LagrangianFrame:
        """Validated Lagrangian frame at t."""
        return LagrangianFrame(self.raw_frame(t), self.space)

    def derivative(self, t: float) -> np.ndarray:
        """d/dt of the frame map, same column parametrization as raw_frame."""
        if self._derivative is not None:
            return np.asarray(self._derivative(float(t)), float)
        a, b = self.interval
        h = self.fd_step
        lo, hi = max(a, t - h), min(b, t + h)
        return (self.raw_frame(hi) - self.raw_frame(lo)) / (hi - lo)

    def generator(self, t: float) -> np.ndarray | None:
        if self._generator is None:
            return None
        return np.asarray(self._generator(float(t)), float)

    # -- derivative form ----------------------------------------------------

    def derivative_form(self, t: float, vectors: np.ndarray) -> np.ndarray:
        """Matrix of Q(l(t), l'(t)) on the given columns of l(t).

        Q[v] = omega(v, z'(t)) for any curve z(s) in l(s) with z(t) = v; with
        frames, z(s) = Z(s) c and c = Z(t)^+ v.  When a symmetric generator
        B(t) is attached the form is <B(t) v, v> directly.
        """
        vectors = np.atleast_2d(np.asarray(vectors, float))
        gen = self.generator(t)
        if gen is not None:
            q = vectors.T @ gen @ vectors
            return 0.5 * (q + q.T)
        z = self.raw_frame(t)
        zdot = self.derivative(t)
        coeff, *_ = np.linalg.lstsq(z, vectors, rcond=None)
        q = (self.space.j @ vectors).T @ (zdot @ coeff)
        return 0.5 * (q + q.T)

    def derivative_scale(self, t: float) -> float:
        """Magnitude of the derivative form at t (0 for constant paths)."""
        gen = self.generator(t)
        if gen is not None:
            return float(np.linalg.norm(gen, 2))
        z = self.raw_frame(t)
        zdot = self.derivative(t)
        smin = np.linalg.svd(z, compute_uv=False)[-1]
        return float(np.linalg.norm(zdot, 2) / max(smin, 1e-300))

    # -- combinators --------------------------------------------------------

    def restricted(self, a: float, b: float) -> "LagrangianPath":
        lo, hi = self.interval
        if a < lo - 1e-12 * (hi - lo) or b > hi + 1e-12 * (hi - lo):
            raise ValueError(f"[{a}, {b}] is not a subinterval of [{lo}, {hi}]")
        return LagrangianPath(self._frame, (a, b), self.space,
                              derivative_fn=self._derivative,
                              generator_fn=self._generator,
                              batch_fn=self._batch,
                              fd_step=self.fd_step)

    def reparametrized(self, phi: Callable[[float], float],
                       dphi: Callable[[float], float], interval) -> "LagrangianPath":
        """The path s -> l(phi(s)) for a monotone phi onto this interval."""
        deriv = None
        if self._derivative is not None:
            deriv = lambda s: self._derivative(phi(s)) * dphi(s)
        gen = None
        if self._generator is not None:
            gen = lambda s: self._generator(phi(s)) * dphi(s)
        batch = None
        if self._batch is not None:
            batch = lambda ts: self._batch(np.asarray([phi(s) for s in np.asarray(ts, float)]))
        return LagrangianPath(lambda s: self._frame(phi(s)), interval, self.space,
                              derivative_fn=deriv, generator_fn=gen, batch_fn=batch)

    def transformed(self, phi_fn: Callable[[float], np.ndarray],
                    dphi_fn: Callable[[float], np.ndarray]) -> "LagrangianPath":
        """The path t -> Phi(t) l(t) for a smooth symplectic family Phi."""
        def frame(t):
            return phi_fn(t) @ self._frame(t)

        def deriv(t):
            return dphi_fn(t) @ self._frame(t) + phi_fn(t) @ self.derivative(t)

        return LagrangianPath(frame, self.interval, self.space, derivative_fn=deriv)

    def continuity_gaps(self, samples: int = 256) -> np.ndarray:
        """Largest principal-angle gap between adjacent samples (sanity check)."""
        ts = np.linspace(*self.interval, samples)
        frames = self.frames(ts)
        gaps = np.empty(samples - 1)
        for i in range(samples - 1):
            qa = np.linalg.qr(frames[i])[0]
            qb = np.linalg.qr(frames[i + 1])[0]
            s = np.linalg.svd(qa.T @ qb, compute_uv=False)
            gaps[i] = float(np.arccos(np.clip(s.min(), -1.0, 1.0)))
        return gaps


def constant_path(frame: LagrangianFrame, interval) -> LagrangianPath:
    z = frame.z
    zeros = np.zeros_like(z)
    return LagrangianPath(
        lambda t: z, interval, frame.space,
        derivative_fn=lambda t: zeros,
        generator_fn=lambda t: np.zeros((frame.space.dim, frame.space.dim)),
        batch_fn=lambda ts: np.broadcast_to(z, (len(ts),) + z.shape).copy(),
    )


def principal_angle_gap(f1: LagrangianFrame, f2: LagrangianFrame) -> float:
    """Largest principal angle between two Lagrangian subspaces."""
    s = np.linalg.svd(f1.z.T @ f2.z, compute_uv=False)
    return float(np.arccos(np.clip(s.min(), -1.0, 1.0)))
