"""Fundamental solutions of z' = J B(t) z and the Lagrangian paths they drive.

Constant coefficients are integrated exactly through the matrix exponential
(cached eigendecomposition when B is diagonalizable, scipy.linalg.expm
otherwise).  Time-dependent coefficients use an embedded Dormand-Prince 5(4)
stepper with two extra safeguards the index computations rely on:

* the symplectic defect |Psi^T J Psi - J| is monitored at every accepted
  step, and a polar-type correction Psi <- Psi (Id + J E / 2) with
  E = Psi^T J Psi - J is iterated whenever it exceeds a tenth of the target
  (the correction cancels the defect to first order and converges fast);
* the step size is capped so that the cubic Hermite dense output (knot
  values plus the exact ODE derivatives) matches the integration accuracy.

Evaluation after construction is pure; instances are safe to share.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from ..core.frames import LagrangianFrame
from ..core.space import SymplecticSpace, standard_j
from ..engine.errors import IntegrationError
from ..engine.paths import LagrangianPath
from .coefficients import CoefficientPath

__all__ = ["FundamentalSolution", "fundamental_solution", "act_on", "graph_path",
           "focal_frame"]

# Dormand-Prince 5(4) tableau.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
                   187 / 2100, 1 / 40])


def _symplectic_project(psi: np.ndarray, j: np.ndarray, target: float) -> np.ndarray:
    for _ in range(8):
        defect = psi.T @ j @ psi - j
        if np.abs(defect).max() <= target:
            break
        psi = psi @ (np.eye(len(j)) + 0.5 * (j @ defect))
    return psi


class FundamentalSolution:
    """Symplectic path psi with psi(a) = Id solving Psi' = J B(t) Psi."""

    def __init__(self, coefficients: CoefficientPath, interval, backend: dict):
        self.coefficients = coefficients
        self.interval = (float(interval[0]), float(interval[1]))
        self.space = SymplecticSpace(coefficients.n)
        self._backend = backend
        self.stats = backend["stats"]

    # -- evaluation ---------------------------------------------------------

    def psi(self, t: float) -> np.ndarray:
        a, b = self.interval
        t = float(t)
        if t < a - 1e-9 * (b - a) or t > b + 1e-9 * (b - a):
            raise ValueError(f"t={t} outside the integration interval [{a}, {b}]")
        return self._backend["eval"](min(max(t, a), b))

    def __call__(self, t: float) -> np.ndarray:
        return self.psi(t)

    def psi_batch(self, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, float)
        batch = self._backend.get("eval_batch")
        if batch is not None:
            return batch(ts)
        return np.stack([self.psi(t) for t in ts])

    def derivative(self, t: float) -> np.ndarray:
        """Psi'(t) = J B(t) Psi(t), exact given the evaluated Psi."""
        return self.space.j @ self.coefficients.b(t) @ self.psi(t)

    def inverse_at(self, t: float) -> np.ndarray:
        m = self.psi(t)
        j = self.space.j
        return -j @ m.T @ j

    # -- diagnostics ---------------------------------------------------------

    def defect(self, t: float) -> float:
        m = self.psi(t)
        j = self.space.j
        return float(np.abs(m.T @ j @ m - j).max())

    def max_defect(self, samples: int = 100) -> float:
        ts = np.linspace(*self.interval, samples)
        return max(self.defect(t) for t in ts)


def _constant_backend(k: np.ndarray, a: float) -> dict:
    use_eig = False
    try:
        w, v = np.linalg.eig(k)
        v_inv = np.linalg.inv(v)
        recon = (v * w) @ v_inv
        use_eig = (np.linalg.cond(v) < 1e10
                   and np.abs(recon - k).max() <= 1e-12 * (np.abs(k).max() + 1.0))
    except np.linalg.LinAlgError:
        pass

    if use_eig:
        def ev(t: float) -> np.ndarray:
            return ((v * np.exp(w * (t - a))) @ v_inv).real

        def ev_batch(ts: np.ndarray) -> np.ndarray:
            phases = np.exp(np.multiply.outer(np.asarray(ts, float) - a, w))
            return np.einsum("ij,tj,jk->tik", v, phases, v_inv).real
    else:
        def ev(t: float) -> np.ndarray:
            return expm((t - a) * k)

        def ev_batch(ts: np.ndarray) -> np.ndarray:
            return np.stack([expm((t - a) * k) for t in np.asarray(ts, float)])

    stats = {"method": "matrix-exponential", "steps": 0, "max_step_defect": 0.0,
             "projections": 0}
    return {"eval": ev, "eval_batch": ev_batch, "stats": stats}


def _piecewise_backend(coeffs: CoefficientPath, a: float, b: float) -> dict:
    """Exact products of matrix exponentials over constant pieces."""
    breaks, mats = coeffs.pieces
    j = standard_j(coeffs.n)
    knots = [t for t in breaks if a < t < b]
    grid = [a] + knots + [b]
    gens = []
    psis = [np.eye(2 * coeffs.n)]
    for lo, hi in zip(grid, grid[1:]):
        k = j @ coeffs.b(0.5 * (lo + hi))
        gens.append(k)
        psis.append(expm((hi - lo) * k) @ psis[-1])
    grid_arr = np.asarray(grid)

    def ev(t: float) -> np.ndarray:
        i = int(np.searchsorted(grid_arr, t, side="right")) - 1
        i = min(max(i, 0), len(gens) - 1)
        return expm((t - grid_arr[i]) * gens[i]) @ psis[i]

    stats = {"method": "piecewise-exponential", "steps": len(gens),
             "max_step_defect": 0.0, "projections": 0}
    return {"eval": ev, "stats": stats}


def _rk_backend(coeffs: CoefficientPath, a: float, b: float, tol: float) -> dict:
    j = standard_j(coeffs.n)
    dim = 2 * coeffs.n

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        return j @ coeffs.b(t) @ y

    # Cap the step so the cubic dense output keeps up with the integrator.
    rhs_scale = max(max(np.linalg.norm(coeffs.b(t), 2)
                        for t in np.linspace(a, b, 16)), 1e-3)
    h_interp = (38.4 * max(tol, 1e-13)) ** 0.25 / rhs_scale
    h_max = min((b - a) / 16.0, h_interp)
    rtol, atol = max(tol / 100.0, 1e-13), 1e-14

    knots_t = [a]
    knots_y = [np.eye(dim)]
    knots_f = [rhs(a, knots_y[0])]

    t, y, f = a, knots_y[0], knots_f[0]
    h = min(h_max, (b - a) / 64.0)
    steps = 0
    projections = 0
    max_step_defect = 0.0
    while t < b - 1e-14 * (b - a):
        h = min(h, b - t)
        if h < 1e-14 * (b - a):
            raise IntegrationError(f"step size underflow at t={t}")
        k_stages = [f]
        for i in range(1, 7):
            yi = y + h * sum(cij * ki for cij, ki in zip(_DP_A[i], k_stages))
            k_stages.append(rhs(t + _DP_C[i] * h, yi))
        y5 = y + h * sum(bi * ki for bi, ki in zip(_DP_B5, k_stages))
        y4 = y + h * sum(bi * ki for bi, ki in zip(_DP_B4, k_stages))
        err = np.abs(y5 - y4).max() / (atol + rtol * max(np.abs(y5).max(), 1.0))
        if err > 1.0:
            h *= max(0.2, 0.9 * err ** -0.2)
            continue
        steps += 1
        t += h
        defect = np.abs(y5.T @ j @ y5 - j).max()
        max_step_defect = max(max_step_defect, float(defect))
        projected = defect > tol / 10.0
        if projected:
            y5 = _symplectic_project(y5, j, tol / 100.0)
            projections += 1
        y = y5
        f = rhs(t, y) if projected else k_stages[-1]  # FSAL unless projected
        knots_t.append(t)
        knots_y.append(y)
        knots_f.append(f)
        h = min(h_max, h * min(5.0, max(0.2, 0.9 * err ** -0.2 if err > 0 else 5.0)))

    ts_arr = np.asarray(knots_t)
    ys_arr = np.stack(knots_y)
    fs_arr = np.stack(knots_f)

    def ev(t: float) -> np.ndarray:
        if t <= ts_arr[0]:
            return ys_arr[0]
        if t >= ts_arr[-1]:
            return ys_arr[-1]
        k = int(np.searchsorted(ts_arr, t, side="right")) - 1
        h_k = ts_arr[k + 1] - ts_arr[k]
        s = (t - ts_arr[k]) / h_k
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return (h00 * ys_arr[k] + h01 * ys_arr[k + 1]
                + h_k * (h10 * fs_arr[k] + h11 * fs_arr[k + 1]))

    achieved = float(np.abs(np.einsum("tij,ik,tkl->tjl", ys_arr, j, ys_arr) - j).max())
    stats = {"method": "dormand-prince-45", "steps": steps,
             "max_step_defect": max_step_defect, "projections": projections,
             "knot_defect": achieved}
    if achieved > tol:
        raise IntegrationError(
            f"symplectic defect target {tol:g} unreachable: achieved {achieved:.3e}")
    return {"eval": ev, "stats": stats}


def fundamental_solution(coeffs: CoefficientPath, interval=None,
                         tol: float = 1e-10) -> FundamentalSolution:
    """Integrate Psi' = J B(t) Psi, Psi(a) = Id, to symplectic defect <= tol."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if interval is None:
        interval = (0.0, coeffs.horizon)
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise ValueError(f"empty integration interval [{a}, {b}]")
    coeffs.validate()
    if coeffs.constant is not None:
        k = standard_j(coeffs.n) @ coeffs.constant
        backend = _constant_backend(k, a)
    elif coeffs.pieces is not None:
        backend = _piecewise_backend(coeffs, a, b)
    else:
        backend = _rk_backend(coeffs, a, b, tol)
    return FundamentalSolution(coeffs, (a, b), backend)


def act_on(psi: FundamentalSolution, w: LagrangianFrame,
           interval=None) -> LagrangianPath:
    """The Lagrangian path t -> psi(t) W with analytic derivative data."""
    if w.space.n != psi.space.n:
        raise ValueError(f"frame lives in n={w.n}, flow in n={psi.space.n}")
    z0 = w.z
    iv = psi.interval if interval is None else interval
    return LagrangianPath(
        lambda t: psi.psi(t) @ z0,
        iv,
        psi.space,
        derivative_fn=lambda t: psi.derivative(t) @ z0,
        generator_fn=lambda t: psi.coefficients.b(t),
        batch_fn=lambda ts: psi.psi_batch(ts) @ z0,
    )


def graph_path(psi: FundamentalSolution, interval=None) -> LagrangianPath:
    """t -> Gr(psi(t)) in the twisted product; the derivative form of this
    path on (v, v) in Gr ∩ anything is <B(t) v, v> on the second factor."""
    dim = psi.space.dim
    eye = np.eye(dim)
    double = psi.space.double()
    iv = psi.interval if interval is None else interval

    def frame(t):
        return np.vstack([eye, psi.psi(t)])

    def deriv(t):
        return np.vstack([np.zeros((dim, dim)), psi.derivative(t)])

    def gen(t):
        g = np.zeros((2 * dim, 2 * dim))
        g[dim:, dim:] = psi.coefficients.b(t)
        return g

    def batch(ts):
        mats = psi.psi_batch(ts)
        tops = np.broadcast_to(eye, mats.shape)
        return np.concatenate([tops, mats], axis=1)

    return LagrangianPath(frame, iv, double, derivative_fn=deriv,
                          generator_fn=gen, batch_fn=batch)


def focal_frame(psi: FundamentalSolution, t_star: float,
                ref: LagrangianFrame) -> LagrangianFrame:
    """Initial conditions whose evolved subspace equals ``ref`` at t_star.

    For ref = L_D these are the variations vanishing (in position) exactly at
    t_star; the path t -> psi(t) focal_frame then crosses L_D at t_star with
    full multiplicity.
    """
    return ref.transform(psi.inverse_at(t_star))
