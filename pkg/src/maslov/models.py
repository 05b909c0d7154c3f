"""Closed-form model systems: Hill regions, the ballistic (thrown-ball)
window model, the boundary collar model with a variable metric coefficient,
and the planar anisotropic harmonic oscillator with its exact index count.

The two window models describe the linearized dynamics near an instant where
the velocity vanishes at t* = eps/2.  Their transverse block solves
(u' h1(t))' = 0 with h1 > 0 (h1 = 1 is the ballistic case), written first
order in (momentum, position) as

    (w, u)' = [[0, 0], [1/h1(t), 0]] (w, u),        B(t) = diag(1/h1(t), 0).

The flow is unipotent, psi(t) = [[1, 0], [c(t), 1]] with c = integral of
1/h1, so the subspace of variations vanishing at t* (the focal frame of L_D
at t*) crosses L_D exactly once, at t*, with full multiplicity and a
positive definite crossing form; the boundary-window index is n - 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core.frames import LagrangianFrame, dirichlet
from .engine.crossings import CrossingOptions
from .engine.indices import clm_index
from .hamiltonian.coefficients import CoefficientPath, mechanical_coefficients, \
    sampled_table_coefficients
from .hamiltonian.flow import FundamentalSolution, act_on, focal_frame, \
    fundamental_solution

__all__ = [
    "PotentialModel",
    "HillRegion",
    "hill_region",
    "throwing_ball_system",
    "SeifertModel",
    "seifert_system",
    "window_focal_frame",
    "window_boundary_report",
    "ball_dirichlet_report",
    "oscillator_brake_setup",
    "oscillator_expected_index",
    "oscillator_degenerate_epsilons",
    "coefficient_path_from_json",
]


# ---------------------------------------------------------------------------
# Potentials and Hill regions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PotentialModel:
    """Catalog potential: homogeneous-singular(alpha), anisotropic-kepler(nu)
    or anisotropic-oscillator(mu)."""

    kind: str
    parameter: float

    KINDS = ("homogeneous-singular", "anisotropic-kepler", "anisotropic-oscillator")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.parameter <= 0:
            raise ValueError("potential parameter must be positive")
        if self.kind == "anisotropic-kepler" and self.parameter <= 1:
            raise ValueError("anisotropic Kepler requires nu > 1")

    def value(self, q) -> float:
        q = np.asarray(q, float)
        if self.kind == "homogeneous-singular":
            return -1.0 / np.linalg.norm(q) ** self.parameter
        if self.kind == "anisotropic-kepler":
            nu = self.parameter
            return -1.0 / np.sqrt(nu ** 2 * q[0] ** 2 + q[1] ** 2)
        mu = self.parameter
        return 0.5 * (q[0] ** 2 + mu ** 2 * q[1] ** 2)


@dataclass(frozen=True)
class HillRegion:
    """Analytic descriptor of {V <= k} plus a membership predicate."""

    kind: str                      # "empty" | "ball" | "ellipse" | "whole-space"
    energy: float
    radius: float | None = None
    semi_axes: tuple[float, float] | None = None
    model: PotentialModel | None = None

    def contains(self, q) -> bool:
        if self.model is None:
            raise ValueError("membership needs the generating potential")
        return bool(self.model.value(q) <= self.energy + 1e-12)

    @property
    def boundary_empty(self) -> bool:
        return self.kind in ("empty", "whole-space")

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "energy": self.energy}
        if self.radius is not None:
            out["radius"] = self.radius
        if self.semi_axes is not None:
            out["semi_axes"] = list(self.semi_axes)
        return out


def hill_region(model: PotentialModel, k: float) -> HillRegion:
    if model.kind == "homogeneous-singular":
        if k >= 0:
            return HillRegion("whole-space", k, model=model)
        radius = (1.0 / abs(k)) ** (1.0 / model.parameter)
        return HillRegion("ball", k, radius=radius, model=model)
    if model.kind == "anisotropic-kepler":
        if k >= 0:
            return HillRegion("whole-space", k, model=model)
        # boundary nu^2 x^2 + y^2 = 1/k^2
        nu = model.parameter
        return HillRegion("ellipse", k, semi_axes=(1.0 / (nu * abs(k)), 1.0 / abs(k)),
                          model=model)
    # oscillator: x^2 + mu^2 y^2 <= 2k
    if k < 0:
        return HillRegion("empty", k, model=model)
    a = np.sqrt(2.0 * k)
    return HillRegion("ellipse", k, semi_axes=(a, a / model.parameter), model=model)


# ---------------------------------------------------------------------------
# Window models at a braking instant
# ---------------------------------------------------------------------------

def throwing_ball_system(n: int, epsilon: float):
    """Constant window system for the ballistic model in n dofs.

    Returns the coefficient path of the (n-1)-dof transverse block, whose
    fundamental solution is [[1, 0], [t, 1]] blockwise, together with the
    reference parabola y(t) = (t - eps/2)^2 / 2.  The vertical variation is
    pinned by its Dirichlet conditions and is excluded from the block.
    """
    if n < 2:
        raise ValueError("the ballistic model needs n >= 2")
    if epsilon <= 0:
        raise ValueError("window length must be positive")
    m = n - 1
    coeffs = mechanical_coefficients(np.zeros((m, m)), epsilon)
    coeffs.name = "ball"
    coeffs.params.update({"n": n, "epsilon": epsilon})

    def orbit(t: float) -> float:
        return 0.5 * (t - 0.5 * epsilon) ** 2

    return coeffs, orbit


@dataclass(frozen=True)
class SeifertModel:
    """Collar model data: dofs, window length, metric coefficient h1 > 0."""

    n: int
    epsilon: float
    h1: Callable[[float], float]
    sigma: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("collar model needs n >= 2")
        if self.epsilon <= 0 or self.sigma <= 0:
            raise ValueError("epsilon and sigma must be positive")

    def orbit(self, t: float) -> float:
        return (t - 0.5 * self.epsilon) ** 2 / (4.0 * self.sigma ** 2)


def seifert_system(model: SeifertModel) -> CoefficientPath:
    """Coefficient path B(t) = diag(Id / h1(t), 0) of the collar model."""
    m = model.n - 1
    h_samples = [model.h1(t) for t in np.linspace(0.0, model.epsilon, 64)]
    if min(h_samples) <= 0:
        raise ValueError("h1 must stay positive on the window")

    def fn(t: float) -> np.ndarray:
        b = np.zeros((2 * m, 2 * m))
        b[:m, :m] = np.eye(m) / model.h1(t)
        return b

    constant = None
    if max(h_samples) - min(h_samples) < 1e-14:
        constant = fn(0.0)
    return CoefficientPath(fn, m, model.epsilon, mechanical=True, constant=constant,
                           name="seifert", params={"n": model.n,
                                                   "epsilon": model.epsilon})


def window_focal_frame(psi: FundamentalSolution, epsilon: float) -> LagrangianFrame:
    """The frame of window variations vanishing at the braking instant eps/2.

    This is the focal frame of L_D at eps/2; for the constant ballistic flow
    it is spanned by the columns of [X; -(eps/2) X].
    """
    return focal_frame(psi, 0.5 * epsilon, dirichlet(psi.space.n))


def window_boundary_report(coeffs: CoefficientPath, epsilon: float,
                           opts: CrossingOptions = CrossingOptions(),
                           tol: float = 1e-10) -> dict:
    """Index data of the window path against L_D over [0, eps].

    The path evolves the frame of variations vanishing at eps/2; the report
    carries the CLM index (n-1 for any positive h1), the crossing record and
    the flow defect.
    """
    psi = fundamental_solution(coeffs, (0.0, epsilon), tol=tol)
    frame = window_focal_frame(psi, epsilon)
    path = act_on(psi, frame)
    report = clm_index(path, dirichlet(psi.space.n), opts)
    return {
        "clm": report,
        "index": int(report.index),
        "crossings": list(report.records),
        "defect": psi.max_defect(),
        "psi": psi,
        "frame": frame,
    }


def ball_dirichlet_report(n: int, horizon: float,
                          opts: CrossingOptions = CrossingOptions()) -> dict:
    """Dirichlet data for the ballistic model over [0, horizon].

    The evolved Dirichlet frame crosses L_D only at t = 0 with a positive
    definite form, so the CLM index is n-1 while the fixed-endpoint Morse
    index (interior conjugate points, counted with multiplicity) vanishes.
    """
    coeffs, _ = throwing_ball_system(n, horizon)
    psi = fundamental_solution(coeffs, (0.0, horizon))
    ref = dirichlet(psi.space.n)
    report = clm_index(act_on(psi, ref), ref, opts)
    interior = sum(r.form.signature for r in report.records if r.kind == "interior")
    return {"clm": report, "index": int(report.index), "morse_dirichlet": int(interior),
            "psi": psi}


# ---------------------------------------------------------------------------
# Anisotropic harmonic oscillator
# ---------------------------------------------------------------------------

def oscillator_brake_setup(mu: float, e: float, d0: float = 0.0,
                           epsilon: float | None = None):
    """Brake data and closed-form orbit for the planar oscillator families.

    Family (I), d0 = 0:        x(t) = e cos t, y = 0, period 2 pi.
    Family (II), |mu d0| = e:  x = 0, y = (e / mu) cos(mu t), period 2 pi / mu.

    The linearization is the same constant system u'' + u = 0,
    v'' + mu^2 v = 0 for both, so B = diag(1, 1, 1, mu^2).  Other d0 values
    trace two-frequency orbits that are periodic only for rational mu and are
    outside the catalog.
    """
    from .brake import BrakeOrbitData  # local import: brake builds on models

    if mu <= 0 or e <= 0:
        raise ValueError("mu and e must be positive")
    if mu ** 2 * d0 ** 2 > e ** 2 + 1e-12:
        raise ValueError("family constraint mu^2 d0^2 <= e^2 violated")

    if abs(d0) < 1e-14:
        family = "I"
        period = 2.0 * np.pi
        amp = e

        def orbit(t: float):
            return np.array([amp * np.cos(t), 0.0])
    elif abs(abs(mu * d0) - e) < 1e-12:
        family = "II"
        period = 2.0 * np.pi / mu

        def orbit(t: float):
            return np.array([0.0, (e / mu) * np.cos(mu * t)])
    else:
        raise ValueError(
            "catalog families are d0 = 0 (I) and |mu d0| = e (II); general d0 "
            "requires rational mu and is not part of the catalog")

    hess = np.diag([1.0, mu ** 2])
    coeffs = mechanical_coefficients(hess, period)
    coeffs.params.update({"mu": mu, "e": e, "d0": d0, "family": family})

    # Window lengths (pi/2)(1 + k/mu) degenerate the boundary problem at the
    # far end of the half period; auto-chosen eps is nudged off them, an
    # explicit eps that close is refused.
    degenerate = [v for v in oscillator_degenerate_epsilons(mu) if v > 0]

    def near_degenerate(value: float) -> bool:
        return any(abs(value - v) < 1e-6 * period for v in degenerate)

    if epsilon is None:
        epsilon = period / 100.0
        while near_degenerate(epsilon):
            epsilon *= 1.07
    elif near_degenerate(epsilon):
        raise ValueError(
            f"epsilon={epsilon} lies at a degenerate window length "
            "(pi/2)(1 + k/mu); pick a nearby value")
    data = BrakeOrbitData(period=period, epsilon=epsilon, coefficients=coeffs, n=2)
    return data, orbit


def oscillator_expected_index(mu: float) -> dict:
    """Closed-form half-interval count for the oscillator.

    clm_half = 1 + #{k >= 1 : k < mu + 1/2} is the CLM index of the evolved
    Neumann frame against L_D over [0, pi]; the crossing instants of the
    second block are t_k = (2k+1) pi / (2 mu).
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    count = int(np.ceil(mu + 0.5)) - 1  # #{k in N* : k < mu + 1/2}
    clm_half = 1 + count
    instants = []
    k = 0
    while (2 * k + 1) * np.pi / (2 * mu) < np.pi - 1e-12:
        instants.append((2 * k + 1) * np.pi / (2 * mu))
        k += 1
    out = {
        "clm_half": clm_half,
        "block_crossings": instants,
        "lower_bound": 2 * clm_half,
        "exact_if_small_mu": 2 if mu <= 0.5 else None,
    }
    return out


def oscillator_degenerate_epsilons(mu: float, k_max: int = 16) -> list[float]:
    """Window lengths (pi/2)(1 + k/mu) where the Dirichlet problem at pi - eps
    degenerates; rejected when choosing eps for oscillator runs."""
    return [(np.pi / 2.0) * (1.0 + k / mu) for k in range(-k_max, k_max + 1)]


# ---------------------------------------------------------------------------
# JSON catalog entry point
# ---------------------------------------------------------------------------

def coefficient_path_from_json(obj: dict) -> CoefficientPath:
    """Named model ("oscillator", "ball", "seifert") with parameters, or a
    sampled table {"t": [...], "B": [...]} interpolated linearly."""
    if not isinstance(obj, dict):
        raise ValueError("coefficient path JSON must be an object")
    if "t" in obj and "B" in obj:
        return sampled_table_coefficients(obj["t"], obj["B"],
                                          mechanical=bool(obj.get("mechanical", False)))
    name = obj.get("model")
    params = {k: v for k, v in obj.items() if k != "model"}
    if name == "oscillator":
        mu = float(params.get("mu", 1.0))
        period = float(params.get("T", 2.0 * np.pi))
        coeffs = mechanical_coefficients(np.diag([1.0, mu ** 2]), period)
        coeffs.params.update({"mu": mu})
        return coeffs
    if name == "ball":
        coeffs, _ = throwing_ball_system(int(params.get("n", 2)),
                                         float(params.get("epsilon", 1.0)))
        return coeffs
    if name == "seifert":
        n = int(params.get("n", 2))
        epsilon = float(params.get("epsilon", 1.0))
        wobble = float(params.get("wobble", 0.0))
        model = SeifertModel(n=n, epsilon=epsilon,
                             h1=lambda t: 1.0 + wobble * ((t - 0.5 * epsilon)
                                                          / (0.5 * epsilon)) ** 2)
        return seifert_system(model)
    if "hessian" in obj:
        period = float(obj.get("T", 1.0))
        return mechanical_coefficients(np.asarray(obj["hessian"], float), period)
    raise ValueError("coefficient path JSON needs a sampled table, a 'hessian', "
                     "or a model in {'oscillator', 'ball', 'seifert'}")
