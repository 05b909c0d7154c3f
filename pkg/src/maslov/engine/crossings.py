"""Crossing detection and crossing forms for pairs of Lagrangian paths.

A crossing of the pair (l1, l2) is an instant where l1(t) ∩ l2(t) != {0}.
Detection scans the smallest singular value of the intersection pencil
M(t) = Z1(t)^T J Z2(t) on a uniform grid (M is singular exactly at
crossings), then refines every candidate: sign changes of det M by
bisection, dips without a sign change (even multiplicity) by golden-section
minimization.  The grid is a completeness assumption: crossings separated by
less than one grid cell can be missed, and two crossings closer than the
time tolerance abort.

At a crossing the relative crossing form

    Gamma(l1, l2, t)[w] = Q(l1(t), l1'(t))[w] - Q(l2(t), l2'(t))[w]

is evaluated on an orthonormal basis of the intersection.  Interior
crossings must be regular (no kernel at the regularity threshold); a
degenerate crossing aborts with the advice to perturb, since the index is a
fixed-endpoint homotopy invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.chart import QuadraticFormReport, spectral_report
from ..core.frames import LagrangianFrame
from ..core.linalg import orthonormal_columns
from .errors import DegenerateCrossingError, UnresolvedClusterError
from .paths import LagrangianPath, constant_path

__all__ = [
    "CrossingOptions",
    "CrossingRecord",
    "CrossingReport",
    "detect_pair_crossings",
    "detect_crossings",
    "crossing_form",
]


@dataclass(frozen=True)
class CrossingOptions:
    grid: int = 2048                 # uniform pre-scan nodes
    time_tol: float = 1e-10          # refinement tolerance, relative to the span
    kernel_tol: float = 1e-8         # sv/scale below this counts in the intersection
    reg_tol: float = 1e-7            # crossing-form eigenvalue regularity threshold
    dip_gate: float = 0.02           # relative sigma_min triggering dip refinement
    allow_degenerate: bool = False   # collect degenerate records instead of raising


@dataclass(frozen=True)
class CrossingRecord:
    t: float
    multiplicity: int
    form: QuadraticFormReport
    kind: str  # "interior" | "left-endpoint" | "right-endpoint"

    @property
    def degenerate(self) -> bool:
        return self.form.n_zero > 0

    def as_dict(self) -> dict:
        kind = {"left-endpoint": "left", "right-endpoint": "right"}.get(self.kind, self.kind)
        return {
            "t": self.t,
            "multiplicity": self.multiplicity,
            "eigenvalues": list(self.form.eigenvalues),
            "kind": kind,
        }


@dataclass(frozen=True)
class CrossingReport:
    records: tuple[CrossingRecord, ...]
    index: float
    convention: str  # "CLM" | "RS"

    def recompute_index(self) -> float:
        """Re-derive the index from the records per the stated convention."""
        total = 0.0
        for rec in self.records:
            if rec.kind == "interior":
                total += rec.form.signature
            elif self.convention == "CLM" and rec.kind == "left-endpoint":
                total += rec.form.n_plus
            elif self.convention == "CLM" and rec.kind == "right-endpoint":
                total -= rec.form.n_minus
            else:  # RS halves the signature at both endpoints
                total += 0.5 * rec.form.signature
        return total

    def as_dict(self) -> dict:
        idx = self.index
        return {
            "index": int(idx) if float(idx).is_integer() else float(idx),
            "convention": self.convention,
            "crossings": [rec.as_dict() for rec in self.records],
        }


def _det_signs(pencil: np.ndarray) -> np.ndarray:
    signs, _ = np.linalg.slogdet(pencil)
    return signs


class _Pencil:
    """Scalar evaluations of the intersection pencil at arbitrary instants.

    ``scale`` is the largest singular value seen along the whole path; all
    smallness decisions are relative to it, never to a single matrix (at a
    full crossing the whole pencil matrix vanishes).
    """

    def __init__(self, path1: LagrangianPath, path2: LagrangianPath,
                 scale: float = 1.0):
        self.p1 = path1
        self.p2 = path2
        self.j = path1.space.j
        self.scale = max(scale, 1e-300)

    def matrix(self, t: float) -> np.ndarray:
        return self.p1.raw_frame(t).T @ self.j @ self.p2.raw_frame(t)

    def ratio(self, t: float) -> float:
        sv = np.linalg.svd(self.matrix(t), compute_uv=False)
        return float(sv[-1] / self.scale)

    def sign(self, t: float) -> float:
        s, _ = np.linalg.slogdet(self.matrix(t))
        return float(s)


def _bisect_sign(pencil: _Pencil, lo: float, hi: float, s_lo: float, tol: float) -> float:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        s_mid = pencil.sign(mid)
        if s_mid == 0.0:
            return mid
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _golden_min(pencil: _Pencil, lo: float, hi: float, tol: float) -> float:
    phi = 0.5 * (np.sqrt(5.0) - 1.0)
    x1 = hi - phi * (hi - lo)
    x2 = lo + phi * (hi - lo)
    f1, f2 = pencil.ratio(x1), pencil.ratio(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - phi * (hi - lo)
            f1 = pencil.ratio(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + phi * (hi - lo)
            f2 = pencil.ratio(x2)
    return 0.5 * (lo + hi)


def _intersection_basis_at(pencil: _Pencil, t: float, kernel_tol: float):
    m = pencil.matrix(t)
    _, sv, vt = np.linalg.svd(m)
    cut = kernel_tol * pencil.scale
    kernel = vt[sv <= cut].T
    if kernel.shape[1] == 0:
        return np.zeros((pencil.p2.space.dim, 0))
    vecs = pencil.p2.raw_frame(t) @ kernel
    return orthonormal_columns(vecs)


def _relative_form(path1: LagrangianPath, path2: LagrangianPath, t: float,
                   basis: np.ndarray, reg_tol: float,
                   scale: float | None = None) -> QuadraticFormReport:
    q = path1.derivative_form(t, basis) - path2.derivative_form(t, basis)
    return spectral_report(q, null_tol=reg_tol, scale=scale)


def detect_pair_crossings(path1: LagrangianPath, path2: LagrangianPath,
                          opts: CrossingOptions = CrossingOptions()) -> list[CrossingRecord]:
    """Time-ordered crossing records of the pair, forms Gamma(path1, path2, t)."""
    if not path1.space.same_as(path2.space):
        raise ValueError("paths live in different symplectic spaces")
    if path1.interval != path2.interval:
        raise ValueError(f"paths live on different intervals "
                         f"{path1.interval} vs {path2.interval}")
    a, b = path1.interval
    span = b - a
    t_tol = opts.time_tol * span

    ts = np.linspace(a, b, opts.grid + 1)
    z1 = path1.frames(ts)
    z2 = path2.frames(ts)
    stack = np.einsum("tij,tik->tjk", z1,
                      np.einsum("ij,tjk->tik", path1.space.j, z2))
    sv = np.linalg.svd(stack, compute_uv=False)
    scale = float(sv[:, 0].max())
    # If the pencil is tiny compared to the frames themselves, the paths
    # coincide (up to noise) along the whole interval.
    frame_scale = float((np.sqrt((z1 ** 2).sum(axis=(1, 2)))
                         * np.sqrt((z2 ** 2).sum(axis=(1, 2)))).max())
    if scale < 1e-8 * max(frame_scale, 1e-300):
        raise DegenerateCrossingError(
            "the two Lagrangian paths coincide along the whole interval; the "
            "crossing-form machinery does not apply -- perturb one of them "
            "(homotopy invariance keeps the index unchanged)")
    pencil = _Pencil(path1, path2, scale)
    ratios = sv[:, -1] / pencil.scale
    signs = _det_signs(stack)

    # A long near-singular stretch means the pair is not regular at all.
    flat = np.mean(ratios < opts.kernel_tol)
    if flat > 0.2:
        raise DegenerateCrossingError(
            "the pair has (near-)constant nontrivial intersection on "
            f"{100 * flat:.0f}% of the grid; the crossing-form machinery does not "
            "apply -- perturb the path or the reference (homotopy invariance "
            "keeps the index unchanged)")

    # Keep interior candidates away from the endpoints; endpoint intersections
    # are handled separately below.
    guard = max(50.0 * t_tol, 1e-14 * span)

    roots: list[float] = []
    for i in range(opts.grid):
        lo, hi = float(ts[i]), float(ts[i + 1])
        crossed = signs[i] != 0 and signs[i + 1] != 0 and signs[i] != signs[i + 1]
        if crossed:
            roots.append(_bisect_sign(pencil, lo, hi, signs[i], t_tol))
            continue
        # Dip without sign change: candidate even-multiplicity crossing.
        is_dip = ratios[i] < opts.dip_gate or ratios[i + 1] < opts.dip_gate
        if is_dip:
            left = float(ts[max(i - 1, 0)])
            right = float(ts[min(i + 2, opts.grid)])
            t_star = _golden_min(pencil, left, right, t_tol)
            if pencil.ratio(t_star) < opts.kernel_tol:
                roots.append(t_star)

    # Deduplicate refinements of the same root, then demand separation.
    roots.sort()
    merged: list[float] = []
    for r in roots:
        if merged and abs(r - merged[-1]) <= 20.0 * t_tol:
            merged[-1] = 0.5 * (merged[-1] + r)
        else:
            merged.append(r)
    for r1, r2 in zip(merged, merged[1:]):
        if r2 - r1 < 200.0 * t_tol:
            raise UnresolvedClusterError(
                f"crossings at t={r1!r} and t={r2!r} are closer than the "
                "resolvable separation; tighten time_tol or split the interval")

    records: list[CrossingRecord] = []
    degenerate: list[CrossingRecord] = []

    # Regularity of crossing forms is judged against the path pair's global
    # derivative scale: a form that is tiny because the paths momentarily
    # stall still counts as degenerate.
    form_scale = max(path1.derivative_scale(t) + path2.derivative_scale(t)
                     for t in ts[:: max(opts.grid // 32, 1)])

    def add(t: float, kind: str):
        basis = _intersection_basis_at(pencil, t, opts.kernel_tol)
        if basis.shape[1] == 0:
            return
        form = _relative_form(path1, path2, t, basis, opts.reg_tol, form_scale)
        rec = CrossingRecord(t=float(t), multiplicity=basis.shape[1], form=form, kind=kind)
        records.append(rec)
        if rec.degenerate:
            degenerate.append(rec)

    add(a, "left-endpoint")
    add(b, "right-endpoint")
    for r in merged:
        if r - a < guard or b - r < guard:
            # Refined into an endpoint: covered by the endpoint records.
            if not any(rec.kind != "interior" and abs(rec.t - r) <= guard for rec in records):
                raise UnresolvedClusterError(
                    f"crossing at t={r!r} hugs an interval endpoint; nudge the interval")
            continue
        add(r, "interior")

    if degenerate and not opts.allow_degenerate:
        worst = degenerate[0]
        raise DegenerateCrossingError(
            f"crossing at t={worst.t!r} is degenerate (form nullity "
            f"{worst.form.n_zero} at relative threshold {opts.reg_tol:g}); perturb "
            "the data slightly -- the index is invariant under homotopies keeping "
            "endpoint intersections fixed", records=records)

    records.sort(key=lambda rec: (rec.t, rec.kind == "right-endpoint"))
    return records


def detect_crossings(path: LagrangianPath, ref: LagrangianFrame,
                     opts: CrossingOptions = CrossingOptions()) -> list[CrossingRecord]:
    """Crossings of a moving path with a fixed reference Lagrangian.

    Records carry Gamma(path, ref, t), the derivative form of the moving path
    restricted to path(t) ∩ ref.
    """
    return detect_pair_crossings(path, constant_path(ref, path.interval), opts)


def crossing_form(psi, l0: LagrangianFrame, w: LagrangianFrame, t0: float,
                  reg_tol: float = 1e-7) -> QuadraticFormReport:
    """Crossing form of the path t -> psi(t) W against L0 at the instant t0.

    ``psi`` is any symplectic path object exposing psi(t) and derivative(t);
    the form is <J^T psi'(t0) psi(t0)^{-1} v, v> on an orthonormal basis of
    psi(t0) W ∩ L0.  An empty intersection is an error, not a zero form.
    """
    m = np.asarray(psi.psi(t0), float)
    mdot = np.asarray(psi.derivative(t0), float)
    space = l0.space
    moved = m @ w.z
    _, sv, vt = np.linalg.svd(l0.z.T @ space.j @ moved)
    cut = 1e-8 * max(sv[0], 0.01 * np.linalg.norm(moved, 2))
    kernel = vt[sv <= cut].T
    if kernel.shape[1] == 0:
        raise ValueError(f"psi({t0}) W does not meet the reference Lagrangian")
    basis = orthonormal_columns(moved @ kernel)
    m_inv = -space.j @ m.T @ space.j  # symplectic inverse
    gen = space.j.T @ mdot @ m_inv
    q = basis.T @ gen @ basis
    return spectral_report(0.5 * (q + q.T), null_tol=reg_tol)
