"""Triple index and Hörmander index of Lagrangian tuples.

The triple index of (a, b, c) is

    iota(a, b, c) = n+ Q(a, b; c) + dim(a ∩ c) - dim(a ∩ b ∩ c),

with Q the generalized chart form on a ∩ (b + c).  Equivalently it is the
extended coindex (coindex plus nullity) of the chart form of the triple
reduced modulo eps = a ∩ b + b ∩ c; both routes are computed and must agree.
The value is a nonnegative integer bounded by
n - dim(a ∩ b) - dim(b ∩ c) + dim(a ∩ b ∩ c).

The Hörmander index s(l1, l2; m1, m2) measures how the CLM index of a path
from l1 to l2 changes when the reference moves from m1 to m2; it does not
depend on the connecting paths and reduces to a difference of triple
indices.  No transversality assumptions are required anywhere.
"""

from __future__ import annotations

import numpy as np

from ..core.chart import chart_form, triple_q_form
from ..core.frames import FrameError, LagrangianFrame
from ..core.linalg import DEFAULT_TOL, intersection_basis, subspace_sum
from ..core.reduction import symplectic_reduction
from .crossings import CrossingOptions
from .indices import clm_index_pair
from .paths import LagrangianPath, constant_path

__all__ = [
    "triple_index",
    "triple_index_reduced",
    "hormander_index",
    "hormander_index_along_path",
    "triple_index_bound",
]


def _check_common_space(*frames: LagrangianFrame):
    space = frames[0].space
    for f in frames[1:]:
        if not space.same_as(f.space):
            raise FrameError("triple/Hörmander arguments live in different spaces")


def _dim_triple_meet(a, b, c, tol):
    ab = intersection_basis(a.z, b.z, tol)
    if ab.shape[1] == 0:
        return 0
    return intersection_basis(ab, c.z, tol).shape[1]


def triple_index(a: LagrangianFrame, b: LagrangianFrame, c: LagrangianFrame,
                 tol: float = DEFAULT_TOL, cross_check: bool = True) -> int:
    """Triple index via the generalized chart form, cross-checked against the
    symplectic-reduction route."""
    _check_common_space(a, b, c)
    q = triple_q_form(a, b, c, tol)
    dim_ac = intersection_basis(a.z, c.z, tol).shape[1]
    dim_abc = _dim_triple_meet(a, b, c, tol)
    value = q.n_plus + dim_ac - dim_abc
    if cross_check:
        reduced = triple_index_reduced(a, b, c, tol)
        if reduced != value:
            raise ArithmeticError(
                f"triple-index routes disagree: direct {value}, reduced {reduced}")
    return value


def triple_index_reduced(a: LagrangianFrame, b: LagrangianFrame, c: LagrangianFrame,
                         tol: float = DEFAULT_TOL) -> int:
    """Extended coindex of the chart form after reducing modulo a∩b + b∩c."""
    _check_common_space(a, b, c)
    ab = intersection_basis(a.z, b.z, tol)
    bc = intersection_basis(b.z, c.z, tol)
    eps = subspace_sum(ab, bc, tol=tol) if ab.shape[1] + bc.shape[1] else np.zeros((a.space.dim, 0))
    if eps.shape[1] == a.n:
        return 0
    ra = symplectic_reduction(eps, a, tol)
    rb = symplectic_reduction(eps, b, tol)
    rc = symplectic_reduction(eps, c, tol)
    # In the reduced space (ra, rb) is a decomposition and rc is transverse
    # to rb, so the plain chart applies.
    form = chart_form(ra, rb, rc, tol)
    return form.coindex_extended


def triple_index_bound(a: LagrangianFrame, b: LagrangianFrame, c: LagrangianFrame,
                       tol: float = DEFAULT_TOL) -> int:
    """Upper bound n - dim(a∩b) - dim(b∩c) + dim(a∩b∩c) for the triple index."""
    _check_common_space(a, b, c)
    dim_ab = intersection_basis(a.z, b.z, tol).shape[1]
    dim_bc = intersection_basis(b.z, c.z, tol).shape[1]
    return a.n - dim_ab - dim_bc + _dim_triple_meet(a, b, c, tol)


def hormander_index(l1: LagrangianFrame, l2: LagrangianFrame,
                    m1: LagrangianFrame, m2: LagrangianFrame,
                    tol: float = DEFAULT_TOL) -> int:
    """s(l1, l2; m1, m2) as a difference of triple indices.

    Both equivalent expressions are evaluated and compared; a mismatch would
    mean a tolerance failure in the rank decisions, so it raises.
    """
    _check_common_space(l1, l2, m1, m2)
    first = triple_index(l1, l2, m2, tol, cross_check=False) \
        - triple_index(l1, l2, m1, tol, cross_check=False)
    second = triple_index(l1, m1, m2, tol, cross_check=False) \
        - triple_index(l2, m1, m2, tol, cross_check=False)
    if first != second:
        raise ArithmeticError(
            f"Hörmander expressions disagree: {first} vs {second}")
    return first


def hormander_index_along_path(path: LagrangianPath, m1: LagrangianFrame,
                               m2: LagrangianFrame,
                               opts: CrossingOptions = CrossingOptions()) -> int:
    """s(path(a), path(b); m1, m2) from its defining CLM difference.

    Independent of the triple-index route; used as an oracle in tests and in
    the brake-orbit consistency checks.
    """
    clm2 = clm_index_pair(constant_path(m2, path.interval), path, opts)
    clm1 = clm_index_pair(constant_path(m1, path.interval), path, opts)
    return int(clm2.index - clm1.index)
