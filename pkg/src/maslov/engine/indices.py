"""CLM and Robbin-Salamon intersection indices from crossing data.

Endpoint conventions (the package-wide fixed choice):

* CLM(ref, l):   coindex of the crossing form at the left endpoint, plus the
  sum of interior signatures, minus the index at the right endpoint.  The
  crossing form is Gamma(l, ref, t) = Q(l, l') - Q(ref, ref') restricted to
  the intersection.
* RS(l1, l2):    half the signature of Gamma(l1, l2, .) at both endpoints
  plus the interior signatures; half-integer valued and antisymmetric.

The two are linked by  CLM(l1, l2) = RS(l2, l1) - [h(b) - h(a)] / 2  with
h(t) = dim(l1(t) ∩ l2(t)), which the engine exposes as a cross-check.

Conversion note: the older intersection-count convention (paths starting off
the train of the reference and ending on its vertex, every crossing of an
optical path counted once) exceeds the CLM value by n on such paths, because
CLM takes minus the index at the final endpoint instead of the arrival
count.  No operation is provided for it; subtract n by hand when comparing.
"""

from __future__ import annotations

from ..core.frames import LagrangianFrame
from .crossings import (CrossingOptions, CrossingRecord, CrossingReport,
                        detect_pair_crossings)
from .paths import LagrangianPath, constant_path

__all__ = ["clm_index", "clm_index_pair", "rs_index", "rs_index_pair", "clm_rs_gap"]


def _assemble(records: list[CrossingRecord], convention: str) -> CrossingReport:
    report = CrossingReport(records=tuple(records), index=0, convention=convention)
    index = report.recompute_index()
    if convention == "CLM":
        index = int(round(index))
    return CrossingReport(records=tuple(records), index=index, convention=convention)


def clm_index_pair(ref_path: LagrangianPath, path: LagrangianPath,
                   opts: CrossingOptions = CrossingOptions()) -> CrossingReport:
    """CLM index of the pair (ref_path, path), both possibly moving."""
    records = detect_pair_crossings(path, ref_path, opts)
    return _assemble(records, "CLM")


def clm_index(path: LagrangianPath, ref: LagrangianFrame,
              opts: CrossingOptions = CrossingOptions()) -> CrossingReport:
    """CLM index of a path against a fixed reference Lagrangian."""
    return clm_index_pair(constant_path(ref, path.interval), path, opts)


def rs_index_pair(path1: LagrangianPath, path2: LagrangianPath,
                  opts: CrossingOptions = CrossingOptions()) -> CrossingReport:
    """Robbin-Salamon index of the pair; antisymmetric in its arguments."""
    records = detect_pair_crossings(path1, path2, opts)
    return _assemble(records, "RS")


def rs_index(path1: LagrangianPath, path2: LagrangianFrame | LagrangianPath,
             opts: CrossingOptions = CrossingOptions()) -> CrossingReport:
    """RS index; a bare frame as second argument means a constant path."""
    if isinstance(path2, LagrangianFrame):
        path2 = constant_path(path2, path1.interval)
    return rs_index_pair(path1, path2, opts)


def clm_rs_gap(ref: LagrangianFrame, path: LagrangianPath,
               opts: CrossingOptions = CrossingOptions()) -> dict:
    """Evaluate both conventions and the endpoint-dimension correction.

    Returns the CLM report, the RS report of the swapped pair, and the
    residual clm - rs + [h(b) - h(a)]/2 which must vanish for regular pairs.
    """
    ref_path = constant_path(ref, path.interval)
    clm = clm_index_pair(ref_path, path, opts)
    rs = rs_index_pair(path, ref_path, opts)
    h_a = sum(r.multiplicity for r in clm.records if r.kind == "left-endpoint")
    h_b = sum(r.multiplicity for r in clm.records if r.kind == "right-endpoint")
    residual = float(clm.index) - (float(rs.index) - 0.5 * (h_b - h_a))
    return {"clm": clm, "rs": rs, "h_a": h_a, "h_b": h_b, "residual": residual}
