"""Maslov-type intersection indices for paths of Lagrangian subspaces and
Morse indices of periodic brake orbits of mechanical systems."""

from .core.chart import QuadraticFormReport, chart_form, triple_q_form
from .core.frames import (LagrangianFrame, diagonal, dirichlet, graph_frame,
                          graph_of_symmetric, intersection_dim, neumann,
                          product_frame)
from .core.reduction import symplectic_reduction
from .core.space import SymplecticSpace, standard_j
from .engine.crossings import (CrossingOptions, CrossingRecord, CrossingReport,
                               crossing_form, detect_crossings)
from .engine.errors import (DegenerateCrossingError, IntegrationError,
                            NumericalAbort, UnresolvedClusterError)
from .engine.indices import clm_index, clm_index_pair, clm_rs_gap, rs_index, \
    rs_index_pair
from .engine.paths import LagrangianPath, constant_path
from .engine.triple import (hormander_index, hormander_index_along_path,
                            triple_index, triple_index_bound)
from .hamiltonian.coefficients import CoefficientPath, mechanical_coefficients
from .hamiltonian.flow import (FundamentalSolution, act_on, focal_frame,
                               fundamental_solution, graph_path)
from .brake import (BrakeOrbitData, IndexBreakdown, brake_morse_index,
                    free_period_index, geometric_index, instability_parity,
                    is_symplectic_shear, segment_decomposition,
                    shear_morse_index)
from . import models

__version__ = "0.1.0"

__all__ = [
    "SymplecticSpace", "standard_j",
    "LagrangianFrame", "dirichlet", "neumann", "diagonal", "graph_frame",
    "graph_of_symmetric", "product_frame", "intersection_dim",
    "QuadraticFormReport", "chart_form", "triple_q_form", "symplectic_reduction",
    "LagrangianPath", "constant_path",
    "CrossingOptions", "CrossingRecord", "CrossingReport",
    "crossing_form", "detect_crossings",
    "clm_index", "clm_index_pair", "rs_index", "rs_index_pair", "clm_rs_gap",
    "triple_index", "triple_index_bound", "hormander_index",
    "hormander_index_along_path",
    "CoefficientPath", "mechanical_coefficients",
    "FundamentalSolution", "fundamental_solution", "act_on", "graph_path",
    "focal_frame",
    "BrakeOrbitData", "IndexBreakdown", "geometric_index", "segment_decomposition",
    "brake_morse_index", "is_symplectic_shear", "shear_morse_index",
    "instability_parity", "free_period_index",
    "NumericalAbort", "DegenerateCrossingError", "UnresolvedClusterError",
    "IntegrationError",
    "models",
]
