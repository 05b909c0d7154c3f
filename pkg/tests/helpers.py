"""Shared random generators for the test suite.

Random Lagrangians come from the unitary-group action on the horizontal
Lagrangian (a complex QR of a Ginibre matrix), which samples the Lagrangian
Grassmannian without conditioning pathologies.  Random paths are orbits of
constant-coefficient flows expm(t J S) with bounded generator norm, so all
crossings are regular with probability one and evaluation is exact.
"""

import numpy as np
from scipy.linalg import expm

from maslov.core.frames import LagrangianFrame
from maslov.core.reduction import reduction_basis
from maslov.core.space import SymplecticSpace, standard_j
from maslov.hamiltonian.coefficients import CoefficientPath
from maslov.hamiltonian.flow import act_on, fundamental_solution


def random_lagrangian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    return LagrangianFrame(np.vstack([q.real, q.imag]))


def random_symmetric(rng, dim, scale=1.0):
    s = rng.standard_normal((dim, dim))
    s = 0.5 * (s + s.T)
    return scale * s / max(np.linalg.norm(s, 2), 1e-9)


def random_symplectic(rng, n, scale=1.0):
    return expm(standard_j(n) @ random_symmetric(rng, 2 * n, scale))


def constant_system(s, horizon=1.0):
    s = np.asarray(s, float)
    n = s.shape[0] // 2
    return CoefficientPath(lambda t: s, n, horizon, constant=s)


def random_orbit(rng, n, horizon=1.0, scale=2.0, frame=None):
    """Orbit path of a random constant flow; returns (path, flow)."""
    coeffs = constant_system(random_symmetric(rng, 2 * n, scale), horizon)
    psi = fundamental_solution(coeffs, (0.0, horizon))
    if frame is None:
        frame = random_lagrangian(rng, n)
    return act_on(psi, frame), psi


def random_isotropic(rng, n, k):
    """k independent columns spanning an isotropic subspace."""
    return random_lagrangian(rng, n).z[:, :k]


def lagrangian_containing(rng, iso_cols, n):
    """Random Lagrangian containing the isotropic column space."""
    space = SymplecticSpace(n)
    k = iso_cols.shape[1]
    if k == n:
        return LagrangianFrame(iso_cols, space)
    red = reduction_basis(iso_cols, space)
    inner = random_lagrangian(rng, n - k)
    lifted = red.basis @ inner.z
    return LagrangianFrame(np.hstack([iso_cols, lifted]), space)
