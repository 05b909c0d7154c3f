import numpy as np
import pytest

from helpers import random_isotropic, random_lagrangian, random_symmetric

from maslov.core.chart import chart_form, spectral_report, triple_q_form
from maslov.core.frames import (FrameError, LagrangianFrame, dirichlet,
                                graph_of_symmetric, intersection_dim, neumann)
from maslov.core.reduction import reduction_basis, symplectic_reduction
from maslov.core.space import SymplecticSpace


def test_chart_form_zero_on_l0():
    for n in (1, 2, 3):
        rep = chart_form(dirichlet(n), neumann(n), dirichlet(n))
        assert rep.dim == n and rep.n_zero == n and rep.signature == 0


@pytest.mark.parametrize("c", [1.0, -2.5, 0.3])
def test_chart_form_line(c):
    line = LagrangianFrame(np.array([[1.0], [c]]))
    rep = chart_form(dirichlet(1), neumann(1), line)
    assert rep.dim == 1
    assert abs(rep.eigenvalues[0] - c) < 1e-12
    assert rep.n_plus == (1 if c > 0 else 0)


def test_chart_form_graph_matches_generator_inertia():
    rng = np.random.default_rng(23)
    for n in (1, 2, 3):
        for _ in range(10):
            a = random_symmetric(rng, n) * 2.0
            rep = chart_form(dirichlet(n), neumann(n), graph_of_symmetric(a))
            eig = np.linalg.eigvalsh(a)
            assert rep.n_plus == int(np.sum(eig > 1e-10))
            assert rep.n_minus == int(np.sum(eig < -1e-10))


def test_chart_kernel_equals_intersection():
    rng = np.random.default_rng(31)
    for n in (1, 2, 3, 4):
        for _ in range(8):
            l0 = random_lagrangian(rng, n)
            l1 = random_lagrangian(rng, n)
            l = random_lagrangian(rng, n)
            if intersection_dim(l0, l1) or intersection_dim(l, l1):
                continue
            rep = chart_form(l0, l1, l)
            assert rep.n_zero == intersection_dim(l, l0)


def test_chart_form_requires_transversality():
    with pytest.raises(FrameError):
        chart_form(dirichlet(2), neumann(2), neumann(2))
    with pytest.raises(FrameError):
        chart_form(dirichlet(2), dirichlet(2), neumann(2))


def test_reduction_trivial_and_full():
    rng = np.random.default_rng(2)
    lag = random_lagrangian(rng, 3)
    reduced = symplectic_reduction(np.zeros((6, 0)), lag)
    assert reduced.n == 3
    # reduction by {0} is a symplectic change of orthonormal basis
    red = reduction_basis(np.zeros((6, 0)), SymplecticSpace(3))
    assert reduced.same_subspace(LagrangianFrame(red.basis.T @ lag.z))
    assert symplectic_reduction(lag, lag) is None


def test_reduction_two_dof_example():
    # I spanned by the first position axis; V_I is the second dof plane and
    # the reduced Dirichlet subspace is its momentum line.
    space = SymplecticSpace(2)
    iso = np.zeros((4, 1))
    iso[2, 0] = 1.0
    reduced = symplectic_reduction(iso, dirichlet(2))
    assert reduced.n == 1
    assert intersection_dim(reduced, dirichlet(1)) == 1


def test_reduction_output_lagrangian():
    rng = np.random.default_rng(41)
    for n in (2, 3, 4):
        for k in range(1, n):
            iso = random_isotropic(rng, n, k)
            lag = random_lagrangian(rng, n)
            reduced = symplectic_reduction(iso, lag)
            assert reduced is not None and reduced.n == n - k
            z = reduced.z
            assert np.abs(z.T @ reduced.space.j @ z).max() < 1e-9


def test_reduction_rejects_non_isotropic():
    bad = np.eye(4)[:, [0, 2]]  # spans (p1, q1): omega = 1
    with pytest.raises(FrameError):
        symplectic_reduction(bad, dirichlet(2))


def test_triple_q_form_cyclic_positive_part():
    rng = np.random.default_rng(53)
    for n in (1, 2, 3):
        for _ in range(15):
            a, b, c = (random_lagrangian(rng, n) for _ in range(3))
            reps = [triple_q_form(a, b, c), triple_q_form(b, c, a),
                    triple_q_form(c, a, b)]
            assert len({r.n_plus for r in reps}) == 1


def test_spectral_report_counts():
    rep = spectral_report(np.diag([3.0, -1.0, 0.0]))
    assert (rep.n_plus, rep.n_minus, rep.n_zero) == (1, 1, 1)
    assert rep.signature == 0 and rep.coindex_extended == 2
    assert rep.as_dict()["nullity"] == 1
