import numpy as np
import pytest

from helpers import constant_system, random_orbit, random_symmetric

from maslov.core.frames import LagrangianFrame, dirichlet, neumann
from maslov.engine.crossings import CrossingOptions, crossing_form, detect_crossings
from maslov.engine.errors import DegenerateCrossingError, UnresolvedClusterError
from maslov.engine.paths import constant_path
from maslov.hamiltonian.flow import act_on, focal_frame, fundamental_solution
from maslov.models import SeifertModel, seifert_system, throwing_ball_system, \
    window_focal_frame

OPTS = CrossingOptions(grid=512)


def ball_flow(n, eps):
    coeffs, _ = throwing_ball_system(n, eps)
    return fundamental_solution(coeffs, (0.0, eps))


def test_ball_window_single_crossing():
    for n in (2, 3, 4):
        eps = 0.8
        psi = ball_flow(n, eps)
        path = act_on(psi, window_focal_frame(psi, eps))
        records = detect_crossings(path, dirichlet(n - 1), OPTS)
        interior = [r for r in records if r.kind == "interior"]
        assert len(records) == len(interior) == 1
        rec = interior[0]
        assert abs(rec.t - eps / 2) < 1e-8
        assert rec.multiplicity == n - 1
        assert rec.form.n_plus == n - 1


def test_constant_transverse_no_crossings():
    path = constant_path(neumann(2), (0.0, 1.0))
    assert detect_crossings(path, dirichlet(2), OPTS) == []


def test_oscillator_block_crossings_mu2():
    mu = 2.0
    coeffs = constant_system(np.diag([1.0, mu ** 2]), np.pi)
    psi = fundamental_solution(coeffs, (0.0, np.pi))
    path = act_on(psi, neumann(1))
    records = detect_crossings(path, dirichlet(1), OPTS)
    instants = [r.t for r in records if r.kind == "interior"]
    assert len(records) == 2
    assert np.allclose(instants, [np.pi / 4, 3 * np.pi / 4], atol=1e-9)


def test_crossing_form_is_coefficient_matrix():
    # For flows of z' = J B z the crossing form is <B w, w> on the
    # intersection, whatever the crossing.
    rng = np.random.default_rng(77)
    for n in (1, 2, 3):
        b = random_symmetric(rng, 2 * n, 1.5)
        coeffs = constant_system(b, 1.0)
        psi = fundamental_solution(coeffs, (0.0, 1.0))
        t0 = 0.37
        w = focal_frame(psi, t0, dirichlet(n))
        rep = crossing_form(psi, dirichlet(n), w, t0)
        assert rep.dim == n
        # oracle: evaluate <B v, v> on an orthonormal basis of psi(t0)W ∩ L_D
        moved = psi.psi(t0) @ w.z
        q, _ = np.linalg.qr(moved)
        inter = q[:, :n]  # moved spans L_D here by construction
        oracle = np.linalg.eigvalsh(inter.T @ b @ inter)
        assert np.allclose(sorted(rep.eigenvalues), sorted(oracle), atol=1e-9)


def test_crossing_form_seifert_value():
    # the collar model crossing at eps/2 has eigenvalues 1/h1(eps/2) in an
    # orthonormal basis of the intersection
    eps = 0.6
    model = SeifertModel(n=3, epsilon=eps, h1=lambda t: 1.5 + np.sin(np.pi * (t - eps / 2) / eps) ** 2)
    coeffs = seifert_system(model)
    psi = fundamental_solution(coeffs, (0.0, eps))
    w = window_focal_frame(psi, eps)
    rep = crossing_form(psi, dirichlet(2), w, eps / 2)
    assert rep.n_plus == 2
    assert np.allclose(rep.eigenvalues, 1.0 / model.h1(eps / 2), atol=1e-8)


def test_crossing_form_block_derivative():
    # Crossing vectors (p, 0) with p in ker A feel <p, c'(t0) p>, the lower
    # left block derivative of the flow written at psi(t0) = Id.
    rng = np.random.default_rng(5)
    n = 2
    a = np.diag([0.0, 1.7])  # kernel = first axis
    start = LagrangianFrame(np.vstack([np.eye(n), a]))
    b = random_symmetric(rng, 2 * n, 1.0)
    coeffs = constant_system(b, 1.0)
    psi = fundamental_solution(coeffs, (0.0, 1.0))
    rep = crossing_form(psi, dirichlet(n), start, 0.0)
    k = psi.space.j @ b
    c_dot = k[n:, :n]  # position-block rate of the flow at Id
    p = np.array([1.0, 0.0])
    expected = float(p @ c_dot @ p)
    assert rep.dim == 1
    assert abs(rep.eigenvalues[0] - expected) < 1e-10


def test_crossing_form_preimage_expression_agrees():
    # <psi^T J^T psi' v, v> on preimage vectors equals the standard form on
    # w = psi v, checked on the collar model.
    eps = 0.5
    model = SeifertModel(n=2, epsilon=eps, h1=lambda t: 1.0 + 0.4 * (t - eps / 2) ** 2)
    coeffs = seifert_system(model)
    psi = fundamental_solution(coeffs, (0.0, eps))
    w = window_focal_frame(psi, eps)
    t0 = eps / 2
    m = psi.psi(t0)
    j = psi.space.j
    gen_v = m.T @ j.T @ psi.derivative(t0)
    gen_w = j.T @ psi.derivative(t0) @ (-j @ m.T @ j)
    for col in range(w.z.shape[1]):
        v = w.z[:, col]
        lhs = v @ gen_v @ v
        wv = m @ v
        rhs = wv @ gen_w @ wv
        assert abs(lhs - rhs) < 1e-10


def test_crossing_form_requires_intersection():
    psi = ball_flow(2, 1.0)
    with pytest.raises(ValueError):
        crossing_form(psi, dirichlet(1), neumann(1), 0.3)


def test_degenerate_crossing_reported():
    # A monotone reparametrization with vanishing speed at the crossing
    # kills the crossing form; the engine must refuse to assign a sign.
    eps = 1.0
    psi = ball_flow(2, eps)
    path = act_on(psi, window_focal_frame(psi, eps))
    s_star = 0.5
    phi = lambda s: eps / 2 + eps * (s - s_star) ** 3 / 0.75
    dphi = lambda s: 3 * eps * (s - s_star) ** 2 / 0.75
    warped = path.reparametrized(phi, dphi, (0.0, 1.0))
    with pytest.raises(DegenerateCrossingError):
        detect_crossings(warped, dirichlet(1), OPTS)


def test_constant_intersection_flagged():
    path = constant_path(dirichlet(2), (0.0, 1.0))
    with pytest.raises(DegenerateCrossingError):
        detect_crossings(path, dirichlet(2), OPTS)


def test_cluster_error():
    # two focal instants separated by less than the resolvable gap
    n = 2
    t1, t2 = 0.5, 0.5 + 5e-9
    frame = LagrangianFrame(np.vstack([np.eye(n), -np.diag([t1, t2])]))
    coeffs, _ = throwing_ball_system(n + 1, 1.0)
    psi = fundamental_solution(coeffs, (0.0, 1.0))
    path = act_on(psi, frame)
    with pytest.raises(UnresolvedClusterError):
        detect_crossings(path, dirichlet(n), CrossingOptions(grid=512))


def test_pair_crossing_antisymmetry():
    rng = np.random.default_rng(8)
    from maslov.engine.crossings import detect_pair_crossings
    for _ in range(5):
        n = int(rng.integers(1, 4))
        p1, _ = random_orbit(rng, n)
        p2, _ = random_orbit(rng, n)
        fwd = detect_pair_crossings(p1, p2, OPTS)
        bwd = detect_pair_crossings(p2, p1, OPTS)
        assert len(fwd) == len(bwd)
        for r1, r2 in zip(fwd, bwd):
            assert abs(r1.t - r2.t) < 1e-8
            assert r1.multiplicity == r2.multiplicity
            assert np.allclose(sorted(r1.form.eigenvalues),
                               sorted(-np.asarray(r2.form.eigenvalues)), atol=1e-8)
            assert r1.form.signature == -r2.form.signature


def test_report_serialization():
    psi = ball_flow(3, 0.8)
    path = act_on(psi, window_focal_frame(psi, 0.8))
    from maslov.engine.indices import clm_index
    report = clm_index(path, dirichlet(2), OPTS)
    blob = report.as_dict()
    assert blob["convention"] == "CLM"
    assert isinstance(blob["index"], int)
    assert blob["crossings"][0]["kind"] == "interior"
    assert blob["crossings"][0]["multiplicity"] == 2


def test_crossing_form_block_derivative_neumann_reference():
    # Against L_N the block formula flips sign: vectors (0, q) with q in the
    # kernel of the position-graph generator feel -<q, b'(t0) q> with b the
    # upper-right flow block at psi(t0) = Id.
    rng = np.random.default_rng(6)
    n = 2
    gen = np.diag([0.0, 0.9])  # graph {(B q, q)} over L_N, kernel = first axis
    start = LagrangianFrame(np.vstack([gen, np.eye(n)]))
    b = random_symmetric(rng, 2 * n, 1.0)
    psi = fundamental_solution(constant_system(b, 1.0), (0.0, 1.0))
    rep = crossing_form(psi, neumann(n), start, 0.0)
    k = psi.space.j @ b
    b_dot = k[:n, n:]  # momentum-block rate in the position direction
    q = np.array([1.0, 0.0])
    assert rep.dim == 1
    assert abs(rep.eigenvalues[0] - (-q @ b_dot @ q)) < 1e-10


def test_pointwise_path_central_differences():
    # a path handed over without derivative data falls back to central
    # finite differences and still produces the right index and form signs
    from maslov.engine.paths import LagrangianPath
    from maslov.engine.indices import clm_index
    psi = fundamental_solution(constant_system(np.eye(2), np.pi), (0.0, np.pi))
    bare = LagrangianPath(lambda t: psi.psi(t) @ neumann(1).z, (0.0, np.pi),
                          psi.space)
    assert bare.fd_step == pytest.approx(1e-6 * np.pi)
    report = clm_index(bare, dirichlet(1), OPTS)
    assert report.index == 1
    (rec,) = report.records
    assert abs(rec.t - np.pi / 2) < 1e-8
    assert abs(rec.form.eigenvalues[0] - 1.0) < 1e-6
