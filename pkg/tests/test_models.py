import numpy as np
import pytest

from maslov.core.frames import dirichlet
from maslov.engine.crossings import CrossingOptions
from maslov.engine.indices import clm_index
from maslov.hamiltonian.flow import act_on, fundamental_solution
from maslov.models import (PotentialModel, SeifertModel,
                           ball_dirichlet_report, coefficient_path_from_json,
                           hill_region, oscillator_brake_setup,
                           oscillator_degenerate_epsilons,
                           oscillator_expected_index, seifert_system,
                           throwing_ball_system, window_boundary_report)

OPTS = CrossingOptions(grid=512)


def test_hill_singular_ball():
    model = PotentialModel("homogeneous-singular", 2.0)
    region = hill_region(model, -0.25)
    assert region.kind == "ball"
    assert region.radius == pytest.approx((1 / 0.25) ** 0.5)
    assert hill_region(model, 0.5).kind == "whole-space"
    assert hill_region(model, 0.0).boundary_empty


def test_hill_oscillator_ellipse():
    a = 1.3
    model = PotentialModel("anisotropic-oscillator", 3.0)
    region = hill_region(model, a ** 2 / 2)
    assert region.kind == "ellipse"
    assert region.semi_axes == pytest.approx((a, a / 3.0))
    assert hill_region(model, -1.0).kind == "empty"


def test_hill_kepler_ellipse():
    model = PotentialModel("anisotropic-kepler", 2.0)
    region = hill_region(model, -0.5)
    assert region.kind == "ellipse"
    assert region.semi_axes == pytest.approx((1.0, 2.0))
    assert hill_region(model, 0.1).kind == "whole-space"


def test_hill_membership_matches_potential():
    rng = np.random.default_rng(4)
    models = [PotentialModel("homogeneous-singular", 1.5),
              PotentialModel("anisotropic-kepler", 2.5),
              PotentialModel("anisotropic-oscillator", 2.0)]
    for model in models:
        for k in (-0.7, 0.4):
            region = hill_region(model, k)
            for _ in range(25):
                q = rng.uniform(-2, 2, 2)
                if np.linalg.norm(q) < 1e-3:
                    continue
                assert region.contains(q) == (model.value(q) <= k + 1e-12)


def test_potential_validation():
    with pytest.raises(ValueError):
        PotentialModel("anisotropic-kepler", 0.5)
    with pytest.raises(ValueError):
        PotentialModel("unknown", 1.0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ball_window_index(n):
    coeffs, orbit = throwing_ball_system(n, 1.0)
    assert orbit(0.5) == 0.0 and orbit(0.0) == pytest.approx(0.125)
    rep = window_boundary_report(coeffs, 1.0, OPTS)
    assert rep["index"] == n - 1
    assert rep["defect"] < 1e-12


def test_ball_fixed_endpoint_morse_vanishes():
    rep = ball_dirichlet_report(3, 1.5, OPTS)
    assert rep["index"] == 2
    assert rep["morse_dirichlet"] == 0


def test_seifert_positive_h1_required():
    with pytest.raises(ValueError):
        seifert_system(SeifertModel(n=2, epsilon=1.0, h1=lambda t: t - 0.5))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_seifert_window_index(n):
    eps = 0.8
    model = SeifertModel(n=n, epsilon=eps,
                         h1=lambda t: 2.0 - np.exp(-8 * (t - eps / 2) ** 2) * 0.7)
    rep = window_boundary_report(seifert_system(model), eps, OPTS)
    assert rep["index"] == n - 1
    interior = [r for r in rep["crossings"] if r.kind == "interior"]
    assert len(interior) == 1 and abs(interior[0].t - eps / 2) < 1e-8
    assert interior[0].multiplicity == n - 1
    assert min(interior[0].form.eigenvalues) > 0


def test_oscillator_families():
    data, orbit = oscillator_brake_setup(0.4, 1.0)
    assert data.period == pytest.approx(2 * np.pi)
    assert orbit(0.0)[0] == pytest.approx(1.0) and orbit(0.0)[1] == 0.0
    # braking: velocity vanishes at t = 0 and t = pi
    h = 1e-6
    assert abs(orbit(h)[0] - orbit(-h)[0]) < 1e-9

    mu = 0.5
    data2, orbit2 = oscillator_brake_setup(mu, 1.0, d0=1.0 / mu)
    assert data2.period == pytest.approx(2 * np.pi / mu)
    assert orbit2(0.0)[1] == pytest.approx(1.0 / mu ** 2 * mu)  # e/mu
    with pytest.raises(ValueError):
        oscillator_brake_setup(2.0, 1.0, d0=10.0)
    with pytest.raises(ValueError):
        oscillator_brake_setup(1.0, 1.0, d0=0.3)


def test_oscillator_jacobi_blocks():
    data, _ = oscillator_brake_setup(1.7, 1.0)
    b = data.coefficients.b(0.0)
    assert np.allclose(b, np.diag([1.0, 1.0, 1.0, 1.7 ** 2]))


@pytest.mark.parametrize("mu,half,exact", [(0.4, 1, 2), (2.0, 3, None),
                                           (1e-6, 1, 2), (0.5, 1, 2)])
def test_oscillator_expected_index(mu, half, exact):
    out = oscillator_expected_index(mu)
    assert out["clm_half"] == half
    assert out["lower_bound"] == 2 * half
    assert out["exact_if_small_mu"] == exact
    for k, t_k in enumerate(out["block_crossings"]):
        assert t_k == pytest.approx((2 * k + 1) * np.pi / (2 * mu))


def test_oscillator_expected_matches_computed():
    mu = 2.0
    out = oscillator_expected_index(mu)
    data, _ = oscillator_brake_setup(mu, 1.0)
    psi = fundamental_solution(data.coefficients, (0.0, np.pi))
    from maslov.core.frames import neumann
    report = clm_index(act_on(psi, neumann(2)), dirichlet(2), OPTS)
    assert int(report.index) == out["clm_half"]


def test_degenerate_epsilon_catalog():
    eps_list = oscillator_degenerate_epsilons(2.0, k_max=2)
    assert np.pi / 2 * (1 + 1 / 2.0) in eps_list


def test_coefficient_json_named_models():
    osc = coefficient_path_from_json({"model": "oscillator", "mu": 2.0})
    assert np.allclose(osc.b(0.1), np.diag([1.0, 1.0, 1.0, 4.0]))
    ball = coefficient_path_from_json({"model": "ball", "n": 3, "epsilon": 0.5})
    assert ball.n == 2
    seif = coefficient_path_from_json({"model": "seifert", "n": 2, "epsilon": 1.0,
                                       "wobble": 0.5})
    assert seif.b(0.5)[0, 0] == pytest.approx(1.0)  # h1(eps/2) = 1
    hess = coefficient_path_from_json({"hessian": [[2.0]], "T": 3.0})
    assert hess.mechanical and hess.horizon == 3.0
    table = coefficient_path_from_json({"t": [0.0, 1.0],
                                        "B": [np.eye(2).tolist(),
                                              (3 * np.eye(2)).tolist()]})
    assert np.allclose(table.b(0.5), 2 * np.eye(2))
    with pytest.raises(ValueError):
        coefficient_path_from_json({"model": "pendulum"})


def test_degenerate_epsilon_rejected():
    mu = 4.0
    bad = (np.pi / 2) * (1 - 1 / mu)  # k = -1 window length
    with pytest.raises(ValueError):
        oscillator_brake_setup(mu, 1.0, epsilon=bad)
    # auto-chosen epsilon steps off degenerate values
    data, _ = oscillator_brake_setup(mu, 1.0)
    assert all(abs(data.epsilon - v) > 1e-6 * data.period
               for v in oscillator_degenerate_epsilons(mu) if v > 0)
