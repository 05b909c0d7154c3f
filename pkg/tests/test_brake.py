import numpy as np
import pytest

from helpers import constant_system

from maslov.brake import (BrakeOrbitData, brake_morse_index, free_period_index,
                          geometric_index, instability_parity,
                          is_symplectic_shear, segment_decomposition,
                          shear_morse_index)
from maslov.core.frames import diagonal, dirichlet, neumann, product_frame
from maslov.engine.crossings import CrossingOptions
from maslov.engine.errors import NumericalAbort
from maslov.engine.indices import clm_index
from maslov.engine.triple import triple_index
from maslov.hamiltonian.coefficients import (mechanical_coefficients,
                                             piecewise_constant_coefficients)
from maslov.hamiltonian.flow import fundamental_solution, graph_path
from maslov.models import oscillator_brake_setup, throwing_ball_system

OPTS = CrossingOptions(grid=1024)


def shear_system(period=4.0, eps=0.5):
    """Reparametrized isotropic rotation: each partition window advances the
    phase by exactly pi, so psi fixes W_D at eps, T/2, T/2 + eps."""
    breaks = [0.0, eps, period / 2, period / 2 + eps, period]
    rates = [np.pi / eps, np.pi / (period / 2 - eps)] * 2
    coeffs = piecewise_constant_coefficients(breaks, [r * np.eye(4) for r in rates])
    return BrakeOrbitData(period=period, epsilon=eps, coefficients=coeffs, n=2,
                          require_mechanical=False)


def test_geometric_index_rotation_window():
    # Away from phase multiples of 2 pi the graph of a rotation never meets
    # the diagonal, so the window contributes nothing; against W_N x W_D the
    # same window sees exactly the quarter-turn crossing.
    delta = 0.3
    coeffs = constant_system(np.eye(2), np.pi)
    psi = fundamental_solution(coeffs, (0.0, np.pi))
    geo, report = geometric_index(psi, (delta, np.pi - delta), OPTS)
    assert geo == 0 and report.records == ()
    gp = graph_path(psi, (delta, np.pi - delta))
    boundary = clm_index(gp, product_frame(neumann(1), dirichlet(1)), OPTS)
    assert len([r for r in boundary.records if r.kind == "interior"]) == 1


def test_geometric_index_oscillator_identity():
    data, _ = oscillator_brake_setup(0.7, 1.0)
    psi = fundamental_solution(data.coefficients, (0.0, data.period))
    geo, _ = geometric_index(psi, opts=OPTS)
    bd = brake_morse_index(data, OPTS, with_oracle=False)
    assert geo - 2 == bd.total


@pytest.mark.parametrize("mu,total", [(0.4, 2), (2.0, 4)])
def test_brake_morse_index_oscillator(mu, total):
    data, _ = oscillator_brake_setup(mu, 1.0)
    bd = brake_morse_index(data, OPTS)
    assert bd.total == total
    assert bd.verify_sum()
    assert bd.all_checks_pass
    # compact literal = total - window - n - 1 (no window crossings here)
    assert bd.details["compact_total"] == bd.total - data.n - 1
    assert bd.details["compact_total_matches"] is False


def test_compact_form_gap_is_the_t0_term():
    # literal = clm[eps,T] - tau - 1; total = clm[0,T] - tau + n: the gap is
    # clm[0,eps] + n + 1 - (t0 triple term 2n) = window + 1 - n.
    data, _ = oscillator_brake_setup(0.4, 1.0)
    bd = brake_morse_index(data, OPTS, with_oracle=False)
    window = dict(bd.terms)[f"clm[0,{data.epsilon:.6g}]"]
    assert bd.total - bd.details["compact_total"] == window + data.n + 1


def test_segment_decomposition_oscillator():
    data, _ = oscillator_brake_setup(0.4, 1.0)
    psi = fundamental_solution(data.coefficients, (0.0, data.period))
    bd = segment_decomposition(psi, neumann(2), dirichlet(2), data.partition, OPTS)
    assert bd.total == 2
    assert bd.all_checks_pass
    seg_values = [s["clm"] for s in bd.details["segments"]]
    assert seg_values == [0, 1, 0, 2]
    # the printed four-segment form omits the t0 triple term 2n = 4
    assert bd.details["compact_segment_total"] == bd.total - 4


def test_segment_decomposition_arbitrary_products():
    # the assembled total is independent of the chosen product Lagrangian
    data, _ = oscillator_brake_setup(1.3, 1.0)
    psi = fundamental_solution(data.coefficients, (0.0, data.period))
    for l1, l2 in [(neumann(2), dirichlet(2)), (dirichlet(2), neumann(2)),
                   (dirichlet(2), dirichlet(2))]:
        bd = segment_decomposition(psi, l1, l2, data.partition, OPTS)
        assert bd.all_checks_pass
        assert bd.total == bd.details["geometric_index"] - 2


def test_identity_flow_segments():
    # zero coefficients: every segment term vanishes and the closing terms
    # cancel against the t0 term up to the spectral constant
    coeffs = constant_system(np.zeros((4, 4)), 1.0)
    psi = fundamental_solution(coeffs, (0.0, 1.0))
    bd = segment_decomposition(psi, neumann(2), dirichlet(2),
                               (0.0, 0.1, 0.5, 0.6, 1.0), OPTS)
    assert [s["clm"] for s in bd.details["segments"]] == [0, 0, 0, 0]
    tau = triple_index(diagonal(2), product_frame(neumann(2), dirichlet(2)),
                       diagonal(2))
    assert bd.total == tau - tau - 2  # = -n


def test_brake_requires_mechanical():
    coeffs = constant_system(np.eye(4) * 0.5, 1.0)
    with pytest.raises(ValueError):
        BrakeOrbitData(period=1.0, epsilon=0.01, coefficients=coeffs, n=2)


def test_brake_epsilon_bounds():
    data, _ = oscillator_brake_setup(1.0, 1.0)
    with pytest.raises(ValueError):
        BrakeOrbitData(period=data.period, epsilon=data.period,
                       coefficients=data.coefficients, n=2)


def test_epsilon_window_validity_abort():
    # an epsilon so large that genuine crossings land in (eps/2, eps]
    data, _ = oscillator_brake_setup(1.0, 1.0, epsilon=2.0)
    with pytest.raises(NumericalAbort):
        brake_morse_index(data, OPTS, with_oracle=False)
    bd = brake_morse_index(data, OPTS, with_oracle=False, check_epsilon=False)
    assert bd.total == brake_morse_index(
        oscillator_brake_setup(1.0, 1.0)[0], OPTS, with_oracle=False).total


def test_is_symplectic_shear_examples():
    # identity-like flow fixes everything
    coeffs = constant_system(np.zeros((4, 4)), 1.0)
    psi = fundamental_solution(coeffs, (0.0, 1.0))
    assert is_symplectic_shear(psi, 1.0, 0.1)
    # the ballistic flow fixes W_N, not W_D
    ball, _ = throwing_ball_system(2, 1.0)
    psi_ball = fundamental_solution(ball, (0.0, 1.0))
    assert not is_symplectic_shear(psi_ball, 1.0, 0.1)
    # rotations at generic instants fix nothing
    rot = constant_system(np.eye(2), 1.0)
    psi_rot = fundamental_solution(rot, (0.0, 1.0))
    assert not is_symplectic_shear(psi_rot, 1.0, 0.17)


def test_shear_morse_index_doubles():
    data = shear_system()
    sm = shear_morse_index(data, OPTS)
    assert sm.total == 6
    assert sm.details["halves"] == {"c1": 2, "c2": 2, "c3": 2, "c4": 2}
    assert sm.all_checks_pass
    bm = brake_morse_index(data, OPTS)
    assert bm.total == sm.total
    assert bm.details["geometric_index"] - 2 == sm.total
    # psi(T) = Id: the closing triple term is 2n and the literal doubled
    # form lands n + 2 + 2 c1 below the verified assembly
    assert sm.details["compact_shear_total"] == sm.total - 2 - 2 * 2


def test_shear_requires_hypothesis():
    data, _ = oscillator_brake_setup(0.4, 1.0)
    with pytest.raises(ValueError):
        shear_morse_index(data, OPTS)


def test_periodic_isotropic_lower_bound_and_instability():
    n = 3
    coeffs = mechanical_coefficients(np.eye(n), 2 * np.pi)
    data = BrakeOrbitData(period=2 * np.pi, epsilon=2 * np.pi / 100,
                          coefficients=coeffs, n=n)
    bd = brake_morse_index(data, OPTS)
    assert bd.total == 3 >= n - 2
    assert bd.all_checks_pass
    par = instability_parity(data, OPTS)
    assert par["unstable"] is True
    assert par["parity_match"] and par["parity_lhs"] == 0


def test_instability_unknown_for_odd_triple():
    data, _ = oscillator_brake_setup(0.4, 1.0)
    par = instability_parity(data, OPTS)
    assert par["triple_term"] == 3
    assert par["unstable"] is None
    # the two parities are evaluated independently; here they disagree
    assert par["parity_lhs"] == 0 and par["parity_rhs"] == 1
    assert not par["parity_match"]


def test_free_period_index():
    assert free_period_index(5, np.eye(3), 0) == 2
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert free_period_index(5, rot, 1) == 6
    with pytest.raises(ValueError):
        free_period_index(5, np.diag([2.0, 1.0]), 0)
    with pytest.raises(ValueError):
        free_period_index(5, np.eye(2), 2)


def test_free_period_consistency_with_pipeline():
    data, _ = oscillator_brake_setup(0.4, 1.0)
    bd = brake_morse_index(data, OPTS, with_oracle=True)
    geo = bd.details["geometric_index"]
    # parallel frame closes up: A = Id, full kernel
    assert free_period_index(geo, np.eye(2), 0) == bd.total


def test_geometric_index_identity_flow_degenerate():
    # a flow frozen at the identity keeps its graph on the diagonal train;
    # the index machinery must refuse with the perturbation guidance
    from maslov.engine.errors import DegenerateCrossingError
    coeffs = constant_system(np.zeros((4, 4)), 1.0)
    psi = fundamental_solution(coeffs, (0.0, 1.0))
    with pytest.raises(DegenerateCrossingError):
        geometric_index(psi, opts=OPTS)
