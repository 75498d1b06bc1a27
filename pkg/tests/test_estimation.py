import math

import numpy as np
import pytest

import qkl.estimation as est
from qkl.errors import ConfigurationError, ContractViolationError, SolverError
from qkl.estimation import (
    CLASSICAL,
    COHERENT,
    HomodyneConfig,
    classical_problem,
    coherent_feedback_problem,
    coherent_problem,
    cost,
    estimator_realization,
    solve_problem,
    sweep,
)
from qkl.figures import FIGURE_CONFIGS
from qkl.systems import (
    QuantumSystem,
    SqueezerParams,
    build_feedback_squeezer_controller,
    build_feedback_squeezer_plant,
    build_squeezer_plant,
)
from qkl.doubled import DoubledMatrix

C_PLAIN = [0.2, -0.2]
C_FB = [2.0 ** -0.5, -(2.0 ** -0.5)]

# spot values frozen from an independent dense CARE implementation
FROZEN = {
    ("fig4", 0.0): (0.10183698185108092, 0.10440567848430109),
    ("fig4", 30.0): (0.10547852089211529, 0.10611044329852493),
    ("fig5", 0.0): (0.12548028786775733, 0.13236731038238045),
    ("fig5", 30.0): (0.14309730229927034, 0.13679010913989487),
    ("fig6", 0.0): (1.300186566514793, 1.2558237148825946),
    ("fig6", 45.0): (1.3333333333333328, 1.2753623188405798),
    ("fig9", 45.0): (1.3333333333333328, 1.365853658536586),
    ("fig9", 135.0): (1.2807764064044145, 1.27619682375247),
}


def _config_problems(fid, deg):
    cfg = FIGURE_CONFIGS[fid]
    plant, ctrl = cfg.build_plant(), cfg.build_controller()
    hd = HomodyneConfig.from_degrees(deg)
    classical = classical_problem(plant, hd)
    if cfg.scheme == COHERENT:
        coherent = coherent_problem(plant, ctrl, hd)
    else:
        coherent = coherent_feedback_problem(plant, ctrl, hd)
    return classical, coherent


def test_homodyne_projection_structure():
    hd = HomodyneConfig.from_degrees([30.0, 120.0])
    ell = hd.L
    assert ell.shape == (2, 4)
    np.testing.assert_allclose(ell @ ell.T, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(ell[0, 0], math.cos(math.radians(30.0)))
    np.testing.assert_allclose(ell[1, 3], math.sin(math.radians(120.0)))


def test_passive_cavity_classical_cost():
    plant = build_squeezer_plant(SqueezerParams(4.0, (4.0,), 0.0), C_PLAIN)
    prob = classical_problem(plant, HomodyneConfig.from_degrees(0.0))
    sol = solve_problem(prob)
    assert np.linalg.norm(sol.gain) <= 1e-10
    assert cost(prob) == pytest.approx(0.08, abs=1e-10)


def test_feedback_plant_classical_cost_flat():
    plant = build_feedback_squeezer_plant(SqueezerParams(4.0, (2.0, 2.0), 0.0), C_FB)
    for deg in (0.0, 30.0, 90.0, 150.0):
        prob = classical_problem(plant, HomodyneConfig.from_degrees(deg))
        assert cost(prob) == pytest.approx(1.0, abs=1e-10)


def test_active_plant_classical_cost_varies_with_angle():
    plant = build_squeezer_plant(SqueezerParams(4.0, (4.0,), 1.0), C_PLAIN)
    values = [
        cost(classical_problem(plant, HomodyneConfig.from_degrees(d)))
        for d in np.linspace(0.0, 180.0, 19)
    ]
    assert max(values) - min(values) > 1e-3


@pytest.mark.parametrize("fid,deg", sorted(FROZEN))
def test_costs_match_independent_solver(fid, deg):
    expected_classical, expected_coherent = FROZEN[(fid, deg)]
    classical, coherent = _config_problems(fid, deg)
    assert cost(classical) == pytest.approx(expected_classical, abs=1e-9)
    assert cost(coherent) == pytest.approx(expected_coherent, abs=1e-9)


def test_equality_for_passive_plant_any_controller():
    # fig3 pairing: passive plant, active controller
    for deg in np.linspace(0.0, 180.0, 19):
        classical, coherent = _config_problems("fig3", deg)
        assert cost(coherent) == pytest.approx(cost(classical), abs=1e-10)


def test_passive_plant_augmented_covariance_block_diagonal():
    _, coherent = _config_problems("fig3", 72.0)
    p = solve_problem(coherent).P
    assert np.linalg.norm(p[:2, 2:], 2) <= 1e-8
    np.testing.assert_allclose(p[:2, :2], np.eye(2), atol=1e-8)


def test_feedback_equality_recovers_commutation_blocks():
    for deg in (0.0, 30.0):
        classical, coherent = _config_problems("thm4", deg)
        assert cost(coherent) == pytest.approx(cost(classical), abs=1e-10)
        assert cost(classical) == pytest.approx(1.0, abs=1e-10)
        p = solve_problem(coherent).P
        np.testing.assert_allclose(p[:2, :2], np.eye(2), atol=1e-8)
        np.testing.assert_allclose(p[2:, 2:], np.eye(2), atol=1e-8)
        assert np.linalg.norm(p[:2, 2:], 2) <= 1e-8


def test_coherent_improvement_cases():
    classical, coherent = _config_problems("fig5", 30.0)
    assert cost(coherent) < cost(classical)
    classical, coherent = _config_problems("fig6", 100.0)
    assert cost(coherent) < cost(classical)


def test_cost_is_real_and_nonnegative():
    for fid, deg in (("fig5", 30.0), ("fig9", 45.0), ("fig4", 0.0)):
        classical, coherent = _config_problems(fid, deg)
        for prob in (classical, coherent):
            sol = solve_problem(prob)
            value = (prob.c_selector @ sol.P @ prob.c_selector.conj().T)[0, 0]
            assert abs(value.imag) <= 1e-12
            assert value.real >= 0.0


def test_cost_invariant_under_global_phase_of_c():
    plant = build_squeezer_plant(SqueezerParams(4.0, (4.0,), 0.5), C_PLAIN)
    phased = build_squeezer_plant(
        SqueezerParams(4.0, (4.0,), 0.5), np.exp(0.7j) * np.asarray(C_PLAIN)
    )
    hd = HomodyneConfig.from_degrees(30.0)
    assert cost(classical_problem(plant, hd)) == pytest.approx(
        cost(classical_problem(phased, hd)), abs=1e-12
    )


def test_cost_periodic_under_half_turn():
    plant = build_squeezer_plant(SqueezerParams(4.0, (4.0,), 1.0), C_PLAIN)
    for deg in (10.0, 77.0, 150.0):
        a = cost(classical_problem(plant, HomodyneConfig.from_degrees(deg)))
        b = cost(classical_problem(plant, HomodyneConfig.from_degrees(deg + 180.0)))
        assert a == pytest.approx(b, abs=1e-10)


def test_estimator_realization_zero_gain_for_passive_plant():
    plant = build_squeezer_plant(SqueezerParams(4.0, (4.0,), 0.0), C_PLAIN)
    prob = classical_problem(plant, HomodyneConfig.from_degrees(40.0))
    fe, ge, he = estimator_realization(prob)
    assert np.linalg.norm(ge) <= 1e-10
    np.testing.assert_allclose(fe, plant.F.realized, atol=1e-10)
    np.testing.assert_allclose(he, prob.c_selector)


def test_estimator_realization_is_hurwitz():
    _, coherent = _config_problems("fig5", 30.0)
    fe, _, _ = estimator_realization(coherent)
    assert fe.shape == (4, 4)
    assert np.linalg.eigvals(fe).real.max() < -1e-6


def test_angle_count_must_match_outputs():
    plant = build_squeezer_plant(SqueezerParams(4.0, (4.0,), 0.0), C_PLAIN)
    with pytest.raises(ConfigurationError):
        classical_problem(plant, HomodyneConfig.from_degrees([0.0, 30.0]))


def test_selector_padding_for_augmented_schemes():
    _, coherent = _config_problems("fig3", 0.0)
    assert coherent.c_selector.shape == (1, 4)
    assert not np.any(coherent.c_selector[0, 2:])


def _broken_feedback_controller():
    ctrl = build_feedback_squeezer_controller(SqueezerParams(16.0, (8.0, 8.0), 0.0))
    bad_k = DoubledMatrix(np.array([[1.0, 0.5], [0.0, 1.0]]), np.zeros((2, 2)))
    return QuantumSystem(
        n_modes=1,
        F=ctrl.F,
        G=ctrl.G,
        H=ctrl.H,
        K=bad_k,
        C=None,
        input_groups=ctrl.input_groups,
        output_groups=ctrl.output_groups,
    )


def test_feedthrough_contract_violation_names_block():
    plant = build_feedback_squeezer_plant(SqueezerParams(4.0, (2.0, 2.0), 0.0), C_FB)
    with pytest.raises(ContractViolationError, match="Ktilde_c2"):
        coherent_feedback_problem(
            plant, _broken_feedback_controller(), HomodyneConfig.from_degrees(0.0)
        )


def test_scheme_pairing_validation():
    plant = build_squeezer_plant(SqueezerParams(4.0, (4.0,), 0.0), C_PLAIN)
    fb_ctrl = build_feedback_squeezer_controller(SqueezerParams(16.0, (8.0, 8.0), 0.0))
    with pytest.raises(ConfigurationError):
        coherent_problem(plant, fb_ctrl, HomodyneConfig.from_degrees(0.0))
    with pytest.raises(ConfigurationError):
        coherent_feedback_problem(plant, fb_ctrl, HomodyneConfig.from_degrees(0.0))


class TestSweep:
    def test_single_point_grid(self):
        plant = build_squeezer_plant(SqueezerParams(4.0, (4.0,), 0.0), C_PLAIN)
        curve = sweep(plant, None, CLASSICAL, [math.pi / 2])
        assert len(curve.thetas_deg) == 1
        assert curve.thetas_deg[0] == pytest.approx(90.0)
        assert curve.coherent_costs is None

    def test_grid_validation(self):
        plant = build_squeezer_plant(SqueezerParams(4.0, (4.0,), 0.0), C_PLAIN)
        with pytest.raises(ConfigurationError):
            sweep(plant, None, CLASSICAL, [])
        with pytest.raises(ConfigurationError):
            sweep(plant, None, CLASSICAL, [4.0])
        with pytest.raises(ConfigurationError):
            sweep(plant, None, "mystery", [0.0])

    def test_csv_format(self):
        cfg = FIGURE_CONFIGS["fig3"]
        curve = sweep(
            cfg.build_plant(),
            cfg.build_controller(),
            COHERENT,
            np.radians([0.0, 90.0]),
        )
        lines = curve.csv_text().strip().split("\n")
        assert lines[0] == "theta_deg,classical_cost,coherent_cost"
        assert len(lines) == 3
        first = lines[1].split(",")
        assert first[0] == "0"
        assert first[1] == format(0.08, ".15g")

    def test_classical_only_csv_has_two_columns(self):
        plant = build_squeezer_plant(SqueezerParams(4.0, (4.0,), 0.0), C_PLAIN)
        curve = sweep(plant, None, CLASSICAL, [0.0, math.pi / 4])
        assert curve.csv_text().splitlines()[0] == "theta_deg,classical_cost"

    def test_failed_points_recorded_not_dropped(self, monkeypatch):
        plant = build_squeezer_plant(SqueezerParams(4.0, (4.0,), 0.0), C_PLAIN)
        real_solve = est.solve_care
        calls = {"n": 0}

        def flaky(fd, tol=None, polish=True):
            calls["n"] += 1
            if calls["n"] == 2:
                raise SolverError("synthetic failure")
            return real_solve(fd, tol=tol, polish=polish)

        monkeypatch.setattr(est, "solve_care", flaky)
        curve = sweep(plant, None, CLASSICAL, np.radians([0.0, 30.0, 60.0]))
        assert curve.classical_costs[1] is None
        assert curve.classical_costs[0] is not None
        assert len(curve.diagnostics) == 1
        assert "synthetic failure" in curve.diagnostics[0]
        row = curve.csv_text().splitlines()[2]
        assert row.endswith(",")
