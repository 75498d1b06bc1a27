import numpy as np
import pytest

from qkl.doubled import swap_permutation
from qkl.errors import (
    DimensionError,
    NoStabilizingSolutionError,
    SingularInnovationError,
    StepSizeError,
)
from qkl.estimation import HomodyneConfig, classical_problem, coherent_problem
from qkl.realizability import check_annihilation_realizable, doubled_commutation
from qkl.riccati import (
    FilterData,
    care_residual,
    default_horizon,
    integrate_care_oracle,
    solve_care,
)
from qkl.systems import SqueezerParams, build_squeezer_controller, build_squeezer_plant

C_PLAIN = [0.2, -0.2]


def _passive_filter(theta_deg=0.0):
    plant = build_squeezer_plant(SqueezerParams(4.0, (4.0,), 0.0), C_PLAIN)
    return classical_problem(plant, HomodyneConfig.from_degrees(theta_deg)).filter


def _fig3_augmented(theta_deg=0.0):
    plant = build_squeezer_plant(SqueezerParams(4.0, (4.0,), 0.0), C_PLAIN)
    ctrl = build_squeezer_controller(SqueezerParams(16.0, (16.0,), 2.0))
    return coherent_problem(plant, ctrl, HomodyneConfig.from_degrees(theta_deg)).filter


def _squeezer_filter(chi, theta_deg):
    plant = build_squeezer_plant(SqueezerParams(4.0, (4.0,), chi), C_PLAIN)
    return classical_problem(plant, HomodyneConfig.from_degrees(theta_deg)).filter


class TestCareResidual:
    def test_commutation_matrix_solves_realizable_riccati(self):
        plant = build_squeezer_plant(SqueezerParams(4.0, (4.0,), 0.0), C_PLAIN)
        theta = doubled_commutation(check_annihilation_realizable(plant).theta)
        for deg in (0.0, 30.0, 90.0, 150.0):
            fd = _passive_filter(deg)
            assert care_residual(fd, theta) <= 1e-10

    def test_zero_noise_zero_solution(self):
        fd = FilterData(
            Fa=-np.eye(2),
            Ga=np.zeros((2, 2)),
            Ha=np.eye(2),
            Ka=np.eye(2),
            L=np.array([[1.0, 0.0]]),
        )
        assert care_residual(fd, np.zeros((2, 2))) == 0.0

    def test_residual_grows_linearly_in_perturbation(self):
        fd = _squeezer_filter(0.5, 30.0)
        p = solve_care(fd).P
        rng = np.random.default_rng(3)
        e = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        e = 0.5 * (e + e.conj().T)
        r1 = care_residual(fd, p + 1e-6 * e)
        r2 = care_residual(fd, p + 2e-6 * e)
        assert r1 > 1e-9  # perturbation is visible
        assert r2 / r1 == pytest.approx(2.0, rel=0.05)

    def test_singular_innovation_raises(self):
        fd = FilterData(
            Fa=-np.eye(1),
            Ga=np.ones((1, 1)),
            Ha=np.ones((1, 1)),
            Ka=np.zeros((1, 1)),
            L=np.array([[1.0]]),
        )
        with pytest.raises(SingularInnovationError):
            care_residual(fd, np.zeros((1, 1)))


class TestSolveCare:
    def test_passive_cavity_identity_solution_any_angle(self):
        for deg in (0.0, 30.0, 90.0, 150.0):
            sol = solve_care(_passive_filter(deg))
            np.testing.assert_allclose(sol.P, np.eye(2), atol=1e-10)
            assert np.linalg.norm(sol.gain) <= 1e-10
            assert sol.residual <= 1e-12

    def test_scalar_perfectly_correlated_noise(self):
        # Ga = Ka = L = 1: innovation explains all process noise, P = 0
        fd = FilterData(
            Fa=np.array([[-1.0]]),
            Ga=np.array([[1.0]]),
            Ha=np.array([[1.0]]),
            Ka=np.array([[1.0]]),
            L=np.array([[1.0]]),
        )
        sol = solve_care(fd)
        oracle = integrate_care_oracle(fd, horizon=20.0)
        np.testing.assert_allclose(sol.P, oracle, atol=1e-8)
        np.testing.assert_allclose(sol.P, np.zeros((1, 1)), atol=1e-10)

    def test_augmented_passive_plant_block_is_commutation(self):
        sol = solve_care(_fig3_augmented(0.0))
        np.testing.assert_allclose(sol.P[:2, :2], np.eye(2), atol=1e-9)
        np.testing.assert_allclose(sol.P[:2, 2:], np.zeros((2, 2)), atol=1e-9)

    def test_solution_invariants_across_configs(self):
        for fd in (
            _squeezer_filter(1.0, 30.0),
            _fig3_augmented(45.0),
            _squeezer_filter(0.5, 120.0),
        ):
            sol = solve_care(fd)
            assert care_residual(fd, sol.P) <= 1e-9
            assert np.linalg.norm(sol.P - sol.P.conj().T, 2) <= 1e-10
            assert np.linalg.eigvalsh(sol.P).min() >= -1e-10
            assert sol.closed_loop_spectrum.real.max() < 0.0

    def test_undetectable_unstable_mode_raises(self):
        fd = FilterData(
            Fa=np.array([[1.0]]),
            Ga=np.array([[1.0]]),
            Ha=np.array([[0.0]]),
            Ka=np.array([[1.0]]),
            L=np.array([[1.0]]),
        )
        with pytest.raises(NoStabilizingSolutionError):
            solve_care(fd)

    def test_unstabilizable_unstable_mode_raises(self):
        fd = FilterData(
            Fa=np.array([[1.0]]),
            Ga=np.array([[0.0]]),
            Ha=np.array([[1.0]]),
            Ka=np.array([[1.0]]),
            L=np.array([[1.0]]),
        )
        with pytest.raises(NoStabilizingSolutionError):
            solve_care(fd)

    def test_paired_angle_conjugation_relation(self):
        # block-swap conjugation maps the angle-theta problem to 90deg - theta
        p30 = solve_care(_squeezer_filter(0.5, 30.0)).P
        p60 = solve_care(_squeezer_filter(0.5, 60.0)).P
        sig = swap_permutation(1)
        np.testing.assert_allclose(sig @ p30.conj() @ sig, p60, atol=1e-12)

    def test_solution_continuous_in_measurement_angle(self):
        # slope bound over a 1e-4 rad step; costs vary O(0.1) per radian here
        delta_deg = np.degrees(1e-4)
        for base in (20.0, 75.0, 140.0):
            p0 = solve_care(_squeezer_filter(1.0, base)).P
            p1 = solve_care(_squeezer_filter(1.0, base + delta_deg)).P
            gap = np.linalg.norm(p1 - p0, 2)
            assert gap <= 10.0 * 1e-4
            assert np.linalg.norm(p1 - p1.conj().T, 2) <= 1e-10
            assert np.linalg.eigvalsh(p1).min() >= -1e-10


class TestOracle:
    def test_passive_cavity_converges_to_identity(self):
        p = integrate_care_oracle(_passive_filter(0.0), horizon=10.0)
        np.testing.assert_allclose(p, np.eye(2), atol=1e-8)

    def test_zero_noise_converges_to_zero(self):
        fd = FilterData(
            Fa=-np.eye(2),
            Ga=np.zeros((2, 2)),
            Ha=np.eye(2),
            Ka=np.eye(2),
            L=np.array([[1.0, 0.0]]),
        )
        np.testing.assert_allclose(integrate_care_oracle(fd, horizon=20.0), 0.0, atol=1e-12)

    def test_zero_start_stays_on_degenerate_manifold(self):
        # passive cavity at theta = 0: from P(0) = 0 the flow reaches the
        # non-stabilizing diag(0, 1), which is why the oracle starts at I
        p = integrate_care_oracle(_passive_filter(0.0), horizon=10.0, p0=np.zeros((2, 2)))
        np.testing.assert_allclose(p, np.diag([0.0, 1.0]), atol=1e-8)

    def test_oracle_matches_solver_on_augmented_system(self):
        fd = _fig3_augmented(30.0)
        gap = np.linalg.norm(solve_care(fd).P - integrate_care_oracle(fd), 2)
        assert gap <= 1e-6

    def test_default_horizon_floor(self):
        assert default_horizon(_passive_filter()) == pytest.approx(25.0)
        assert default_horizon(_fig3_augmented()) == 10.0

    def test_blowup_raises_step_size_error(self):
        fd = FilterData(
            Fa=np.array([[-100.0]]),
            Ga=np.array([[1.0]]),
            Ha=np.array([[1.0]]),
            Ka=np.array([[1.0]]),
            L=np.array([[1.0]]),
        )
        with pytest.raises(StepSizeError):
            integrate_care_oracle(fd, horizon=10.0, step=1.0)


class TestFilterDataValidation:
    def test_non_orthonormal_projection_rejected(self):
        with pytest.raises(DimensionError):
            FilterData(
                Fa=-np.eye(2),
                Ga=np.eye(2),
                Ha=np.eye(2),
                Ka=np.eye(2),
                L=np.array([[1.0, 1.0]]),
            )

    def test_shape_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            FilterData(
                Fa=-np.eye(2),
                Ga=np.eye(3),
                Ha=np.eye(2),
                Ka=np.eye(2),
                L=np.array([[1.0, 0.0]]),
            )
