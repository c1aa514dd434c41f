import json

import numpy as np
import pytest

from aifdom.circuit_models import (
    AllSeqPlantParams,
    ControllerParams,
    FopPlantParams,
    HillParams,
    all_seq_closed_loop,
    fop_closed_loop,
    fop_equilibrium,
    linear_model,
)
from aifdom.dominance import (
    DominanceCertificate,
    InfeasibilityError,
    UnsupportedDegreeError,
    classify,
    inertia,
    lmi_residual,
    load_certificate,
    save_certificate,
    solve_dominance_lmi,
    solve_robust_dominance,
    solve_with_margin_fallback,
    verify_certificate,
)
from aifdom.ode_sim import simulate_and_classify
from aifdom.regions import Region, hull_of_points, point_region, relative_margin

from reference_matrices import P_0DOM_BASE, P_2DOM_K4, P_2DOM_THETA2_4

CP = ControllerParams(2.0, 10.0)
PP1 = FopPlantParams(1.0, 1.0, 1.0, 1.0)
PP4 = FopPlantParams(1.0, 4.0, 1.0, 1.0)
PPK4 = FopPlantParams(1.0, 1.0, 4.0, 1.0)


@pytest.fixture(scope="module")
def baseline_points():
    traj, _ = simulate_and_classify(fop_closed_loop(CP, PP1), [1, 1, 1, 1], 100.0)
    return traj.states[:, :2]


@pytest.fixture(scope="module")
def cycle_points():
    traj, _ = simulate_and_classify(fop_closed_loop(CP, PP4), [1, 1, 1, 1], 300.0)
    _, states = traj.post_transient(0.5)
    return states[:, :2]


@pytest.fixture(scope="module")
def regulation_region(baseline_points):
    return hull_of_points(4, baseline_points, margin=relative_margin(baseline_points, 0.03125))


@pytest.fixture(scope="module")
def cycle_region(cycle_points):
    return hull_of_points(4, cycle_points, margin=relative_margin(cycle_points, 0.03125))


class TestResidualAndInertia:
    def test_residual_identity_cases(self):
        assert np.allclose(lmi_residual(-np.eye(4), np.eye(4), 0.0), -2 * np.eye(4))
        P = np.diag([1.0, -2.0, 3.0, 0.5])
        assert np.allclose(lmi_residual(np.zeros((4, 4)), P, 0.0), np.zeros((4, 4)))

    def test_residual_symmetrized(self):
        rng = np.random.RandomState(1)
        A = rng.normal(size=(4, 4))
        P = rng.normal(size=(4, 4))
        P = 0.5 * (P + P.T)
        R = lmi_residual(A, P, 0.7)
        assert np.array_equal(R, R.T)

    def test_identity_inertia(self):
        assert inertia(np.eye(4)).as_tuple() == (0, 0, 4)

    def test_reference_matrix_inertias(self):
        assert inertia(P_0DOM_BASE).as_tuple() == (0, 0, 4)
        assert inertia(P_2DOM_THETA2_4).as_tuple() == (2, 0, 2)
        assert inertia(P_2DOM_K4).as_tuple() == (2, 0, 2)

    def test_inertia_zero_band(self):
        M = np.diag([1.0, -1.0, 1e-16, 2.0])
        assert inertia(M).as_tuple() == (1, 1, 2)

    def test_inertia_requires_symmetry(self):
        with pytest.raises(ValueError):
            inertia(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_reference_residuals_negative_definite_at_equilibria(self):
        cases = [
            (P_0DOM_BASE, 0.0, PP1),
            (P_2DOM_THETA2_4, 1.0, PP4),
            (P_2DOM_K4, 1.0, PPK4),
        ]
        for P, lam, pp in cases:
            model = fop_closed_loop(CP, pp)
            A = model.eval_jacobian(fop_equilibrium(CP, pp))
            assert np.linalg.eigvalsh(lmi_residual(A, P, lam))[-1] < 0


class TestVerify:
    def test_reference_matrix_passes_on_proxy_region(self, regulation_region):
        model = fop_closed_loop(CP, PP1)
        report = verify_certificate(model, regulation_region, P_0DOM_BASE, 0.0, 0)
        assert report.passed and report.residual_margin < 0

    def test_third_reference_matrix_on_its_cycle_region(self):
        traj, _ = simulate_and_classify(fop_closed_loop(CP, PPK4), [1, 1, 1, 1], 300.0)
        _, states = traj.post_transient(0.5)
        pts = states[:, :2]
        region = hull_of_points(4, pts, margin=relative_margin(pts, 0.03125))
        report = verify_certificate(fop_closed_loop(CP, PPK4), region, P_2DOM_K4, 1.0, 2)
        assert report.passed

    def test_inertia_mismatch_failure(self, regulation_region):
        model = fop_closed_loop(CP, PP1)
        report = verify_certificate(model, regulation_region, np.eye(4), 0.0, 1)
        assert not report.passed and "inertia" in report.reason

    def test_tampered_matrix_fails_with_witness(self, cycle_region):
        model = fop_closed_loop(CP, PP4)
        P = P_2DOM_THETA2_4.copy()
        P[0, 0] = +60.0  # break the certificate
        report = verify_certificate(model, cycle_region, P, 1.0, 2)
        assert not report.passed
        if report.inertia.as_tuple() == (2, 0, 2):
            assert report.witness is not None


class TestSolve:
    def test_regulation_regime_degree_zero(self, regulation_region):
        model = fop_closed_loop(CP, PP1)
        cert = solve_dominance_lmi(model, regulation_region, 0.0)
        assert cert.p_degree == 0
        assert cert.residual_margin <= -1e-8
        report = verify_certificate(model, cert.region, cert.P, cert.lam, cert.p_degree)
        assert report.passed

    def test_oscillatory_regime_degree_two(self, cycle_region):
        model = fop_closed_loop(CP, PP4)
        cert = solve_dominance_lmi(model, cycle_region, 1.0)
        assert cert.p_degree == 2
        assert cert.residual_margin <= -1e-8

    def test_zero_rate_infeasible_on_cycle_region(self, cycle_region):
        model = fop_closed_loop(CP, PP4)
        with pytest.raises(InfeasibilityError) as err:
            solve_dominance_lmi(model, cycle_region, 0.0)
        assert err.value.worst_vertex is not None

    def test_margin_fallback_recovers(self, cycle_points):
        model = fop_closed_loop(CP, PP4)
        base = relative_margin(cycle_points, 0.25)
        cert, margin, halvings = solve_with_margin_fallback(
            model, lambda m: hull_of_points(4, cycle_points, margin=m), base, 1.0
        )
        assert halvings == 3 and margin == pytest.approx(base / 8)
        assert cert.p_degree == 2

    def test_scaling_invariance(self, regulation_region):
        model = fop_closed_loop(CP, PP1)
        cert = solve_dominance_lmi(model, regulation_region, 0.0)
        for alpha in (0.5, 3.0):
            report = verify_certificate(model, cert.region, alpha * cert.P, 0.0, cert.p_degree)
            assert report.passed
            assert report.epsilon == pytest.approx(alpha * cert.epsilon, rel=1e-6)

    def test_region_shrinking_preserves_feasibility(self, cycle_points):
        model = fop_closed_loop(CP, PP4)
        big = hull_of_points(4, cycle_points, margin=0.05)
        small = hull_of_points(4, cycle_points, margin=0.01)
        cert = solve_dominance_lmi(model, big, 1.0)
        # the same P certifies every subset region
        report = verify_certificate(model, small, cert.P, 1.0, cert.p_degree)
        assert report.passed
        assert solve_dominance_lmi(model, small, 1.0).p_degree == 2

    def test_frozen_matrix_equivalence_sample(self):
        rng = np.random.RandomState(17)
        checked = 0
        while checked < 25:
            A = rng.normal(size=(4, 4))
            lam = float(rng.uniform(0.0, 1.5))
            ev = np.linalg.eigvals(A)
            if np.min(np.abs(ev.real + lam)) < 1e-4:
                continue
            p_true = int(np.sum(ev.real > -lam))
            cert = solve_dominance_lmi(linear_model(A), point_region(4, rng.uniform(0, 1, 4)), lam)
            assert cert.p_degree == p_true
            checked += 1


class TestRobust:
    def test_collapsed_interval_matches_plain(self, cycle_region):
        from dataclasses import replace

        model = fop_closed_loop(CP, PP4)
        collapsed = replace(cycle_region, param_box={"eta": (10.0, 10.0)})
        plain = solve_dominance_lmi(model, cycle_region, 1.0)
        robust = solve_robust_dominance(model, collapsed, 1.0)
        assert robust.p_degree == plain.p_degree == 2
        assert np.allclose(robust.P, plain.P, atol=1e-7)

    def test_eta_interval_certificate(self, cycle_points):
        model = fop_closed_loop(CP, PP4, HillParams(1.0, 0.2, 1))
        traj, _ = simulate_and_classify(model, [1, 1, 1, 1], 300.0)
        _, states = traj.post_transient(0.5)
        pts = states[:, :2]
        region = hull_of_points(
            4, pts, margin=relative_margin(pts, 0.03125), param_box={"eta": (7.0, 13.0)}
        )
        cert = solve_robust_dominance(model, region, 1.0)
        assert cert.p_degree == 2
        assert cert.region.param_box["eta"] == (7.0, 13.0)
        assert "hill_slope" in cert.region.param_box

    def test_slope_contrast_for_zero_dominance(self):
        # bounded slope (<= 1) keeps degree 0 on the working range; a peak
        # slope above 2 breaks it on the same region
        region = Region(
            dim=4, z_polytope=np.array([[0.3, 0.05], [1.5, 0.05], [1.5, 0.25], [0.3, 0.25]])
        )
        low = fop_closed_loop(CP, PP1, HillParams(1.0, 0.2, 1))
        high = fop_closed_loop(CP, PP1, HillParams(0.1, 1.0, 2))
        assert solve_dominance_lmi(low, region, 0.0).p_degree == 0
        with pytest.raises(InfeasibilityError):
            solve_dominance_lmi(high, region, 0.0)


class TestClassify:
    def test_degree_zero_unique_fixed_point(self, regulation_region):
        model = fop_closed_loop(CP, PP1)
        cert = solve_dominance_lmi(model, regulation_region, 0.0)
        xe = fop_equilibrium(CP, PP1)
        result = classify(cert, [(xe, np.linalg.eigvals(model.eval_jacobian(xe)))])
        assert result.kind == "unique_fixed_point"

    def test_degree_two_with_unstable_equilibrium_is_limit_cycle(self, cycle_region):
        model = fop_closed_loop(CP, PP4)
        cert = solve_dominance_lmi(model, cycle_region, 1.0)
        xe = fop_equilibrium(CP, PP4)
        result = classify(cert, [(xe, np.linalg.eigvals(model.eval_jacobian(xe)))])
        assert result.kind == "limit_cycle"

    def test_degree_two_with_stable_equilibrium_stays_generic(self, cycle_region):
        model = fop_closed_loop(CP, PP4)
        cert = solve_dominance_lmi(model, cycle_region, 1.0)
        fake_stable = (np.array([0.5, 0.4, 0.5, 0.5]), np.array([-1.0, -2.0, -3.0, -4.0]))
        assert classify(cert, [fake_stable]).kind == "simple_attractor"

    def test_degree_two_without_equilibrium_info_stays_generic(self, cycle_region):
        model = fop_closed_loop(CP, PP4)
        cert = solve_dominance_lmi(model, cycle_region, 1.0)
        assert classify(cert, []).kind == "simple_attractor"
        outside = (np.array([50.0, 50.0, 0.0, 0.0]), np.array([1.0, -1.0, -2.0, -3.0]))
        assert classify(cert, [outside]).kind == "simple_attractor"

    def test_unsupported_degree(self, regulation_region):
        cert = DominanceCertificate(
            P=np.diag([-1.0, -1.0, -1.0, 1.0]),
            lam=1.0,
            epsilon=1.0,
            p_degree=3,
            region=regulation_region,
            residual_margin=-1.0,
            checked_points=[],
        )
        with pytest.raises(UnsupportedDegreeError):
            classify(cert, [])


class TestCertificateFiles:
    def test_roundtrip(self, tmp_path, regulation_region):
        model = fop_closed_loop(CP, PP1)
        cert = solve_dominance_lmi(model, regulation_region, 0.0)
        path = tmp_path / "cert.json"
        save_certificate(cert, path)
        back = load_certificate(path)
        assert back.p_degree == cert.p_degree
        assert np.allclose(back.P, cert.P)
        assert np.array_equal(back.region.z_polytope, cert.region.z_polytope)
        payload = json.loads(path.read_text())
        assert set(payload) >= {"p", "lambda", "epsilon", "P", "region", "residual_margin", "checked_points"}


class TestAllSeq:
    def test_degree_two_on_bounded_box(self):
        model = all_seq_closed_loop(CP, AllSeqPlantParams(1.0, 1.0, 1.0, 1.0), 4.0)
        traj, report = simulate_and_classify(model, [1, 1, 1, 1], 400.0)
        assert report.kind == "limit_cycle"
        _, states = traj.post_transient(0.5)
        pts = states[:, :2]

        def region(m):
            x_box = {
                2 + i: (max(0.0, states[:, 2 + i].min() - m), states[:, 2 + i].max() + m)
                for i in range(2)
            }
            return hull_of_points(4, pts, margin=m, x_box=x_box)

        cert, _, _ = solve_with_margin_fallback(
            model, region, relative_margin(pts, 0.25), 1.0
        )
        assert cert.p_degree == 2
