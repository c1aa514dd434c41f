import numpy as np
import pytest

from aifdom.circuit_models import (
    ControllerParams,
    FopPlantParams,
    HillParams,
    fop_closed_loop,
    fop_equilibrium,
    hill_value_and_derivative,
    open_loop_jacobian,
)
from aifdom.ode_sim import simulate_and_classify
from aifdom.regions import hull_of_trajectory, vertices
from aifdom.spectral import (
    BoundarySplitError,
    ContourError,
    DegenerateLocusError,
    PoleError,
    fop_open_loop_poles,
    frozen_loop_encirclements,
    frozen_transfer_function,
    nyquist_locus,
    root_locus,
    spectrum,
    winding_number,
)

CP = ControllerParams(mu=2.0, eta=10.0)
PP1 = FopPlantParams(1.0, 1.0, 1.0, 1.0)
PP4 = FopPlantParams(1.0, 4.0, 1.0, 1.0)


@pytest.fixture(scope="module")
def cycle_region():
    traj, _ = simulate_and_classify(fop_closed_loop(CP, PP4), [1, 1, 1, 1], 300.0)
    return hull_of_trajectory(traj, (0, 1), margin=0.0656)


class TestSpectrum:
    def test_stable_regime_all_left(self):
        model = fop_closed_loop(CP, PP1)
        s = spectrum(model, fop_equilibrium(CP, PP1), 0.0)
        assert s.split == (0, 4)

    def test_oscillatory_equilibrium_unstable_pair(self):
        model = fop_closed_loop(CP, PP4)
        s = spectrum(model, fop_equilibrium(CP, PP4), 0.0)
        assert s.split[0] == 2
        assert np.sum(s.eigenvalues.real > 0) == 2

    def test_uniform_split_over_cycle_region(self, cycle_region):
        model = fop_closed_loop(CP, PP4)
        for v in vertices(cycle_region, state_deps=model.jacobian_state_deps):
            assert spectrum(model, v.state, 1.0).split == (2, 2)

    def test_boundary_split_error(self):
        model = fop_closed_loop(CP, PP1)
        xe = fop_equilibrium(CP, PP1)
        lam = -float(np.sort(np.linalg.eigvals(model.eval_jacobian(xe)).real)[0])
        with pytest.raises(BoundarySplitError):
            spectrum(model, xe, lam)

    def test_eigenvalues_satisfy_characteristic_polynomial(self):
        rng = np.random.RandomState(21)
        model = fop_closed_loop(CP, PP4)
        for _ in range(50):
            xi = rng.uniform(0.05, 3.0, size=4)
            A = model.eval_jacobian(xi)
            coeffs = np.poly(A)
            s = spectrum(model, xi, 0.5)
            for ev in s.eigenvalues:
                resid = abs(np.polyval(coeffs, ev))
                scale = np.sum(np.abs(coeffs)) * max(1.0, abs(ev)) ** 4
                assert resid <= 1e-9 * scale


class TestFrozenTransferFunction:
    def test_reference_value(self):
        v = frozen_transfer_function((2.0, 0.1), 1.0, CP, PP1)
        assert v == pytest.approx(20.0 / 88.0, rel=1e-15)

    def test_matches_state_space(self):
        # independent oracle: output_grad * (sI - A_open)^-1 * input_column
        model = fop_closed_loop(CP, PP4)
        rng = np.random.RandomState(9)
        for _ in range(20):
            xi = rng.uniform(0.05, 3.0, size=4)
            s = complex(rng.normal(), rng.normal())
            A_open = open_loop_jacobian(model, xi)
            oracle = model.output_gradient(xi) @ np.linalg.solve(
                s * np.eye(4) - A_open, model.input_column
            )
            assert frozen_transfer_function(xi[:2], s, CP, PP4) == pytest.approx(oracle, rel=1e-9)

    def test_hill_slope_replaces_gain(self):
        hill = HillParams(1.0, 0.2, 1)
        z = (0.8, 0.3)
        ratio = frozen_transfer_function(z, 2.0 + 1j, CP, PP4, hill) / frozen_transfer_function(
            z, 2.0 + 1j, CP, PP4
        )
        assert ratio == pytest.approx(hill_value_and_derivative(z[0], hill)[1] / PP4.theta1)

    def test_pole_rejection(self):
        with pytest.raises(PoleError):
            frozen_transfer_function((2.0, 0.1), 0.0, CP, PP1)
        with pytest.raises(PoleError):
            frozen_transfer_function((2.0, 0.1), -1.0, CP, PP1)

    def test_relative_degree_four(self):
        vals = [abs(frozen_transfer_function((2.0, 0.1), r * 1j + 0.5, CP, PP1)) for r in (1e2, 1e3, 1e4)]
        assert vals[1] <= vals[0] * 1e-3 and vals[2] <= vals[1] * 1e-3

    def test_zero_numerator_at_zero_actuator(self):
        assert frozen_transfer_function((0.0, 0.5), 1.0 + 1j, CP, PP1) == 0.0


class TestNyquist:
    def test_no_encirclements_at_unit_gain(self):
        for z in [(2.0, 0.1), (1.0, 1.0), (0.6, 0.3), (3.0, 0.05)]:
            locus = nyquist_locus(z, 0.0, 1.0, CP, PP1)
            assert locus.encirclements == 0
            assert locus.q_xi == 0

    def test_two_clockwise_at_gain_four(self):
        for z in [(2.0, 0.1), (1.0, 0.2), (0.5, 0.4)]:
            locus = nyquist_locus(z, 0.0, 4.0, CP, PP1)
            assert locus.encirclements == 2

    def test_indented_shifted_axis_matches_eigenvalue_count(self):
        model = fop_closed_loop(CP, PP4)
        for z in [(0.5, 0.4), (1.2, 0.15), (0.2, 1.5)]:
            locus = nyquist_locus(z, 1.0, 4.0, CP, PP4)
            ev = np.linalg.eigvals(model.eval_jacobian(np.array([z[0], z[1], 0.0, 0.0])))
            p = int(np.sum(ev.real > -1.0))
            assert locus.encirclements == p - locus.q_xi
            assert locus.indented_poles == (complex(-1.0),)

    def test_conjugate_symmetry_exact(self):
        locus = nyquist_locus((0.5, 0.4), 1.0, 4.0, CP, PP4)
        idx = np.argsort(locus.omega_grid)
        og, vals = locus.omega_grid[idx], locus.values[idx]
        assert np.array_equal(og, -og[::-1])
        assert np.max(np.abs(vals - np.conj(vals[::-1]))) <= 1e-12

    def test_degenerate_numerator_flagged(self):
        with pytest.raises(DegenerateLocusError):
            nyquist_locus((0.0, 0.5), 0.0, 1.0, CP, PP1)

    def test_pole_on_axis_without_indentation(self):
        A = np.diag([-1.0, -2.0, -3.0, -4.0])
        b = np.ones(4)
        c = np.ones(4)
        with pytest.raises(ContourError):
            frozen_loop_encirclements(A, b, c, gain=0.5, lam=1.0)

    def test_winding_number_on_circles(self):
        theta = np.linspace(0, 2 * np.pi, 200, endpoint=False)
        circle = np.exp(1j * theta)  # counterclockwise unit circle
        assert winding_number(circle, 0.0) == -1
        assert winding_number(circle[::-1], 0.0) == 1
        assert winding_number(circle, 2.0 + 0.0j) == 0

    def test_random_frozen_loops_match_eigenvalue_oracle(self):
        rng = np.random.RandomState(42)
        checked = 0
        while checked < 30:
            A = rng.normal(size=(4, 4))
            b = rng.normal(size=4)
            c = rng.normal(size=4)
            gain = float(rng.uniform(0.2, 3.0))
            lam = float(rng.uniform(0.0, 1.5))
            ev_open = np.linalg.eigvals(A)
            ev_closed = np.linalg.eigvals(A - gain * np.outer(b, c))
            gaps = np.concatenate([np.abs(ev_open.real + lam), np.abs(ev_closed.real + lam)])
            if gaps.min() < 1e-3:
                continue
            enc, q = frozen_loop_encirclements(A, b, c, gain, lam)
            assert q == int(np.sum(ev_open.real > -lam))
            assert enc == int(np.sum(ev_closed.real > -lam)) - q
            checked += 1


class TestRootLocus:
    def test_traces_start_at_open_loop_poles(self):
        # the double pole moves like sqrt(gain); 1e-7 keeps it within 1e-3
        gains = np.geomspace(1e-7, 10.0, 40)
        rl = root_locus((2.0, 0.1), gains, 1.0, CP, PP1)
        start = np.sort_complex(rl.traces[0])
        expected = np.sort_complex(fop_open_loop_poles((2.0, 0.1), CP, PP1).astype(complex))
        assert np.max(np.abs(start - expected)) <= 1e-3

    def test_four_asymptote_directions(self):
        gains = np.geomspace(1.0, 1e6, 30)
        rl = root_locus((2.0, 0.1), gains, 0.0, CP, PP1)
        centroid = np.sum(fop_open_loop_poles((2.0, 0.1), CP, PP1)) / 4.0
        angles = np.sort(np.mod(np.angle(rl.traces[-1] - centroid), 2 * np.pi)) / np.pi
        assert np.allclose(angles, [0.25, 0.75, 1.25, 1.75], atol=0.02)

    def test_split_at_working_gain(self):
        gains = np.geomspace(0.01, 10.0, 61)
        rl = root_locus((0.5, 0.4), gains, 1.0, CP, PP4)
        idx = int(np.argmin(np.abs(rl.gains - 4.0)))
        assert rl.splits[idx] == (2, 2)

    def test_traces_are_continuous(self):
        gains = np.geomspace(0.01, 100.0, 400)
        rl = root_locus((0.7, 0.3), gains, 0.0, CP, PP4)
        steps = np.abs(np.diff(rl.traces, axis=0)).max()
        assert steps < 1.5  # matched traces never jump across the plane

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            root_locus((1.0, 1.0), [], 0.0, CP, PP1)
        with pytest.raises(ValueError):
            root_locus((1.0, 1.0), [1.0, 0.5], 0.0, CP, PP1)
