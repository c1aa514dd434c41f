"""Circuit models: sequestration controller, plant variants, and closed loops.

Every model is represented twice: as a vector field and as an exact analytic
Jacobian that can be evaluated at *any* state, not just at an equilibrium.
All dominance and frequency diagnostics downstream consume the Jacobian
along trajectories, so the two representations are kept consistent by
construction (and cross-checked against finite differences in the tests).

States are concentrations and live in the nonnegative orthant. The public
single-model operations reject negative states; the composed ``SystemModel``
callables do not, because adaptive integrators legitimately probe a small
neighborhood of the orthant boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Mapping, Optional, Sequence

import numpy as np


class DomainError(ValueError):
    """A state or input lies outside the model's domain."""


class CompositionError(ValueError):
    """Controller and plant blocks cannot be interconnected."""


# ---------------------------------------------------------------------------
# parameter records


@dataclass(frozen=True)
class ControllerParams:
    """Sequestration controller constants.

    mu is the reference production rate of the actuator species, eta the
    mutual annihilation rate of actuator and sensor.
    """

    mu: float
    eta: float

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        if self.eta <= 0:
            raise ValueError(f"eta must be > 0, got {self.eta}")


@dataclass(frozen=True)
class FopPlantParams:
    """First-order production plant constants.

    theta1 is the actuation gain, theta2 the sensing gain applied on the
    controller input channel, k the second-species production rate and
    gamma the common degradation rate.
    """

    theta1: float
    theta2: float
    k: float
    gamma: float

    def __post_init__(self):
        for name in ("theta1", "theta2", "k", "gamma"):
            v = getattr(self, name)
            if v <= 0:
                raise ValueError(f"{name} must be > 0, got {v}")


@dataclass(frozen=True)
class HillParams:
    """Saturating actuation map u**n / (k1 + k2*u**n)."""

    k1: float
    k2: float
    n_exp: int

    def __post_init__(self):
        if self.k1 <= 0:
            raise ValueError(f"k1 must be > 0, got {self.k1}")
        if self.k2 < 0:
            raise ValueError(f"k2 must be >= 0, got {self.k2}")
        if int(self.n_exp) != self.n_exp or self.n_exp < 1:
            raise ValueError(f"n_exp must be an integer >= 1, got {self.n_exp}")


@dataclass(frozen=True)
class AllSeqPlantParams:
    """All-sequestration plant constants (zeroth-order production phi1, phi2,
    binding rates theta1 and k)."""

    phi1: float
    phi2: float
    theta1: float
    k: float

    def __post_init__(self):
        for name in ("phi1", "phi2", "theta1", "k"):
            v = getattr(self, name)
            if v <= 0:
                raise ValueError(f"{name} must be > 0, got {v}")


@dataclass(frozen=True)
class BistableParams:
    """Switch variant: sequestration plus saturating positive feedback.

    mu1 and mu2 are transient inputs used to flip the switch.
    """

    mu1: float
    mu2: float
    theta1: float
    eta: float
    gamma: float

    def __post_init__(self):
        for name in ("mu1", "mu2", "theta1", "eta", "gamma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.eta <= 0 or self.gamma <= 0:
            raise ValueError("eta and gamma must be > 0")


# ---------------------------------------------------------------------------
# elementary vector fields and Jacobians


def _check_nonnegative(arr: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    if np.any(arr < 0):
        raise DomainError(f"{what} must be componentwise nonnegative, got {arr}")
    return arr


def aif_vector_field(z: Sequence[float], u_c: float, p: ControllerParams) -> np.ndarray:
    """Controller dynamics (z1' , z2') at state z with sensed input u_c."""
    z = _check_nonnegative(z, "controller state z")
    if u_c < 0:
        raise DomainError(f"u_c must be >= 0, got {u_c}")
    seq = p.eta * z[0] * z[1]
    return np.array([p.mu - seq, u_c - seq])


def aif_jacobian(z: Sequence[float], p: ControllerParams) -> np.ndarray:
    """State Jacobian of the controller; valid along any trajectory.

    Both rows equal (-eta*z2, -eta*z1), so the matrix has rank <= 1.
    The input column for the u_c channel is (0, 1).
    """
    z = np.asarray(z, dtype=float)
    row = np.array([-p.eta * z[1], -p.eta * z[0]])
    return np.array([row, row])


AIF_INPUT_COLUMN = np.array([0.0, 1.0])


def fop_vector_field(x: Sequence[float], u: float, p: FopPlantParams) -> np.ndarray:
    """First-order production plant (x1', x2') with actuation input u."""
    x = _check_nonnegative(x, "plant state x")
    return np.array([p.theta1 * u - p.gamma * x[0], p.k * x[0] - p.gamma * x[1]])


def hill_value_and_derivative(u: float, p: HillParams) -> tuple[float, float]:
    """Value and derivative of the saturating actuation map at u >= 0.

    The map is u**n / (k1 + k2*u**n); its derivative
    n*k1*u**(n-1) / (k1 + k2*u**n)**2 is nonnegative, so the map is
    non-decreasing on the half line.
    """
    if u < 0:
        raise DomainError(f"hill input must be >= 0, got {u}")
    n = int(p.n_exp)
    un = u**n
    den = p.k1 + p.k2 * un
    value = un / den
    if n == 1:
        deriv = p.k1 / den**2
    else:
        deriv = n * p.k1 * u ** (n - 1) / den**2
    return value, deriv


def hill_slope_peak(p: HillParams) -> tuple[float, float]:
    """Location and value of the maximum of the actuation slope on u >= 0.

    The slope is unimodal: increasing up to
    u* = ((n-1)*k1 / ((n+1)*k2))**(1/n) and decreasing after (for n = 1 it
    is maximal at u = 0; for k2 = 0 it is unbounded and this raises).
    """
    n = int(p.n_exp)
    if p.k2 == 0 and n >= 2:
        raise DomainError("slope is unbounded for k2 = 0 with n >= 2")
    if n == 1:
        return 0.0, 1.0 / p.k1
    u_star = ((n - 1) * p.k1 / ((n + 1) * p.k2)) ** (1.0 / n)
    return u_star, hill_value_and_derivative(u_star, p)[1]


def hill_slope_range(lo: float, hi: float, p: HillParams) -> tuple[float, float]:
    """Exact (min, max) of the actuation slope over the interval [lo, hi].

    Uses unimodality of the slope: the maximum is at the interior peak when
    the peak lies inside the interval, otherwise at an endpoint; the minimum
    is always attained at an endpoint.
    """
    if lo < 0 or hi < lo:
        raise DomainError(f"invalid slope interval [{lo}, {hi}]")
    d_lo = hill_value_and_derivative(lo, p)[1]
    d_hi = hill_value_and_derivative(hi, p)[1]
    d_min = min(d_lo, d_hi)
    d_max = max(d_lo, d_hi)
    if int(p.n_exp) >= 2 and p.k2 > 0:
        u_star, d_star = hill_slope_peak(p)
        if lo <= u_star <= hi:
            d_max = max(d_max, d_star)
    return d_min, d_max


def all_seq_vector_field(x: Sequence[float], u: float, p: AllSeqPlantParams) -> np.ndarray:
    """All-sequestration plant (x1', x2') with binding input u."""
    x = _check_nonnegative(x, "plant state x")
    if u < 0:
        raise DomainError(f"u must be >= 0, got {u}")
    return np.array([p.phi1 - p.theta1 * x[0] * u, p.phi2 - p.k * x[0] * x[1]])


def bistable_vector_field(z: Sequence[float], p: BistableParams) -> np.ndarray:
    """Switch dynamics: sequestration controller with saturating positive
    feedback on the actuator and first-order actuator degradation."""
    z = _check_nonnegative(z, "switch state z")
    seq = p.eta * z[0] * z[1]
    fb = p.theta1 * z[0] / (1.0 + p.theta1 * z[0])
    return np.array([p.mu1 + fb - seq - p.gamma * z[0], p.mu2 - seq])


def bistable_jacobian(z: Sequence[float], p: BistableParams) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    fb_slope = p.theta1 / (1.0 + p.theta1 * z[0]) ** 2
    return np.array(
        [
            [fb_slope - p.eta * z[1] - p.gamma, -p.eta * z[0]],
            [-p.eta * z[1], -p.eta * z[0]],
        ]
    )


# ---------------------------------------------------------------------------
# open-loop blocks and closed-loop composition


@dataclass(frozen=True)
class OpenLoopBlock:
    """One side of a scalar interconnection: x' = f(x, u), y = output(x).

    ``jac_state`` and ``jac_input`` are the exact derivatives of f with
    respect to x and to the scalar input u.
    """

    dim: int
    f: Callable[[np.ndarray, float], np.ndarray]
    jac_state: Callable[[np.ndarray, float], np.ndarray]
    jac_input: Callable[[np.ndarray, float], np.ndarray]
    output: Callable[[np.ndarray], float]
    output_grad: Callable[[np.ndarray], np.ndarray]
    tag: str


@dataclass(frozen=True)
class SystemModel:
    """A closed (autonomous) model with its differential data.

    ``eval_jacobian`` is the exact derivative of ``eval_f`` at any state.
    ``input_column`` / ``output_gradient`` describe the loop channel used by
    the frequency diagnostics; the output sign convention is chosen so that
    the frozen loop transfer function comes out positive and the loop closes
    through unit negative feedback.

    ``jacobian_state_deps`` declares which state coordinates the Jacobian
    actually depends on (affinely); ``uncertain_params`` names the parameter
    overrides accepted by ``jacobian_family`` for robust analysis.
    """

    dim: int
    eval_f: Callable[[np.ndarray], np.ndarray]
    eval_jacobian: Callable[[np.ndarray], np.ndarray]
    input_column: np.ndarray
    output_gradient: Callable[[np.ndarray], np.ndarray]
    param_tag: str
    jacobian_state_deps: tuple[int, ...] = ()
    uncertain_params: tuple[str, ...] = ()
    jacobian_family: Optional[Callable[[np.ndarray, Mapping[str, float]], np.ndarray]] = None
    # (z1_lo, z1_hi) -> exact actuation-slope interval; present only when the
    # actuation is saturating, where the slope must be relaxed to an interval
    # parameter for vertex certification to stay sound
    slope_interval: Optional[Callable[[float, float], tuple[float, float]]] = None

    def jacobian_at(self, xi: np.ndarray, overrides: Optional[Mapping[str, float]] = None) -> np.ndarray:
        """Jacobian at xi, optionally with uncertain-parameter overrides."""
        if not overrides:
            return self.eval_jacobian(np.asarray(xi, dtype=float))
        unknown = set(overrides) - set(self.uncertain_params)
        if unknown:
            raise ValueError(f"model {self.param_tag!r} accepts no override for {sorted(unknown)}")
        assert self.jacobian_family is not None
        return self.jacobian_family(np.asarray(xi, dtype=float), overrides)


def closed_loop_jacobian(model: SystemModel, xi: Sequence[float]) -> np.ndarray:
    """Exact Jacobian of the composed vector field at xi."""
    xi = np.asarray(xi, dtype=float)
    if not np.all(np.isfinite(xi)):
        raise DomainError(f"state must be finite, got {xi}")
    return model.eval_jacobian(xi)


def open_loop_jacobian(model: SystemModel, xi: Sequence[float]) -> np.ndarray:
    """Jacobian with the loop channel opened (feedback contribution removed)."""
    xi = np.asarray(xi, dtype=float)
    return model.eval_jacobian(xi) + np.outer(model.input_column, model.output_gradient(xi))


def aif_controller_block(p: ControllerParams) -> OpenLoopBlock:
    return OpenLoopBlock(
        dim=2,
        f=lambda z, u_c: np.array([p.mu - p.eta * z[0] * z[1], u_c - p.eta * z[0] * z[1]]),
        jac_state=lambda z, u_c: aif_jacobian(z, p),
        jac_input=lambda z, u_c: AIF_INPUT_COLUMN,
        output=lambda z: float(z[0]),
        output_grad=lambda z: np.array([1.0, 0.0]),
        tag="aif",
    )


def fop_plant_block(p: FopPlantParams, hill: Optional[HillParams] = None) -> OpenLoopBlock:
    """First-order production plant; with ``hill`` the linear actuation
    theta1*u is replaced by the saturating map (theta1 unused there)."""

    if hill is None:
        def f(x, u):
            return np.array([p.theta1 * u - p.gamma * x[0], p.k * x[0] - p.gamma * x[1]])

        def jac_input(x, u):
            return np.array([p.theta1, 0.0])

    else:
        def f(x, u):
            n = int(hill.n_exp)
            un = u**n
            return np.array([un / (hill.k1 + hill.k2 * un) - p.gamma * x[0], p.k * x[0] - p.gamma * x[1]])

        def jac_input(x, u):
            return np.array([hill_value_and_derivative(u, hill)[1], 0.0])

    return OpenLoopBlock(
        dim=2,
        f=f,
        jac_state=lambda x, u: np.array([[-p.gamma, 0.0], [p.k, -p.gamma]]),
        jac_input=jac_input,
        output=lambda x: float(x[1]),
        output_grad=lambda x: np.array([0.0, 1.0]),
        tag="fop" if hill is None else "fop_hill",
    )


def all_seq_plant_block(p: AllSeqPlantParams) -> OpenLoopBlock:
    return OpenLoopBlock(
        dim=2,
        f=lambda x, u: np.array([p.phi1 - p.theta1 * x[0] * u, p.phi2 - p.k * x[0] * x[1]]),
        jac_state=lambda x, u: np.array([[-p.theta1 * u, 0.0], [-p.k * x[1], -p.k * x[0]]]),
        jac_input=lambda x, u: np.array([-p.theta1 * x[0], 0.0]),
        output=lambda x: float(x[1]),
        output_grad=lambda x: np.array([0.0, 1.0]),
        tag="all_seq",
    )


def zero_plant_block() -> OpenLoopBlock:
    """Stateless plant with output identically zero (opens the loop)."""
    empty = np.zeros(0)
    return OpenLoopBlock(
        dim=0,
        f=lambda x, u: empty,
        jac_state=lambda x, u: np.zeros((0, 0)),
        jac_input=lambda x, u: empty,
        output=lambda x: 0.0,
        output_grad=lambda x: empty,
        tag="zero",
    )


def closed_loop(
    controller: OpenLoopBlock,
    plant: OpenLoopBlock,
    feedback_gain_theta2: float,
    jacobian_state_deps: Optional[tuple[int, ...]] = None,
) -> SystemModel:
    """Compose controller and plant through the scalar interconnection
    u = y_c, u_c = theta2 * y.

    The composed state is (z, x). The exposed loop channel is additive on
    the controller's sensed input, with output -theta2*y, so that closing
    u_bar = -y_bar with unit gain reproduces the composed Jacobian and the
    frozen loop transfer function carries a positive sign.
    """
    if controller.dim != 2:
        raise CompositionError(f"controller block must have 2 states, got {controller.dim}")
    if feedback_gain_theta2 <= 0:
        raise CompositionError(f"theta2 must be > 0, got {feedback_gain_theta2}")
    nc, npl = controller.dim, plant.dim
    n = nc + npl
    th2 = float(feedback_gain_theta2)

    def eval_f(xi: np.ndarray) -> np.ndarray:
        z, x = xi[:nc], xi[nc:]
        u_c = th2 * plant.output(x)
        u = controller.output(z)
        return np.concatenate([controller.f(z, u_c), plant.f(x, u)])

    def eval_jacobian(xi: np.ndarray) -> np.ndarray:
        z, x = xi[:nc], xi[nc:]
        u_c = th2 * plant.output(x)
        u = controller.output(z)
        J = np.zeros((n, n))
        J[:nc, :nc] = controller.jac_state(z, u_c)
        J[:nc, nc:] = np.outer(controller.jac_input(z, u_c), th2 * plant.output_grad(x))
        J[nc:, :nc] = np.outer(plant.jac_input(x, u), controller.output_grad(z))
        J[nc:, nc:] = plant.jac_state(x, u)
        return J

    input_column = np.concatenate([AIF_INPUT_COLUMN, np.zeros(npl)])

    def output_gradient(xi: np.ndarray) -> np.ndarray:
        return np.concatenate([np.zeros(nc), -th2 * plant.output_grad(xi[nc:])])

    deps = tuple(range(n)) if jacobian_state_deps is None else tuple(jacobian_state_deps)
    return SystemModel(
        dim=n,
        eval_f=eval_f,
        eval_jacobian=eval_jacobian,
        input_column=input_column,
        output_gradient=output_gradient,
        param_tag=f"{controller.tag}+{plant.tag}(theta2={th2:g})",
        jacobian_state_deps=deps,
    )


def fop_closed_loop(
    cp: ControllerParams, pp: FopPlantParams, hill: Optional[HillParams] = None
) -> SystemModel:
    """Closed loop of the sequestration controller with the first-order
    production plant. The Jacobian depends (affinely) on (z1, z2) only; the
    saturating actuation enters through its state-dependent slope, exposed
    for robust analysis as the ``hill_slope`` override."""
    model = closed_loop(
        aif_controller_block(cp), fop_plant_block(pp, hill), pp.theta2, jacobian_state_deps=(0, 1)
    )

    def family(xi: np.ndarray, overrides: Mapping[str, float]) -> np.ndarray:
        eta = overrides.get("eta", cp.eta)
        J = model.eval_jacobian(xi)
        J[:2, 0] = -eta * xi[1]
        J[:2, 1] = -eta * xi[0]
        if "hill_slope" in overrides:
            J[2, 0] = overrides["hill_slope"]
        return J

    uncertain = ("eta",) + (("hill_slope",) if hill is not None else ())
    slope = None
    if hill is not None:
        slope = lambda lo, hi: hill_slope_range(lo, hi, hill)  # noqa: E731
    return replace(model, uncertain_params=uncertain, jacobian_family=family, slope_interval=slope)


def all_seq_closed_loop(cp: ControllerParams, pp: AllSeqPlantParams, theta2: float) -> SystemModel:
    """Closed loop with the all-sequestration plant. Both bindings make the
    Jacobian depend (affinely) on the full state (z1, z2, x1, x2)."""
    model = closed_loop(
        aif_controller_block(cp), all_seq_plant_block(pp), theta2, jacobian_state_deps=(0, 1, 2, 3)
    )

    def family(xi: np.ndarray, overrides: Mapping[str, float]) -> np.ndarray:
        eta = overrides.get("eta", cp.eta)
        J = model.eval_jacobian(xi)
        J[:2, 0] = -eta * xi[1]
        J[:2, 1] = -eta * xi[0]
        return J

    return replace(model, uncertain_params=("eta",), jacobian_family=family)


def bistable_model(p: BistableParams) -> SystemModel:
    """Standalone two-state switch model (no plant)."""

    def family(z: np.ndarray, overrides: Mapping[str, float]) -> np.ndarray:
        eta = overrides.get("eta", p.eta)
        return bistable_jacobian(z, BistableParams(p.mu1, p.mu2, p.theta1, eta, p.gamma))

    return SystemModel(
        dim=2,
        eval_f=lambda z: np.array(
            [
                p.mu1 + p.theta1 * z[0] / (1.0 + p.theta1 * z[0]) - p.eta * z[0] * z[1] - p.gamma * z[0],
                p.mu2 - p.eta * z[0] * z[1],
            ]
        ),
        eval_jacobian=lambda z: bistable_jacobian(z, p),
        input_column=np.array([0.0, 1.0]),
        output_gradient=lambda z: np.array([1.0, 0.0]),
        param_tag="bistable",
        jacobian_state_deps=(0, 1),
        uncertain_params=("eta",),
        jacobian_family=family,
    )


def linear_model(A: np.ndarray) -> SystemModel:
    """Frozen linear system xi' = A xi (constant Jacobian, no state deps)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    return SystemModel(
        dim=n,
        eval_f=lambda xi: A @ xi,
        eval_jacobian=lambda xi: A.copy(),
        input_column=np.zeros(n),
        output_gradient=lambda xi: np.zeros(n),
        param_tag="linear",
        jacobian_state_deps=(),
    )


# ---------------------------------------------------------------------------
# closed-form equilibria and regime indicators


def fop_equilibrium(cp: ControllerParams, pp: FopPlantParams) -> np.ndarray:
    """Fixed point of the linear-plant closed loop, in (z1, z2, x1, x2).

    Derived from u_c = mu at steady state: x2 = mu/theta2, then back through
    the production chain. The result is verified to zero out the vector
    field before being returned.
    """
    if cp.mu <= 0:
        raise DomainError("equilibrium requires mu > 0")
    z1 = pp.gamma**2 * cp.mu / (pp.theta1 * pp.k * pp.theta2)
    xe = np.array(
        [z1, cp.mu / (cp.eta * z1), pp.gamma * cp.mu / (pp.k * pp.theta2), cp.mu / pp.theta2]
    )
    model = fop_closed_loop(cp, pp)
    resid = np.max(np.abs(model.eval_f(xe)))
    if resid > 1e-9 * (1.0 + np.max(np.abs(xe))):
        raise ArithmeticError(f"closed-form equilibrium residual {resid:g} too large")
    return xe


def all_seq_equilibrium(cp: ControllerParams, pp: AllSeqPlantParams, theta2: float) -> np.ndarray:
    """Fixed point of the all-sequestration closed loop."""
    x2 = cp.mu / theta2
    x1 = pp.phi2 / (pp.k * x2)
    z1 = pp.phi1 / (pp.theta1 * x1)
    z2 = cp.mu / (cp.eta * z1)
    return np.array([z1, z2, x1, x2])


def large_eta_instability_indicator(pp: FopPlantParams) -> tuple[float, float]:
    """Both sides of the fast-sequestration local stability condition,
    as (cbrt(theta1*theta2*k / 2), gamma).

    The ordering that implies instability is deliberately left to the
    caller: eigenvalues of the closed-loop Jacobian are the ground truth.
    """
    return float(np.cbrt(pp.theta1 * pp.theta2 * pp.k / 2.0)), pp.gamma
