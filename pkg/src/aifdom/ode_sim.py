"""Trajectory integration, equilibrium refinement, and attractor classification.

Integration uses an adaptive embedded Runge-Kutta pair (Dormand-Prince via
scipy) with a configurable cap on inter-sample spacing so that downstream
cycle detection always sees a densely sampled curve. States are kept in the
nonnegative orthant: undershoots smaller than ``TOL_NEG`` are projected to
the boundary, anything worse is reported as an integrator fault.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .circuit_models import SystemModel

TOL_NEG = 1e-9

EQ_TOL = 1e-3          # vector-field / settling tolerance for "equilibrium"
CYCLE_TOL = 1e-3       # relative closure residual at Poincare returns
PERIOD_DISPERSION = 0.01


class StiffnessError(RuntimeError):
    """The adaptive integrator underflowed its step size."""


class IntegratorFault(RuntimeError):
    """A state left the nonnegative orthant by more than TOL_NEG."""


class RefinementError(RuntimeError):
    """Newton polish failed (singular Jacobian or no convergence)."""


class InsufficientData(ValueError):
    """Trajectory too short for the requested classification."""


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped states from one integration run."""

    times: np.ndarray
    states: np.ndarray  # shape (len(times), dim)
    meta: dict = field(default_factory=dict)
    orthant: bool = True

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(self.states)):
            raise ValueError("states must be finite")
        if self.orthant and np.min(self.states) < -TOL_NEG:
            raise ValueError("states must stay above -TOL_NEG")

    def post_transient(self, transient_fraction: float) -> tuple[np.ndarray, np.ndarray]:
        """Times and states after discarding the leading fraction of the run."""
        t0 = self.times[0] + transient_fraction * (self.times[-1] - self.times[0])
        keep = self.times >= t0
        return self.times[keep], self.states[keep]

    def to_csv(self) -> str:
        """CSV export: header t,xi_1,...,xi_n; 17 significant digits."""
        n = self.states.shape[1]
        buf = io.StringIO()
        buf.write("t," + ",".join(f"xi_{i + 1}" for i in range(n)) + "\n")
        for t, row in zip(self.times, self.states):
            buf.write(f"{t:.17g}," + ",".join(f"{v:.17g}" for v in row) + "\n")
        return buf.getvalue()


@dataclass(frozen=True)
class AttractorReport:
    """Outcome of classifying a trajectory's post-transient window."""

    kind: str  # "equilibrium" | "limit_cycle" | "undecided"
    location: Optional[np.ndarray]  # equilibrium point, or None
    period: Optional[float]  # cycle period estimate, or None
    cycle_samples: Optional[np.ndarray]  # one period of states, or None
    diagnostics: dict

    def to_jsonable(self) -> dict:
        out = {"kind": self.kind, "diagnostics": self.diagnostics}
        out["location"] = None if self.location is None else [float(v) for v in self.location]
        out["period"] = None if self.period is None else float(self.period)
        return out


def integrate(
    model: SystemModel,
    x0: Sequence[float],
    t_end: float,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-10,
    max_step: Optional[float] = None,
    orthant: bool = True,
) -> Trajectory:
    """Integrate the model from x0 over [0, t_end].

    ``max_step`` caps the inter-sample spacing (default t_end/2000).
    ``orthant`` enforces the concentration interpretation: undershoots below
    -TOL_NEG fault, smaller ones are projected to the boundary. Disable it
    for sign-indefinite systems (e.g. frozen linear models).
    """
    x0 = np.asarray(x0, dtype=float)
    if orthant and np.any(x0 < 0):
        raise ValueError(f"x0 must be in the nonnegative orthant, got {x0}")
    if t_end <= 0:
        raise ValueError(f"t_end must be > 0, got {t_end}")
    if max_step is None:
        max_step = t_end / 2000.0

    sol = solve_ivp(
        lambda t, xi: model.eval_f(xi),
        (0.0, float(t_end)),
        x0,
        method="RK45",
        rtol=rel_tol,
        atol=abs_tol,
        max_step=max_step,
        dense_output=False,
    )
    if not sol.success:
        raise StiffnessError(f"integration failed: {sol.message}")
    states = sol.y.T.copy()
    if orthant:
        worst = float(np.min(states))
        if worst < -TOL_NEG:
            raise IntegratorFault(f"state left the orthant by {-worst:g} (> {TOL_NEG:g})")
        np.clip(states, 0.0, None, out=states)
    meta = {
        "model": model.param_tag,
        "rel_tol": rel_tol,
        "abs_tol": abs_tol,
        "max_step": max_step,
        "n_steps": int(len(sol.t)),
    }
    return Trajectory(times=sol.t.copy(), states=states, meta=meta, orthant=orthant)


def refine_equilibrium(model: SystemModel, guess: Sequence[float], max_iter: int = 50) -> np.ndarray:
    """Newton polish of an equilibrium guess to ||f||_inf <= 1e-12*(1+||xi||_inf)."""
    xi = np.asarray(guess, dtype=float).copy()
    for _ in range(max_iter):
        f = model.eval_f(xi)
        tol = 1e-12 * (1.0 + np.max(np.abs(xi)))
        if np.max(np.abs(f)) <= tol:
            return xi
        J = model.eval_jacobian(xi)
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError as exc:
            raise RefinementError(f"singular Jacobian at {xi}") from exc
        if not np.all(np.isfinite(step)):
            raise RefinementError(f"non-finite Newton step at {xi}")
        xi = xi + step
    raise RefinementError(f"no convergence after {max_iter} iterations (residual {np.max(np.abs(f)):g})")


def _poincare_returns(
    times: np.ndarray, states: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Crossing times, crossing states, and the section normal.

    The section is the hyperplane through the window mean, normal to the
    dominant oscillation direction (leading principal component); crossings
    are taken with positive slope and located by linear interpolation.
    """
    mean = states.mean(axis=0)
    centered = states - mean
    # leading right singular vector = dominant oscillation direction
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    normal = vt[0]
    s = centered @ normal
    cross = np.flatnonzero((s[:-1] < 0.0) & (s[1:] >= 0.0))
    t_cross = []
    x_cross = []
    for i in cross:
        frac = -s[i] / (s[i + 1] - s[i])
        t_cross.append(times[i] + frac * (times[i + 1] - times[i]))
        x_cross.append(states[i] + frac * (states[i + 1] - states[i]))
    return np.asarray(t_cross), np.asarray(x_cross), normal


def classify_trajectory(traj: Trajectory, transient_fraction: float = 0.5) -> AttractorReport:
    """Classify the post-transient window as equilibrium, limit cycle, or
    undecided.

    Equilibrium: the window tail has settled and the vector field at the
    final state is below EQ_TOL. Limit cycle: Poincare returns through the
    dominant-oscillation section have period dispersion <= 1% and relative
    closure residual <= CYCLE_TOL.
    """
    if not 0.0 <= transient_fraction < 1.0:
        raise ValueError("transient_fraction must be in [0, 1)")
    times, states = traj.post_transient(transient_fraction)
    if len(times) < 100:
        raise InsufficientData(f"post-transient window has {len(times)} samples (< 100)")

    model = traj.meta.get("_model")
    scale = 1.0 + float(np.max(np.abs(states)))

    # settled tail => equilibrium
    tail = states[int(0.9 * len(states)):]
    tail_var = float(np.max(np.abs(tail - states[-1])))
    f_end = None
    if model is not None:
        f_end = float(np.max(np.abs(model.eval_f(states[-1]))))
    settled = tail_var <= EQ_TOL * scale and (f_end is None or f_end <= EQ_TOL)
    diagnostics = {"tail_variation": tail_var, "vector_field_norm": f_end, "scale": scale}
    if settled:
        return AttractorReport(
            kind="equilibrium",
            location=states[-1].copy(),
            period=None,
            cycle_samples=None,
            diagnostics=diagnostics,
        )

    t_cross, x_cross, normal = _poincare_returns(times, states)
    if len(t_cross) >= 4:
        periods = np.diff(t_cross)
        mean_period = float(periods.mean())
        dispersion = float(periods.std() / mean_period)
        closure = float(np.max(np.linalg.norm(np.diff(x_cross, axis=0), axis=1))) / scale
        diagnostics.update(
            {
                "n_returns": int(len(t_cross)),
                "period_dispersion": dispersion,
                "closure_residual": closure,
            }
        )
        if dispersion <= PERIOD_DISPERSION and closure <= CYCLE_TOL and mean_period > 0:
            in_cycle = (times >= t_cross[-2]) & (times <= t_cross[-1])
            return AttractorReport(
                kind="limit_cycle",
                location=None,
                period=mean_period,
                cycle_samples=states[in_cycle].copy(),
                diagnostics=diagnostics,
            )
    else:
        diagnostics["n_returns"] = int(len(t_cross))

    return AttractorReport(kind="undecided", location=None, period=None, cycle_samples=None, diagnostics=diagnostics)


def simulate_and_classify(
    model: SystemModel,
    x0: Sequence[float],
    t_end: float,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-10,
    max_step: Optional[float] = None,
    transient_fraction: float = 0.5,
) -> tuple[Trajectory, AttractorReport]:
    """Convenience pipeline: integrate, then classify with the model's
    vector field available for the equilibrium residual check."""
    traj = integrate(model, x0, t_end, rel_tol=rel_tol, abs_tol=abs_tol, max_step=max_step)
    traj.meta["_model"] = model
    report = classify_trajectory(traj, transient_fraction)
    return traj, report
