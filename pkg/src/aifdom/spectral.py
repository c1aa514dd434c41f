"""Frequency-domain necessary-condition diagnostics.

Dominance with rate lambda forces the Jacobian spectrum to split around the
vertical line Re(s) = -lambda at every state. This module checks that
splitting directly (``spectrum``), and through the classical loop
diagnostics evaluated on the frozen state-dependent transfer function:
Nyquist loci along the shifted axis s = -lambda + j*omega with signed
encirclement counts, and root-locus traces over a feedback-gain grid.

Loci are sampled adaptively: every polygon step of the image curve must
subtend less than pi/2 around the critical point, otherwise the contour is
refined. Open-loop poles sitting on the shifted axis are detoured by a
small semicircle into the right half of the shifted plane and counted on
the fading (left) side, which keeps the computed winding number equal to
(closed-loop count right of -lambda) - (open-loop count right of -lambda).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .circuit_models import (
    ControllerParams,
    FopPlantParams,
    HillParams,
    SystemModel,
    hill_value_and_derivative,
)

SPLIT_TOL = 1e-9
POLE_TOL = 1e-9
INDENT_RADIUS = 1e-3
MAX_PHASE_STEP = 0.5 * np.pi
NUMERATOR_TOL = 1e-12


class BoundarySplitError(ArithmeticError):
    """An eigenvalue lies on the splitting line; perturb lambda."""


class PoleError(ValueError):
    """Transfer function evaluated at (or too close to) a pole."""


class ContourError(RuntimeError):
    """The shifted-axis contour hits a pole with indentation disabled, or
    refinement failed to resolve the locus."""


class MarginalWindingError(ArithmeticError):
    """The locus passes too close to the critical point to count windings."""


class DegenerateLocusError(ValueError):
    """Numerator gain too small; controllability/observability degenerate."""


@dataclass(frozen=True)
class SpectrumSample:
    """Eigenvalues of the closed-loop Jacobian at one state, split about
    Re(s) = -lambda."""

    xi: np.ndarray
    eigenvalues: np.ndarray
    lam: float
    split: tuple[int, int]  # (count right of -lambda, count left)


@dataclass(frozen=True)
class FrequencyLocus:
    """Sampled frozen transfer function along s = -lambda + j*omega."""

    z_state: np.ndarray
    lam: float
    omega_grid: np.ndarray
    values: np.ndarray
    encirclements: int  # clockwise positive
    q_xi: int  # open-loop poles strictly right of -lambda
    critical_point: complex
    indented_poles: tuple[complex, ...] = ()


@dataclass(frozen=True)
class RootLocusResult:
    """Eigenvalue traces over a feedback-gain grid at a frozen state."""

    z_state: np.ndarray
    lam: float
    gains: np.ndarray
    traces: np.ndarray  # shape (len(gains), n); column j is one matched trace
    splits: list[tuple[int, int]]


def split_counts(eigenvalues: np.ndarray, lam: float, tol: float = SPLIT_TOL) -> tuple[int, int]:
    """(count with Re > -lam, count with Re < -lam), ties excluded."""
    re = np.real(eigenvalues)
    return int(np.sum(re > -lam + tol)), int(np.sum(re < -lam - tol))


def spectrum(model: SystemModel, xi: Sequence[float], lam: float) -> SpectrumSample:
    """Closed-loop Jacobian eigenvalues at xi with splitting about -lambda.

    Raises BoundarySplitError when an eigenvalue sits within SPLIT_TOL of
    the splitting line, since the split is then ill-defined.
    """
    xi = np.asarray(xi, dtype=float)
    if not np.all(np.isfinite(xi)):
        raise ValueError(f"state must be finite, got {xi}")
    ev = np.linalg.eigvals(model.eval_jacobian(xi))
    if np.any(np.abs(ev.real + lam) <= SPLIT_TOL):
        raise BoundarySplitError(
            f"eigenvalue on the line Re(s) = {-lam:g}; perturb lambda (eigenvalues {ev})"
        )
    n_right, n_left = split_counts(ev, lam)
    return SpectrumSample(xi=xi, eigenvalues=ev, lam=lam, split=(n_right, n_left))


# ---------------------------------------------------------------------------
# frozen transfer function of the production-plant loop


def fop_open_loop_poles(z: Sequence[float], cp: ControllerParams, pp: FopPlantParams) -> np.ndarray:
    """Open-loop poles {0, -gamma (double), -eta*(z1+z2)} at frozen z."""
    z = np.asarray(z, dtype=float)
    return np.array([0.0, -pp.gamma, -pp.gamma, -cp.eta * (z[0] + z[1])])


def _fop_gain(z: np.ndarray, cp: ControllerParams, pp: FopPlantParams, hill: Optional[HillParams]) -> float:
    """Numerator gain of the frozen loop: slope * theta2 * k * eta * z1."""
    slope = pp.theta1 if hill is None else hill_value_and_derivative(z[0], hill)[1]
    return slope * pp.theta2 * pp.k * cp.eta * z[0]


def frozen_transfer_function(
    z: Sequence[float],
    s: complex,
    cp: ControllerParams,
    pp: FopPlantParams,
    hill: Optional[HillParams] = None,
) -> complex:
    """Frozen loop transfer function at controller state z.

    Linear actuation: theta1*theta2*eta*k*z1 / (s*(gamma+s)^2*(s+eta*(z1+z2)));
    with saturating actuation theta1 is replaced by the slope at z1.
    """
    z = np.asarray(z, dtype=float)
    s = complex(s)
    poles = fop_open_loop_poles(z, cp, pp)
    scale = 1.0 + abs(s)
    if np.any(np.abs(s - poles) <= POLE_TOL * scale):
        raise PoleError(f"s={s} is a pole of the frozen transfer function")
    den = s * (pp.gamma + s) ** 2 * (s + cp.eta * (z[0] + z[1]))
    return _fop_gain(z, cp, pp, hill) / den


# ---------------------------------------------------------------------------
# shifted-axis Nyquist locus with adaptive refinement and indentation


@dataclass
class _Piece:
    """One contour piece: either an axis run or an indentation arc."""

    kind: str  # "axis" | "arc"
    params: np.ndarray  # omega values, or arc angles in [-pi/2, pi/2]
    center: complex = 0.0  # arc center (the pole), unused for axis

    def s_of(self, p: np.ndarray, lam: float, radius: float) -> np.ndarray:
        if self.kind == "axis":
            return -lam + 1j * p
        return self.center + radius * np.exp(1j * p)


def _build_contour(
    lam: float, poles: np.ndarray, omega_max: float, n_samples: int, radius: float
) -> tuple[list[_Piece], list[complex]]:
    """Axis samples with semicircular right detours around on-axis poles."""
    marginal: list[complex] = []
    for p in poles:
        if abs(p.real + lam) <= POLE_TOL * (1.0 + abs(p)):
            if not any(abs(p - q) <= radius for q in marginal):
                marginal.append(complex(p))
    marginal.sort(key=lambda p: p.imag)

    # mirrored half-grid keeps omega exactly sign-symmetric, so locus values
    # at +/-omega are exact complex conjugates
    half = np.linspace(0.0, omega_max, int(n_samples) // 2 + 1)
    omegas = np.concatenate([-half[:0:-1], half])
    pieces: list[_Piece] = []
    lo = -omega_max
    for pole in marginal:
        a, b = pole.imag - radius, pole.imag + radius
        seg = omegas[(omegas > lo) & (omegas < a)]
        seg = np.concatenate([[lo], seg, [a]])
        pieces.append(_Piece("axis", seg))
        pieces.append(_Piece("arc", np.linspace(-np.pi / 2, np.pi / 2, 65), center=pole))
        lo = b
    seg = omegas[(omegas > lo)]
    seg = np.concatenate([[lo], seg])
    pieces.append(_Piece("axis", seg))
    return pieces, marginal


def _refine_locus(
    G: Callable[[np.ndarray], np.ndarray],
    pieces: list[_Piece],
    lam: float,
    radius: float,
    critical: complex,
    max_rounds: int = 60,
    max_points: int = 400_000,
) -> list[tuple[_Piece, np.ndarray]]:
    """Subdivide contour pieces until every image step subtends < pi/2
    around the critical point."""
    evaluated = [(pc, G(pc.s_of(pc.params, lam, radius))) for pc in pieces]
    for _ in range(max_rounds):
        grown = False
        new_eval = []
        for pc, vals in evaluated:
            rel = vals - critical
            with np.errstate(invalid="ignore", divide="ignore"):
                dphi = np.abs(np.angle(rel[1:] / rel[:-1]))
            bad = np.flatnonzero(dphi >= MAX_PHASE_STEP)
            if len(bad) == 0:
                new_eval.append((pc, vals))
                continue
            grown = True
            mids = 0.5 * (pc.params[bad] + pc.params[bad + 1])
            params = np.sort(np.concatenate([pc.params, mids]))
            pc2 = _Piece(pc.kind, params, pc.center)
            new_eval.append((pc2, G(pc2.s_of(params, lam, radius))))
        evaluated = new_eval
        n_total = sum(len(v) for _, v in evaluated)
        if n_total > max_points:
            raise ContourError(f"locus refinement exceeded {max_points} points")
        if not grown:
            return evaluated
    raise ContourError(f"locus refinement did not converge in {max_rounds} rounds")


def winding_number(points: np.ndarray, critical: complex, wind_tol: Optional[float] = None) -> int:
    """Signed clockwise winding count of a closed polygonal curve around
    ``critical`` (the curve is closed by joining last to first point)."""
    pts = np.asarray(points, dtype=complex)
    if wind_tol is None:
        wind_tol = 1e-8 * (1.0 + abs(critical))
    rel = pts - critical
    if np.min(np.abs(rel)) < wind_tol:
        raise MarginalWindingError(
            f"locus passes within {wind_tol:g} of the critical point {critical}"
        )
    closed = np.append(rel, rel[0])
    total = float(np.sum(np.angle(closed[1:] / closed[:-1])))
    return -int(np.rint(total / (2.0 * np.pi)))


def _locus_from_callable(
    G: Callable[[np.ndarray], np.ndarray],
    poles: np.ndarray,
    lam: float,
    critical: complex,
    omega_max: float,
    n_samples: int,
    indent: bool,
) -> tuple[np.ndarray, np.ndarray, int, int, list[complex]]:
    on_axis = np.abs(poles.real + lam) <= POLE_TOL * (1.0 + np.abs(poles))
    if np.any(on_axis) and not indent:
        raise ContourError(
            f"open-loop pole(s) {poles[on_axis]} on the shifted axis Re=-{lam:g}; enable indentation"
        )
    q_xi = int(np.sum(poles.real > -lam + POLE_TOL * (1.0 + np.abs(poles))))
    pieces, marginal = _build_contour(lam, poles.astype(complex), omega_max, n_samples, INDENT_RADIUS)
    evaluated = _refine_locus(G, pieces, lam, INDENT_RADIUS, critical)
    path = np.concatenate([vals for _, vals in evaluated])
    enc = winding_number(path, critical)
    axis_omega = np.concatenate([pc.params for pc, _ in evaluated if pc.kind == "axis"])
    axis_vals = np.concatenate([vals for pc, vals in evaluated if pc.kind == "axis"])
    return axis_omega, axis_vals, enc, q_xi, marginal


def nyquist_locus(
    z: Sequence[float],
    lam: float,
    loop_gain: float,
    cp: ControllerParams,
    pp: FopPlantParams,
    omega_max: float = 100.0,
    n_samples: int = 2001,
    indent: bool = True,
) -> FrequencyLocus:
    """Shifted-axis Nyquist locus of the gain-normalized frozen loop.

    The sampled function is eta*z1 / (s*(gamma+s)^2*(s+eta*(z1+z2))); the
    supplied ``loop_gain`` (the product of actuation slope, theta2 and k)
    sets the critical point -1/loop_gain. Encirclements are counted
    clockwise-positive around it.
    """
    z = np.asarray(z, dtype=float)
    num = cp.eta * z[0]
    if abs(num) < NUMERATOR_TOL:
        raise DegenerateLocusError(
            f"numerator gain {num:g} below {NUMERATOR_TOL:g} (z1 ~ 0); locus uninformative"
        )
    if loop_gain <= 0:
        raise ValueError(f"loop_gain must be > 0, got {loop_gain}")
    poles = fop_open_loop_poles(z, cp, pp)
    a = cp.eta * (z[0] + z[1])

    def G(s: np.ndarray) -> np.ndarray:
        return num / (s * (pp.gamma + s) ** 2 * (s + a))

    critical = complex(-1.0 / loop_gain)
    omega, vals, enc, q_xi, marginal = _locus_from_callable(
        G, poles, lam, critical, omega_max, n_samples, indent
    )
    return FrequencyLocus(
        z_state=z,
        lam=lam,
        omega_grid=omega,
        values=vals,
        encirclements=enc,
        q_xi=q_xi,
        critical_point=critical,
        indented_poles=tuple(marginal),
    )


def frozen_loop_encirclements(
    A: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    gain: float,
    lam: float,
    omega_max: float = 1000.0,
    n_samples: int = 4001,
) -> tuple[int, int]:
    """Encirclements of -1/gain by c*(sI-A)^-1*b along the shifted axis,
    plus the open-loop count q right of -lambda.

    Generic state-space companion to ``nyquist_locus`` used for
    winding-vs-eigenvalue consistency checks; no indentation (poles on the
    axis raise ContourError).
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    c = np.asarray(c, dtype=float).reshape(-1)
    n = A.shape[0]
    poles, V = np.linalg.eig(A)

    if np.linalg.cond(V) < 1e8:
        # partial fractions: G(s) = sum residue_i / (s - pole_i)
        residues = (c @ V) * np.linalg.solve(V, b)

        def G(s: np.ndarray) -> np.ndarray:
            return (residues[None, :] / (s[:, None] - poles[None, :])).sum(axis=1)

    else:  # nearly defective A: evaluate pointwise
        def G(s: np.ndarray) -> np.ndarray:
            out = np.empty(len(s), dtype=complex)
            for i, si in enumerate(s):
                out[i] = c @ np.linalg.solve(si * np.eye(n) - A, b)
            return out

    critical = complex(-1.0 / gain)
    _, _, enc, q_xi, _ = _locus_from_callable(G, poles, lam, critical, omega_max, n_samples, indent=False)
    return enc, q_xi


# ---------------------------------------------------------------------------
# root locus over a gain grid


def root_locus(
    z: Sequence[float],
    gain_grid: Sequence[float],
    lam: float,
    cp: ControllerParams,
    pp: FopPlantParams,
) -> RootLocusResult:
    """Closed-loop pole traces of the frozen loop over a feedback-gain grid.

    For gain kappa the poles are the roots of
    s*(gamma+s)^2*(s+eta*(z1+z2)) + kappa*eta*z1 = 0. Traces are matched
    across adjacent gains by nearest-neighbor assignment.
    """
    z = np.asarray(z, dtype=float)
    gains = np.asarray(gain_grid, dtype=float)
    if len(gains) == 0:
        raise ValueError("gain_grid must be nonempty")
    if np.any(gains <= 0) or np.any(np.diff(gains) <= 0):
        raise ValueError("gain_grid must be positive and increasing")
    g, a = pp.gamma, cp.eta * (z[0] + z[1])
    base = np.array([1.0, a + 2 * g, 2 * g * a + g**2, g**2 * a, 0.0])
    num = cp.eta * z[0]

    traces = np.empty((len(gains), 4), dtype=complex)
    splits = []
    prev = None
    for i, kappa in enumerate(gains):
        coeffs = base.copy()
        coeffs[4] += kappa * num
        roots = np.roots(coeffs)
        if prev is not None:
            cost = np.abs(prev[:, None] - roots[None, :])
            _, cols = linear_sum_assignment(cost)
            roots = roots[cols]
        traces[i] = roots
        prev = roots
        splits.append(split_counts(roots, lam))
    return RootLocusResult(z_state=z, lam=lam, gains=gains, traces=traces, splits=splits)
