"""Dominance certificates: construction, solving, and independent verification.

A degree-p certificate over a region is a symmetric matrix P of inertia
(p, 0, n-p) together with a rate lambda and a margin epsilon such that

    A^T P + P A + 2*lambda*P <= -epsilon*I

holds for the Jacobian A at every point of the region. Because the models
declare Jacobians affine in the region's active coordinates (saturating
actuation slopes are relaxed to interval parameters first), it suffices to
impose the inequality at the region's vertices; a dense interior spot-check
defends against mis-declared dependence.

The inertia of P is never imposed on the feasibility problem (that would be
nonconvex). The solver maximizes the margin under the normalization
-I <= P <= I and the inertia is read off the solution; a near-singular P is
reported as degenerate instead of silently producing a wrong degree.
Whatever the convex solver returns is re-validated with plain eigenvalue
computations - the re-validation, not the solver, is the trust anchor.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import cvxpy as cp
import numpy as np

from .circuit_models import SystemModel
from .regions import Region, RegionVertex, interior_grid, vertices

ZERO_TOL_FACTOR = 1e-9


class InfeasibilityError(RuntimeError):
    """No certificate with the requested margin exists over the region."""

    def __init__(self, message: str, best_margin: float, worst_vertex: Optional[RegionVertex]):
        super().__init__(message)
        self.best_margin = best_margin
        self.worst_vertex = worst_vertex


class DegenerateCertificateError(ArithmeticError):
    """P has an eigenvalue too close to zero; adjust lambda."""


class UnsupportedDegreeError(ValueError):
    """Attractor classification is only defined for p in {0, 1, 2}."""


class CertificateInvalidError(RuntimeError):
    """A freshly solved certificate failed its own re-verification."""


@dataclass(frozen=True)
class InertiaTriple:
    n_neg: int
    n_zero: int
    n_pos: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_neg, self.n_zero, self.n_pos)


@dataclass(frozen=True)
class DominanceCertificate:
    """A verified region certificate."""

    P: np.ndarray
    lam: float
    epsilon: float
    p_degree: int
    region: Region
    residual_margin: float
    checked_points: list

    def to_jsonable(self) -> dict:
        return {
            "p": self.p_degree,
            "lambda": self.lam,
            "epsilon": self.epsilon,
            "P": [float(f"{v:.17g}") for v in self.P.reshape(-1)],
            "n": self.P.shape[0],
            "region": self.region.to_jsonable(),
            "residual_margin": self.residual_margin,
            "checked_points": self.checked_points,
        }

    @staticmethod
    def from_jsonable(data: dict) -> "DominanceCertificate":
        n = int(data["n"])
        return DominanceCertificate(
            P=np.asarray(data["P"], dtype=float).reshape(n, n),
            lam=float(data["lambda"]),
            epsilon=float(data["epsilon"]),
            p_degree=int(data["p"]),
            region=Region.from_jsonable(data["region"]),
            residual_margin=float(data["residual_margin"]),
            checked_points=list(data.get("checked_points", [])),
        )


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    reason: str
    inertia: InertiaTriple
    residual_margin: float  # most-positive residual eigenvalue over checked points
    epsilon: float  # |residual_margin| when passing, else 0
    n_checked: int
    witness: Optional[dict]  # state/params of the worst point when failing
    checked_points: list

    def to_jsonable(self) -> dict:
        return {
            "passed": self.passed,
            "reason": self.reason,
            "inertia": list(self.inertia.as_tuple()),
            "residual_margin": self.residual_margin,
            "epsilon": self.epsilon,
            "n_checked": self.n_checked,
            "witness": self.witness,
        }


# ---------------------------------------------------------------------------
# elementary pieces


def lmi_residual(A: np.ndarray, P: np.ndarray, lam: float) -> np.ndarray:
    """A^T P + P A + 2*lambda*P, symmetrized to kill roundoff asymmetry."""
    A = np.asarray(A, dtype=float)
    P = np.asarray(P, dtype=float)
    R = A.T @ P + P @ A + 2.0 * lam * P
    return 0.5 * (R + R.T)


def inertia(M: np.ndarray, zero_tol: Optional[float] = None) -> InertiaTriple:
    """Eigenvalue signature of a symmetric matrix.

    Eigenvalues within ``zero_tol`` of zero (default 1e-9 times the spectral
    norm) are counted as zero.
    """
    M = np.asarray(M, dtype=float)
    if not np.allclose(M, M.T, atol=1e-12 * max(1.0, float(np.abs(M).max()))):
        raise ValueError("matrix must be symmetric")
    w = np.linalg.eigvalsh(0.5 * (M + M.T))
    if zero_tol is None:
        zero_tol = ZERO_TOL_FACTOR * max(float(np.abs(w).max()), np.finfo(float).tiny)
    return InertiaTriple(
        n_neg=int(np.sum(w < -zero_tol)),
        n_zero=int(np.sum(np.abs(w) <= zero_tol)),
        n_pos=int(np.sum(w > zero_tol)),
    )


def _with_auto_slope_interval(model: SystemModel, region: Region) -> Region:
    """Attach the actuation-slope interval for saturating models.

    The slope is not affine in z1, so certifying over the region requires
    relaxing it to its exact range over the region's z1-extent; the interval
    is recorded in the region's param_box (and hence in certificates).
    """
    if model.slope_interval is None or "hill_slope" in region.param_box:
        return region
    z1 = region.z_polytope[:, 0]
    lo, hi = model.slope_interval(float(z1.min()), float(z1.max()))
    return replace(region, param_box={**dict(region.param_box), "hill_slope": (lo, hi)})


def _vertex_jacobians(
    model: SystemModel, region: Region, param_names: Sequence[str]
) -> list[tuple[np.ndarray, RegionVertex]]:
    verts = vertices(region, state_deps=model.jacobian_state_deps, param_names=param_names)
    return [(model.jacobian_at(v.state, v.params or None), v) for v in verts]


def _param_combos(region: Region) -> list[dict]:
    """Nominal plus every corner combination of the region's param_box."""
    combos: list[dict] = [{}]
    corners: list[dict] = [{}]
    for name, (lo, hi) in sorted(region.param_box.items()):
        vals = [lo] if lo == hi else [lo, hi]
        corners = [{**c, name: v} for c in corners for v in vals]
    if corners != [{}]:
        combos.extend(corners)
    return combos


def _x_combos(model: SystemModel, region: Region) -> list[dict]:
    """Center plus corner values for bounded coordinates the Jacobian uses."""
    active = [
        i
        for i in model.jacobian_state_deps
        if i not in region.poly_coords and i in region.x_box
    ]
    combos: list[dict] = [{i: 0.5 * (region.x_box[i][0] + region.x_box[i][1]) for i in active}]
    if active:
        corner_sets: list[dict] = [{}]
        for i in active:
            lo, hi = region.x_box[i]
            vals = [lo] if lo == hi else [lo, hi]
            corner_sets = [{**c, i: v} for c in corner_sets for v in vals]
        combos.extend(corner_sets)
    return combos


def verify_certificate(
    model: SystemModel,
    region: Region,
    P: np.ndarray,
    lam: float,
    p_degree: int,
    sample_density: int = 10,
) -> VerificationReport:
    """Independent certificate check: inertia of P, the residual inequality
    at every region vertex, and a dense interior spot-check.

    The interior grid evaluates the true (nominal) Jacobian, guarding the
    declared affine dependence; parameter corners are re-checked there too.
    Never reuses anything from the solver.
    """
    P = np.asarray(P, dtype=float)
    n = model.dim
    region = _with_auto_slope_interval(model, region)
    iner = inertia(P)
    expected = (p_degree, 0, n - p_degree)
    checked: list = []
    if iner.as_tuple() != expected:
        return VerificationReport(
            passed=False,
            reason=f"inertia mismatch: expected {expected}, got {iner.as_tuple()}",
            inertia=iner,
            residual_margin=float("nan"),
            epsilon=0.0,
            n_checked=0,
            witness=None,
            checked_points=checked,
        )

    worst = -np.inf
    witness: Optional[dict] = None

    def check(A: np.ndarray, state: np.ndarray, params: dict) -> None:
        nonlocal worst, witness
        top = float(np.linalg.eigvalsh(lmi_residual(A, P, lam))[-1])
        checked.append([float(v) for v in state] + [top])
        if top > worst:
            worst = top
            witness = {"state": [float(v) for v in state], "params": dict(params)}

    for A, v in _vertex_jacobians(model, region, param_names=sorted(region.param_box)):
        check(A, v.state, v.params)

    base = np.zeros(n)
    pcombos = _param_combos(region)
    xcombos = _x_combos(model, region)
    for zpt in interior_grid(region, sample_density):
        for xvals in xcombos:
            state = base.copy()
            state[list(region.poly_coords)] = zpt
            for i, val in xvals.items():
                state[i] = val
            for params in pcombos:
                check(model.jacobian_at(state, params or None), state, params)

    passed = worst < 0.0
    return VerificationReport(
        passed=passed,
        reason="ok" if passed else "positive residual eigenvalue",
        inertia=iner,
        residual_margin=worst,
        epsilon=abs(worst) if passed else 0.0,
        n_checked=len(checked),
        witness=None if passed else witness,
        checked_points=checked,
    )


# ---------------------------------------------------------------------------
# solvers


def _solve_vertex_lmi(
    As: list[np.ndarray], lam: float, n: int
) -> tuple[float, np.ndarray]:
    """Maximize the uniform margin t with residual(A_v) <= -t*I at every
    vertex, under -I <= P <= I. Returns (t, P)."""
    P = cp.Variable((n, n), symmetric=True)
    t = cp.Variable()
    eye = np.eye(n)
    cons = [P >> -eye, P << eye]
    for A in As:
        cons.append(A.T @ P + P @ A + 2.0 * lam * P << -t * eye)
    prob = cp.Problem(cp.Maximize(t), cons)
    with warnings.catch_warnings():
        # solver accuracy flags are irrelevant: every solution is re-validated
        # with plain eigenvalue checks before a certificate is issued
        warnings.filterwarnings("ignore", message="Solution may be inaccurate")
        try:
            prob.solve(solver=cp.CLARABEL)
        except cp.error.SolverError:
            prob.solve(solver=cp.SCS, eps=1e-9, max_iters=200_000)
        if P.value is None:
            prob.solve(solver=cp.SCS, eps=1e-9, max_iters=200_000)
    if P.value is None:
        raise RuntimeError(f"SDP solver returned no iterate (status {prob.status})")
    Pv = 0.5 * (P.value + P.value.T)
    return float(t.value), Pv


def _default_epsilon(As: list[np.ndarray]) -> float:
    return 1e-6 * max(float(np.linalg.norm(A, 2)) for A in As)


def _solve(
    model: SystemModel,
    region: Region,
    lam: float,
    epsilon: Optional[float],
    param_names: Sequence[str],
    sample_density: int,
) -> DominanceCertificate:
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    region = _with_auto_slope_interval(model, region)
    pairs = _vertex_jacobians(model, region, param_names=param_names)
    As = [A for A, _ in pairs]
    eps_target = _default_epsilon(As) if epsilon is None else float(epsilon)

    t_opt, P = _solve_vertex_lmi(As, lam, model.dim)
    if t_opt < eps_target:
        worst_idx = int(
            np.argmax([np.linalg.eigvalsh(lmi_residual(A, P, lam))[-1] for A in As])
        )
        raise InfeasibilityError(
            f"no certificate with margin {eps_target:g} over {len(As)} vertex Jacobians "
            f"(best margin {t_opt:g}); most-violating vertex state "
            f"{pairs[worst_idx][1].state} params {pairs[worst_idx][1].params}",
            best_margin=t_opt,
            worst_vertex=pairs[worst_idx][1],
        )

    w = np.linalg.eigvalsh(P)
    zero_tol = ZERO_TOL_FACTOR * float(np.abs(w).max())
    if np.any(np.abs(w) <= zero_tol):
        raise DegenerateCertificateError(
            f"solution P has an eigenvalue within {zero_tol:g} of zero "
            f"(eigenvalues {w}); adjust lambda"
        )
    p_degree = int(np.sum(w < 0.0))

    report = verify_certificate(model, region, P, lam, p_degree, sample_density=sample_density)
    if not report.passed or report.residual_margin > -eps_target:
        raise CertificateInvalidError(
            f"solver produced P but re-verification failed: {report.reason} "
            f"(residual margin {report.residual_margin:g}, target <= {-eps_target:g})"
        )
    return DominanceCertificate(
        P=P,
        lam=lam,
        epsilon=report.epsilon,
        p_degree=p_degree,
        region=region,
        residual_margin=report.residual_margin,
        checked_points=report.checked_points,
    )


def solve_dominance_lmi(
    model: SystemModel,
    region: Region,
    lam: float,
    epsilon: Optional[float] = None,
    sample_density: int = 10,
) -> DominanceCertificate:
    """Certificate over the region at nominal parameters.

    The saturating actuation slope (when present) is still relaxed to its
    interval; parametric uncertainty intervals in the region's param_box are
    ignored here - use ``solve_robust_dominance`` for those.
    """
    names = ["hill_slope"] if "hill_slope" in _with_auto_slope_interval(model, region).param_box else []
    return _solve(model, region, lam, epsilon, names, sample_density)


def solve_robust_dominance(
    model: SystemModel,
    region: Region,
    lam: float,
    epsilon: Optional[float] = None,
    sample_density: int = 10,
) -> DominanceCertificate:
    """Certificate that additionally holds at every corner of the region's
    uncertain-parameter box (single P for the whole perturbed family)."""
    region = _with_auto_slope_interval(model, region)
    return _solve(model, region, lam, epsilon, sorted(region.param_box), sample_density)


def solve_with_margin_fallback(
    model: SystemModel,
    region_for_margin: Callable[[float], Region],
    base_margin: float,
    lam: float,
    epsilon: Optional[float] = None,
    robust: bool = False,
    max_halvings: int = 3,
    sample_density: int = 10,
) -> tuple[DominanceCertificate, float, int]:
    """Try the default proxy-region margin, halving it up to ``max_halvings``
    times when certification fails. Returns (certificate, margin, halvings)."""
    solver = solve_robust_dominance if robust else solve_dominance_lmi
    last: Exception = RuntimeError("unreachable")
    for j in range(max_halvings + 1):
        margin = base_margin / 2**j
        try:
            cert = solver(model, region_for_margin(margin), lam, epsilon, sample_density)
            return cert, margin, j
        except (InfeasibilityError, DegenerateCertificateError, CertificateInvalidError) as exc:
            last = exc
    raise InfeasibilityError(
        f"certification failed at margins {base_margin:g}/2^0..2^{max_halvings}: {last}",
        best_margin=getattr(last, "best_margin", float("nan")),
        worst_vertex=getattr(last, "worst_vertex", None),
    )


# ---------------------------------------------------------------------------
# attractor classification


@dataclass(frozen=True)
class Classification:
    kind: str  # unique_fixed_point | fixed_point | simple_attractor | limit_cycle
    detail: str


def classify(
    certificate: DominanceCertificate,
    equilibria_in_region: Sequence[tuple[np.ndarray, np.ndarray]] = (),
) -> Classification:
    """Asymptotic-behavior statement implied by a certificate.

    ``equilibria_in_region`` pairs equilibrium states with their Jacobian
    eigenvalues. For p = 2 the generic "simple attractor" statement upgrades
    to "limit cycle" only when at least one equilibrium inside the region is
    supplied and every one of them is unstable; a stable equilibrium, or no
    information, blocks the upgrade.
    """
    from .regions import contains  # local import to avoid cycle in type checks

    p = certificate.p_degree
    if p == 0:
        return Classification(
            kind="unique_fixed_point",
            detail="degree 0: every bounded solution converges to the region's unique fixed point "
            "(two fixed points would contradict the uniform inequality)",
        )
    if p == 1:
        return Classification(
            kind="fixed_point",
            detail="degree 1: every bounded solution converges to a fixed point",
        )
    if p == 2:
        inside = [
            (xi, ev)
            for xi, ev in equilibria_in_region
            if contains(certificate.region, np.asarray(xi, dtype=float))
        ]
        all_unstable = bool(inside) and all(np.any(np.real(ev) > 0) for _, ev in inside)
        if all_unstable:
            return Classification(
                kind="limit_cycle",
                detail=f"degree 2 with {len(inside)} unstable equilibrium(s) in the region: "
                "the attractor must be a limit cycle",
            )
        return Classification(
            kind="simple_attractor",
            detail="degree 2: bounded solutions converge to a simple attractor "
            "(fixed point, fixed points with connecting arcs, or limit cycle)",
        )
    raise UnsupportedDegreeError(f"classification undefined for degree {p}")


# ---------------------------------------------------------------------------
# certificate files


def save_certificate(cert: DominanceCertificate, path) -> None:
    with open(path, "w") as fh:
        json.dump(cert.to_jsonable(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_certificate(path) -> DominanceCertificate:
    with open(path) as fh:
        data = json.load(fh)
    # accept both the bare schema and CLI outputs wrapping it with run metadata
    if "certificate" in data and "P" not in data:
        data = data["certificate"]
    return DominanceCertificate.from_jsonable(data)
