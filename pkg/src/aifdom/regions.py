"""Convex certification regions: a polygon in two designated coordinates,
boxes on the remaining coordinates, and intervals on uncertain parameters.

Vertex enumeration over these regions is what turns the uniform matrix
inequality into a finite set of constraints, so the geometry here is kept
deliberately small and exact: monotone-chain hulls, half-plane containment
tests, Minkowski inflation by a square, and clipping to the nonnegative
quadrant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .ode_sim import Trajectory

CONTAIN_TOL = 1e-12


class RegionError(ValueError):
    """Invalid region construction or query."""


def _cross2(a: np.ndarray, b: np.ndarray):
    """z-component of the cross product of 2-D vectors (vectorized)."""
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Counterclockwise convex hull of 2-D points (monotone chain).

    Returns 1 point for a degenerate point cloud, 2 for collinear clouds.
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) == 0:
        raise RegionError("empty point set")
    if len(pts) == 1:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross2(out[-1] - out[-2], p - out[-2]) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 3:
        # collinear cloud: keep the two extreme points
        return np.array([pts[0], pts[-1]])
    return hull


def _inflate(verts: np.ndarray, margin: float) -> np.ndarray:
    """Minkowski sum with the square of half-width ``margin``."""
    if margin == 0.0:
        return verts
    corners = np.array([[-margin, -margin], [margin, -margin], [margin, margin], [-margin, margin]])
    return convex_hull((verts[:, None, :] + corners[None, :, :]).reshape(-1, 2))


def circumscribe(points: np.ndarray, k: int) -> np.ndarray:
    """Outer convex polygon with at most ``k`` vertices containing the points.

    Built from the support function sampled along k uniform directions, so
    the result is a superset of the convex hull (enlargement at most a
    factor 1/cos(pi/k) in radius). Used to keep vertex counts of
    densely-sampled attractor hulls small without losing soundness.
    """
    pts = np.asarray(points, dtype=float)
    theta = 2.0 * np.pi * np.arange(k) / k
    dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    h = (pts @ dirs.T).max(axis=0)
    verts = []
    for i in range(k):
        j = (i + 1) % k
        M = np.array([dirs[i], dirs[j]])
        verts.append(np.linalg.solve(M, [h[i], h[j]]))
    return convex_hull(np.array(verts))


def _clip_halfplane(verts: np.ndarray, axis: int) -> np.ndarray:
    """Sutherland-Hodgman clip of a polygon against coordinate >= 0."""
    out = []
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        ina, inb = a[axis] >= 0.0, b[axis] >= 0.0
        if ina:
            out.append(a)
        if ina != inb:
            t = a[axis] / (a[axis] - b[axis])
            out.append(a + t * (b - a))
    if not out:
        raise RegionError("region clipped away entirely by the nonnegative quadrant")
    return convex_hull(np.array(out))


@dataclass(frozen=True)
class Region:
    """Polygon x box x parameter-interval region.

    ``z_polytope`` holds counterclockwise vertices in the plane of the two
    ``poly_coords`` state coordinates. ``x_box`` maps other coordinate
    indices to closed intervals (absent = unconstrained). ``param_box`` maps
    uncertain-parameter names to intervals. ``degenerate`` flags polygons
    with fewer than 3 vertices (point or segment).
    """

    dim: int
    z_polytope: np.ndarray
    poly_coords: tuple[int, int] = (0, 1)
    x_box: Mapping[int, tuple[float, float]] = field(default_factory=dict)
    param_box: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    degenerate: bool = False

    def __post_init__(self):
        verts = np.asarray(self.z_polytope, dtype=float)
        object.__setattr__(self, "z_polytope", verts)
        if verts.ndim != 2 or verts.shape[1] != 2:
            raise RegionError("z_polytope must be an (m, 2) array")
        if np.min(verts) < 0:
            raise RegionError("polytope vertices must be nonnegative")
        if len(verts) < 3:
            if not self.degenerate:
                raise RegionError("polygons with < 3 vertices must be flagged degenerate")
        else:
            edges = np.roll(verts, -1, axis=0) - verts
            crosses = _cross2(edges, np.roll(edges, -1, axis=0))
            if np.any(crosses < -1e-12 * max(1.0, np.abs(verts).max() ** 2)):
                raise RegionError("polytope vertices must be in counterclockwise convex position")
        for idx, (lo, hi) in dict(self.x_box).items():
            if not (0 <= idx < self.dim) or idx in self.poly_coords:
                raise RegionError(f"x_box coordinate {idx} out of range or overlaps the polytope")
            if hi < lo or lo < 0:
                raise RegionError(f"x_box interval for coordinate {idx} must satisfy 0 <= lo <= hi")
        for name, (lo, hi) in dict(self.param_box).items():
            if hi < lo:
                raise RegionError(f"param_box interval for {name!r} is empty")

    # -- geometry -----------------------------------------------------------

    def polygon_contains(self, point: Sequence[float]) -> bool:
        """Boundary-inclusive point-in-polygon test (half-plane distances)."""
        p = np.asarray(point, dtype=float)
        verts = self.z_polytope
        if len(verts) == 1:
            return bool(np.max(np.abs(p - verts[0])) <= CONTAIN_TOL)
        if len(verts) == 2:
            a, b = verts
            ab = b - a
            L2 = float(ab @ ab)
            t = np.clip((p - a) @ ab / L2, 0.0, 1.0)
            return bool(np.linalg.norm(p - (a + t * ab)) <= CONTAIN_TOL)
        for i in range(len(verts)):
            a = verts[i]
            edge = verts[(i + 1) % len(verts)] - a
            norm = np.linalg.norm(edge)
            if _cross2(edge, p - a) < -CONTAIN_TOL * norm:
                return False
        return True

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.z_polytope.min(axis=0), self.z_polytope.max(axis=0)

    def to_jsonable(self) -> dict:
        return {
            "dim": self.dim,
            "z_polytope": [[float(v) for v in row] for row in self.z_polytope],
            "poly_coords": list(self.poly_coords),
            "x_box": {str(i): [float(lo), float(hi)] for i, (lo, hi) in dict(self.x_box).items()},
            "param_box": {k: [float(lo), float(hi)] for k, (lo, hi) in dict(self.param_box).items()},
            "degenerate": self.degenerate,
        }

    @staticmethod
    def from_jsonable(data: Mapping) -> "Region":
        return Region(
            dim=int(data["dim"]),
            z_polytope=np.asarray(data["z_polytope"], dtype=float),
            poly_coords=tuple(data.get("poly_coords", (0, 1))),
            x_box={int(i): tuple(v) for i, v in data.get("x_box", {}).items()},
            param_box={k: tuple(v) for k, v in data.get("param_box", {}).items()},
            degenerate=bool(data.get("degenerate", False)),
        )


def point_region(dim: int, state: Sequence[float], poly_coords: tuple[int, int] = (0, 1)) -> Region:
    """Degenerate single-point region at the given state."""
    state = np.asarray(state, dtype=float)
    vert = state[list(poly_coords)]
    others = {
        i: (float(state[i]), float(state[i])) for i in range(dim) if i not in poly_coords
    }
    return Region(dim=dim, z_polytope=vert[None, :], poly_coords=poly_coords, x_box=others, degenerate=True)


def hull_of_points(
    dim: int,
    points: np.ndarray,
    margin: float = 0.0,
    poly_coords: tuple[int, int] = (0, 1),
    x_box: Optional[Mapping[int, tuple[float, float]]] = None,
    param_box: Optional[Mapping[str, tuple[float, float]]] = None,
    max_vertices: int = 24,
) -> Region:
    """Convex hull of 2-D points, inflated by ``margin`` (Minkowski sum with
    a square) and clipped to the nonnegative quadrant.

    Hulls with more than ``max_vertices`` vertices are replaced by a
    circumscribed ``max_vertices``-gon (outer approximation) before
    inflation, so downstream vertex enumerations stay small.
    """
    if margin < 0:
        raise RegionError(f"margin must be >= 0, got {margin}")
    if len(points) == 0:
        raise RegionError("empty projection")
    verts = convex_hull(np.asarray(points, dtype=float))
    if len(verts) > max_vertices:
        verts = circumscribe(verts, max_vertices)
    verts = _inflate(verts, float(margin))
    if len(verts) >= 3:
        verts = _clip_halfplane(_clip_halfplane(verts, 0), 1)
    # clamp roundoff from clip intersections exactly onto the axes
    verts = np.maximum(verts, 0.0)
    return Region(
        dim=dim,
        z_polytope=verts,
        poly_coords=poly_coords,
        x_box=dict(x_box or {}),
        param_box=dict(param_box or {}),
        degenerate=len(verts) < 3,
    )


def relative_margin(points: np.ndarray, fraction: float = 0.25) -> float:
    """Margin as a fraction of the point cloud's bounding-box diagonal."""
    pts = np.asarray(points, dtype=float)
    span = pts.max(axis=0) - pts.min(axis=0)
    return float(fraction * np.hypot(span[0], span[1]))


def hull_of_trajectory(
    traj: Trajectory,
    coords: tuple[int, int] = (0, 1),
    margin: float = 0.0,
    transient_fraction: float = 0.5,
    x_box: Optional[Mapping[int, tuple[float, float]]] = None,
    param_box: Optional[Mapping[str, tuple[float, float]]] = None,
) -> Region:
    """Inflated convex hull of a trajectory's post-transient projection."""
    _, states = traj.post_transient(transient_fraction)
    if len(states) == 0:
        raise RegionError("post-transient segment is empty")
    pts = states[:, list(coords)]
    return hull_of_points(
        states.shape[1], pts, margin=margin, poly_coords=coords, x_box=x_box, param_box=param_box
    )


@dataclass(frozen=True)
class RegionVertex:
    """One corner of the region: a full state vector plus parameter values."""

    state: np.ndarray
    params: dict


def _interval_corners(lo: float, hi: float) -> list[float]:
    return [lo] if lo == hi else [lo, hi]


def vertices(
    region: Region,
    state_deps: Optional[Iterable[int]] = None,
    param_names: Optional[Iterable[str]] = None,
) -> list[RegionVertex]:
    """All (polytope vertex) x (active box corner) x (parameter corner)
    combinations.

    ``state_deps`` lists the coordinates the Jacobian actually depends on;
    box coordinates outside it are fixed at their midpoint (or 0 when
    unconstrained) instead of doubling the vertex count. Active coordinates
    without a bound raise, since the convex relaxation would be unsound.
    """
    x_box = dict(region.x_box)
    deps = set(range(region.dim)) if state_deps is None else set(state_deps)
    active_box_coords = sorted(i for i in range(region.dim) if i not in region.poly_coords and i in deps)
    for i in active_box_coords:
        if i not in x_box:
            raise RegionError(
                f"coordinate {i} is active in the Jacobian but unbounded; supply an x_box interval"
            )

    pnames = sorted(region.param_box) if param_names is None else sorted(param_names)
    for name in pnames:
        if name not in region.param_box:
            raise RegionError(f"parameter {name!r} has no interval in param_box")

    base = np.zeros(region.dim)
    for i, (lo, hi) in x_box.items():
        base[i] = 0.5 * (lo + hi)

    combos = [([], {})]
    for i in active_box_coords:
        lo, hi = x_box[i]
        combos = [(cs + [(i, v)], ps) for cs, ps in combos for v in _interval_corners(lo, hi)]
    for name in pnames:
        lo, hi = region.param_box[name]
        combos = [(cs, {**ps, name: v}) for cs, ps in combos for v in _interval_corners(lo, hi)]

    out = []
    for zv in region.z_polytope:
        for coord_vals, params in combos:
            state = base.copy()
            state[list(region.poly_coords)] = zv
            for i, v in coord_vals:
                state[i] = v
            out.append(RegionVertex(state=state, params=dict(params)))
    return out


def interior_grid(region: Region, sample_density: int) -> np.ndarray:
    """Deterministic grid of polygon-interior points (at most density**2)."""
    lo, hi = region.bounding_box()
    if np.all(hi == lo):
        return region.z_polytope[:1].copy()
    g0 = np.linspace(lo[0], hi[0], sample_density)
    g1 = np.linspace(lo[1], hi[1], sample_density)
    pts = np.array([[a, b] for a in g0 for b in g1])
    keep = [p for p in pts if region.polygon_contains(p)]
    return np.asarray(keep) if keep else region.z_polytope[:1].copy()


def contains(region: Region, xi: Sequence[float], params: Optional[Mapping[str, float]] = None) -> bool:
    """True iff the state (and optional parameter values) lie in the region."""
    xi = np.asarray(xi, dtype=float)
    if not region.polygon_contains(xi[list(region.poly_coords)]):
        return False
    for i, (lo, hi) in dict(region.x_box).items():
        if not (lo - CONTAIN_TOL <= xi[i] <= hi + CONTAIN_TOL):
            return False
    if params:
        for name, value in params.items():
            if name in region.param_box:
                lo, hi = region.param_box[name]
                if not (lo - CONTAIN_TOL <= value <= hi + CONTAIN_TOL):
                    return False
    return True
