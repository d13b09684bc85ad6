"""Boundary blow-up rescaling: zoomed domains, limit cones, peak rescaling.

Zooming a domain about a boundary anchor, Omega_rho = (Omega - x0)/rho, sends
a polygon to the exact cone spanned by the anchor's incident edges as rho -> 0
(the half-plane at an edge-interior anchor).  Solutions rescale by their peak:
v(x) = u(lam x + x_peak)/m with lam = m^{(1-p)/(2s)}, normalizing the peak to
v(0) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .geometry import AngularUnion, Polygon2D, as_point
from .grids import GridFunction


@dataclass(frozen=True)
class RescaleSpec:
    """Peak-normalization bookkeeping: scale lam = m^{(1-p)/(2s)}."""

    peak_value: float
    p: float
    s: float

    def __post_init__(self):
        if self.peak_value <= 0:
            raise ValueError("peak value must be positive")
        if self.p <= 1:
            raise ValueError("p must exceed 1")

    @property
    def lam(self) -> float:
        return self.peak_value ** ((1.0 - self.p) / (2.0 * self.s))


def rescale_domain(poly: Polygon2D, anchor, rho: float, tol: float = 1e-12) -> Polygon2D:
    """Zoomed polygon (Omega - anchor)/rho; the anchor must sit on the boundary."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    x0 = as_point(anchor, 2)
    scale = float(np.max(np.abs(poly.vertices - x0))) or 1.0
    if poly.boundary_distance(x0[None, :])[0] > tol * max(1.0, scale):
        raise ValueError("anchor must lie on the polygon boundary")
    return Polygon2D((poly.vertices - x0) / rho, check=False)


@dataclass
class ConeLimit:
    """Limit cone at a boundary point: opening angle and starting direction."""

    angle: float          # interior opening angle (pi at an edge point)
    start: float          # angle of the first bounding ray
    at_vertex: bool
    vertex_index: int | None = None

    def section(self) -> AngularUnion:
        return AngularUnion([(self.start, self.start + self.angle)])

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        th = np.mod(np.arctan2(pts[:, 1], pts[:, 0]) - self.start, 2 * np.pi)
        r = np.linalg.norm(pts, axis=1)
        return (r == 0) | (th <= self.angle)

    def to_json(self) -> dict:
        return {"angle": self.angle, "start": self.start,
                "at_vertex": bool(self.at_vertex)}


def limit_cone(poly: Polygon2D, x0, tol: float = 1e-9) -> ConeLimit:
    """Blow-up limit at a boundary point: vertex cone or edge half-plane."""
    x0 = as_point(x0, 2)
    V = poly.vertices
    m = len(V)
    d_vert = np.linalg.norm(V - x0, axis=1)
    i = int(np.argmin(d_vert))
    scale = float(np.max(np.abs(V - x0))) or 1.0
    if d_vert[i] <= tol * scale:
        prev_dir = V[(i - 1) % m] - V[i]
        next_dir = V[(i + 1) % m] - V[i]
        prev_dir = prev_dir / np.linalg.norm(prev_dir)
        next_dir = next_dir / np.linalg.norm(next_dir)
        # counterclockwise polygon: the interior spans from the outgoing edge
        # direction counterclockwise around to the incoming edge direction
        start = math.atan2(next_dir[1], next_dir[0])
        end = math.atan2(prev_dir[1], prev_dir[0])
        angle = (end - start) % (2 * math.pi)
        if angle == 0.0:
            angle = 2 * math.pi
        return ConeLimit(angle, start, True, i)
    # otherwise x0 must sit on an edge interior: half-plane
    A = V
    B = np.roll(V, -1, axis=0)
    for j, (a, b) in enumerate(zip(A, B)):
        ab = b - a
        L = np.linalg.norm(ab)
        tpar = float((x0 - a) @ ab) / L**2
        proj = a + np.clip(tpar, 0.0, 1.0) * ab
        if np.linalg.norm(x0 - proj) <= tol * scale and 0.0 < tpar < 1.0:
            start = math.atan2(ab[1], ab[0])
            return ConeLimit(math.pi, start, False, None)
    raise ValueError("x0 does not lie on the polygon boundary")


def _clip_to_box(vertices: np.ndarray, bound: float) -> np.ndarray | None:
    """Sutherland-Hodgman clip against [-bound, bound]^2.

    Non-convex subjects may come back with degenerate bridge edges; those
    leave crossing-parity membership tests unaffected.  Returns None when the
    polygon misses the box entirely.
    """
    poly = vertices
    for axis, sign in ((0, 1), (0, -1), (1, 1), (1, -1)):
        if len(poly) < 3:
            return None
        inside = sign * poly[:, axis] <= bound
        nxt = np.roll(np.arange(len(poly)), -1)
        out = []
        for i, j in enumerate(nxt):
            a, b = poly[i], poly[j]
            if inside[i]:
                out.append(a)
            if inside[i] != inside[j]:
                t = (bound - sign * a[axis]) / (sign * (b[axis] - a[axis]))
                out.append(a + t * (b - a))
        poly = np.asarray(out).reshape(-1, 2)
        if len(poly) > 1:  # drop consecutive duplicates
            keep = np.concatenate(([True], np.linalg.norm(np.diff(poly, axis=0), axis=1) > 1e-14))
            poly = poly[keep]
    return poly if len(poly) >= 3 else None


def _region_points(indicator, grid: np.ndarray) -> np.ndarray:
    return grid[indicator(grid)]


def _grid_hausdorff(pts_a: np.ndarray, pts_b: np.ndarray) -> float:
    if pts_a.size == 0 and pts_b.size == 0:
        return 0.0
    if pts_a.size == 0 or pts_b.size == 0:
        return math.inf
    da = cKDTree(pts_b).query(pts_a)[0].max()
    db = cKDTree(pts_a).query(pts_b)[0].max()
    return float(max(da, db))


@dataclass
class BcbReport:
    rho: float
    hausdorff: float
    cone_angle: float
    resolution: float

    def to_json(self) -> dict:
        return {"rho": self.rho, "hausdorff": self.hausdorff,
                "cone_angle": self.cone_angle, "resolution": self.resolution}


def _exact_hausdorff(poly: Polygon2D, cone: ConeLimit, samples: int = 4000) -> float:
    """Hausdorff distance of the two regions clipped to the unit disc.

    Region-to-region distance is attained on the boundaries; both boundaries
    are sampled densely (polygon edges and cone rays clipped to the disc, plus
    the arcs) and points interior to the other region are discarded.
    """
    def clip_segments_to_disc(A, B):
        d = B - A
        qa = np.einsum("ij,ij->i", d, d)
        qb = 2.0 * np.einsum("ij,ij->i", A, d)
        qc = np.einsum("ij,ij->i", A, A) - 1.0
        disc = qb * qb - 4.0 * qa * qc
        keep = disc > 0
        sq = np.sqrt(disc[keep])
        t0 = np.maximum(0.0, (-qb[keep] - sq) / (2 * qa[keep]))
        t1 = np.minimum(1.0, (-qb[keep] + sq) / (2 * qa[keep]))
        span = t1 > t0
        A, d, t0, t1 = A[keep][span], d[keep][span], t0[span], t1[span]
        if A.shape[0] == 0:
            return []
        per_edge = max(16, int(samples * 8 / A.shape[0]))
        t = t0[:, None] + (t1 - t0)[:, None] * np.linspace(0, 1, per_edge)[None, :]
        return [(A[:, None, :] + t[:, :, None] * d[:, None, :]).reshape(-1, 2)]

    V = poly.vertices
    bnd_poly = clip_segments_to_disc(V, np.roll(V, -1, axis=0))
    th = np.linspace(0, 2 * math.pi, 4 * samples, endpoint=False)
    arc = np.stack([np.cos(th), np.sin(th)], axis=1)
    bnd_poly.append(arc[poly.contains(arc, tol=1e-12)])
    bnd_poly = np.concatenate(bnd_poly) if bnd_poly else np.empty((0, 2))

    t = np.linspace(0.0, 1.0, samples)[1:, None]
    ray0 = t * np.array([math.cos(cone.start), math.sin(cone.start)])
    end = cone.start + cone.angle
    ray1 = t * np.array([math.cos(end), math.sin(end)])
    bnd_cone = [ray0, ray1, arc[cone.contains(arc)]]
    bnd_cone = np.concatenate(bnd_cone)

    in_poly_a = poly.contains(bnd_cone, tol=1e-12)
    in_cone_b = cone.contains(bnd_poly)
    d1 = 0.0
    only_poly = bnd_poly[~in_cone_b]
    if only_poly.size:
        d1 = float(cKDTree(bnd_cone).query(only_poly)[0].max())
    d2 = 0.0
    only_cone = bnd_cone[~in_poly_a]
    if only_cone.size:
        d2 = float(cKDTree(bnd_poly).query(only_cone)[0].max())
    return max(d1, d2)


def bcb_check(poly: Polygon2D, x0, rho_list, grid_n: int = 100,
              method: str = "grid") -> list[BcbReport]:
    """Distance of the zoomed domain to its limit cone inside the unit ball.

    method "grid": Hausdorff distance between the indicator point sets of
    Omega_rho and the cone on a grid_n x grid_n grid over [-1, 1]^2 (10^4
    points by default); "exact": dense boundary sampling, resolving distances
    far below the grid spacing.
    """
    cone = limit_cone(poly, x0)
    xs = np.linspace(-1.0, 1.0, grid_n)
    gx, gy = np.meshgrid(xs, xs)
    grid = np.stack([gx.ravel(), gy.ravel()], axis=1)
    grid = grid[np.linalg.norm(grid, axis=1) <= 1.0]
    resolution = 2.0 / (grid_n - 1)
    reports = []
    for rho in rho_list:
        zoom = rescale_domain(poly, x0, rho)
        clipped = _clip_to_box(zoom.vertices, 1.5)
        if clipped is None:
            reports.append(BcbReport(float(rho), math.inf, cone.angle, resolution))
            continue
        zoom = Polygon2D(clipped, check=False)
        if method == "grid":
            pa = grid[zoom.contains(grid, tol=1e-12)]
            pb = grid[cone.contains(grid)]
            dist = _grid_hausdorff(pa, pb)
        elif method == "exact":
            dist = _exact_hausdorff(zoom, cone)
        else:
            raise ValueError("method must be 'grid' or 'exact'")
        reports.append(BcbReport(float(rho), dist, cone.angle, resolution))
    return reports


def rescale_solution(u: GridFunction, x_peak, m: float, p: float, s: float) -> GridFunction:
    """Peak-normalized zoom v(x) = u(lam x + x_peak)/m, lam = m^{(1-p)/(2s)}."""
    spec = RescaleSpec(m, p, s)
    lam = spec.lam
    x_peak = as_point(x_peak, u.dim)
    nodes = (u.nodes - x_peak) / lam
    vals = u.values / m
    func = None
    if u.func is not None:
        def func(pts, _u=u):
            pts = np.atleast_2d(np.asarray(pts, float))
            return _u(x_peak + lam * pts) / m
    center = None if u.center is None else (u.center - x_peak) / lam
    return GridFunction(nodes, vals, u.interp, center, func)
