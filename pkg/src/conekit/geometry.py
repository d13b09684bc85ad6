"""Domain geometry: computational domains, spherical cross-sections, inversions.

Domains are the shapes on which the Green kernels and the comparison engine
operate: products of half-spaces (orthant cones), balls and orthant sectors of
balls, exteriors of such sectors, general truncated cones, 2-D polygons, and
the 1-D interval/half-line.  A domain is classified by whether it, or the
complement of its closure, is star-shaped about a center P ("inner"/"outer"
generalized radial convexity); that classification is what licenses the
sphere-comparison machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._quad import reference_directions
from .grids import GridFunction

INNER_GRC = "inner_grc"
OUTER_GRC = "outer_grc"
BOTH = "both"
NEITHER = "neither"

_INCLUSION_DIRS = 2048
_INCLUSION_TOL = 1e-10


def as_point(x, dim: int | None = None) -> np.ndarray:
    p = np.asarray(x, dtype=float).ravel()
    if p.size < 1 or not np.all(np.isfinite(p)):
        raise ValueError("point must be a finite vector of length >= 1")
    if dim is not None and p.size != dim:
        raise ValueError(f"expected a point of dimension {dim}, got {p.size}")
    return p


def _as_points(pts, dim: int) -> np.ndarray:
    a = np.asarray(pts, dtype=float)
    if a.ndim == 1:
        a = a[None, :]
    if a.shape[1] != dim:
        raise ValueError(f"expected points of dimension {dim}")
    return a


def _check_frame(frame: np.ndarray, dim: int) -> np.ndarray:
    O = np.asarray(frame, dtype=float)
    if O.shape != (dim, dim):
        raise ValueError("frame must be a square matrix matching the dimension")
    if np.max(np.abs(O.T @ O - np.eye(dim))) > 1e-12:
        raise ValueError("frame must be orthonormal to 1e-12")
    return O


# ---------------------------------------------------------------------------
# inversions and reflections
# ---------------------------------------------------------------------------

def kelvin_point(x, center, lam: float) -> np.ndarray:
    """Inversion about the sphere of radius lam centered at ``center``.

    Maps x to lam^2 (x - P)/|x - P|^2 + P; an involution exchanging the
    inside and outside of the sphere.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    P = as_point(center, pts.shape[1])
    rel = pts - P
    r2 = np.einsum("ij,ij->i", rel, rel)
    if np.any(r2 == 0.0):
        raise ValueError("inversion is singular at its center")
    out = P + (lam * lam / r2)[:, None] * rel
    return out[0] if single else out


def kelvin_pullback(u: GridFunction, center, lam: float, order_exp: float,
                    nodes=None) -> GridFunction:
    """Weighted inversion of a field: (lam/|x-P|)^order_exp * u(x^lam).

    order_exp is n - 2s for the order-2s transform and 0 for the
    critical-order variant (plain composition with the inversion).
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    P = as_point(center, u.dim)
    pts = u.nodes if nodes is None else _as_points(nodes, u.dim)

    def transformed(q: np.ndarray) -> np.ndarray:
        q = _as_points(q, P.size)
        r = np.linalg.norm(q - P, axis=1)
        if np.any(r == 0.0):
            raise ValueError("cannot sample the transform at its center")
        return (lam / r) ** order_exp * u(kelvin_point(q, P, lam))

    vals = transformed(pts)
    func = transformed if u.func is not None else None
    return GridFunction(pts.copy(), vals, u.interp, u.center, func)


def signed_reflection(y, axes, frame=None, center=None) -> np.ndarray:
    """Negate the chosen frame coordinates (0-based indices) about ``center``."""
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    pts = np.atleast_2d(y)
    n = pts.shape[1]
    P = np.zeros(n) if center is None else as_point(center, n)
    O = np.eye(n) if frame is None else _check_frame(frame, n)
    axes = sorted(set(int(a) for a in axes))
    if axes and (axes[0] < 0 or axes[-1] >= n):
        raise ValueError("reflection axes out of range")
    signs = np.ones(n)
    signs[axes] = -1.0
    out = P + ((pts - P) @ O) * signs @ O.T
    return out[0] if single else out


# ---------------------------------------------------------------------------
# cross-sections of the unit sphere
# ---------------------------------------------------------------------------

class CrossSection:
    """A subset of the unit sphere S^{n-1}; supports sampled inclusion tests."""

    dim: int

    def contains(self, dirs: np.ndarray, pad: float = 0.0) -> np.ndarray:
        raise NotImplementedError

    @property
    def is_empty(self) -> bool:
        d = reference_directions(self.dim, _INCLUSION_DIRS)
        return not bool(np.any(self.contains(d)))

    def includes(self, other: "CrossSection", tol: float = _INCLUSION_TOL) -> bool:
        """Sampled superset test: every direction of ``other`` lies in self."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        d = reference_directions(self.dim, _INCLUSION_DIRS)
        violated = other.contains(d, -tol) & ~self.contains(d, tol)
        return not bool(np.any(violated))


@dataclass
class FullSphere(CrossSection):
    dim: int

    def contains(self, dirs, pad=0.0):
        return np.ones(np.atleast_2d(dirs).shape[0], dtype=bool)


@dataclass
class EmptySection(CrossSection):
    dim: int

    def contains(self, dirs, pad=0.0):
        return np.zeros(np.atleast_2d(dirs).shape[0], dtype=bool)

    @property
    def is_empty(self) -> bool:
        return True


@dataclass
class SignCap(CrossSection):
    """Product-of-half-spheres cap: first k frame coordinates positive."""

    dim: int
    k: int
    frame: np.ndarray | None = None

    def __post_init__(self):
        if not (1 <= self.k <= self.dim):
            raise ValueError("need 1 <= k <= dim")
        if self.frame is not None:
            self.frame = _check_frame(self.frame, self.dim)

    def contains(self, dirs, pad=0.0):
        d = _as_points(dirs, self.dim)
        c = d if self.frame is None else d @ self.frame
        return np.all(c[:, : self.k] > -pad, axis=1)


@dataclass
class SphericalCap(CrossSection):
    """Directions with lo < d . axis < hi (either bound may be infinite)."""

    axis: np.ndarray
    lo: float = -np.inf
    hi: float = np.inf

    def __post_init__(self):
        self.axis = as_point(self.axis)
        self.axis = self.axis / np.linalg.norm(self.axis)
        self.dim = self.axis.size

    def contains(self, dirs, pad=0.0):
        t = _as_points(dirs, self.dim) @ self.axis
        return (t > self.lo - pad) & (t < self.hi + pad)


@dataclass
class AngularUnion(CrossSection):
    """Union of angular intervals on the unit circle (2-D cross-sections)."""

    intervals: list  # list of (start, end) with 0 < end - start <= 2*pi

    def __post_init__(self):
        self.dim = 2
        cleaned = []
        for a, b in self.intervals:
            if b <= a:
                raise ValueError("empty or reversed angular interval")
            if b - a >= 2 * np.pi - 1e-15:
                a, b = 0.0, 2 * np.pi
            cleaned.append((float(a), float(b)))
        self.intervals = sorted(cleaned)

    def contains(self, dirs, pad=0.0):
        d = _as_points(dirs, 2)
        th = np.arctan2(d[:, 1], d[:, 0])
        out = np.zeros(th.size, dtype=bool)
        for a, b in self.intervals:
            out |= np.mod(th - (a - pad), 2 * np.pi) <= (b - a) + 2 * pad
        return out

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def total_angle(self) -> float:
        return float(sum(b - a for a, b in self.intervals))


@dataclass
class SignSet1D(CrossSection):
    """Subset of the two-point sphere S^0 = {-1, +1}."""

    signs: frozenset

    def __post_init__(self):
        self.dim = 1
        self.signs = frozenset(int(s) for s in self.signs)
        if not self.signs <= {-1, 1}:
            raise ValueError("signs must be within {-1, +1}")

    def contains(self, dirs, pad=0.0):
        d = _as_points(dirs, 1)[:, 0]
        out = np.zeros(d.size, dtype=bool)
        if 1 in self.signs:
            out |= d > 0
        if -1 in self.signs:
            out |= d < 0
        return out

    @property
    def is_empty(self) -> bool:
        return not self.signs


# ---------------------------------------------------------------------------
# domains
# ---------------------------------------------------------------------------

class Domain:
    kind = "abstract"
    dim: int

    def contains(self, pts, tol: float = 0.0) -> np.ndarray:
        raise NotImplementedError

    def contains_point(self, p, tol: float = 0.0) -> bool:
        return bool(self.contains(np.atleast_2d(as_point(p, self.dim)), tol)[0])

    def distance_range(self, p) -> tuple[float, float]:
        """(inf |x-P|, sup |x-P|) over the domain."""
        raise NotImplementedError

    def cross_section(self, p, r: float) -> CrossSection:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.to_json()})"


class FreeSpace(Domain):
    kind = "free_space"

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim

    def contains(self, pts, tol=0.0):
        return np.ones(_as_points(pts, self.dim).shape[0], dtype=bool)

    def distance_range(self, p):
        as_point(p, self.dim)
        return 0.0, math.inf

    def cross_section(self, p, r):
        if r <= 0:
            raise ValueError("r must be positive")
        return FullSphere(self.dim) if self.dim > 1 else SignSet1D(frozenset({-1, 1}))

    def to_json(self):
        return {"kind": self.kind, "dim": self.dim}


class HalfSpaceK(Domain):
    """Orthant cone: first k frame coordinates positive (k=1 is a half-space)."""

    kind = "half_space_k"

    def __init__(self, dim: int, k: int, vertex=None, frame=None):
        if not (1 <= k <= dim):
            raise ValueError("need 1 <= k <= dim")
        self.dim, self.k = dim, k
        self.vertex = np.zeros(dim) if vertex is None else as_point(vertex, dim)
        self.frame = None if frame is None else _check_frame(frame, dim)

    def _coords(self, pts):
        rel = _as_points(pts, self.dim) - self.vertex
        return rel if self.frame is None else rel @ self.frame

    def contains(self, pts, tol=0.0):
        return np.all(self._coords(pts)[:, : self.k] > -tol, axis=1)

    def distance_range(self, p):
        c = self._coords(np.atleast_2d(as_point(p, self.dim)))[0]
        neg = np.minimum(c[: self.k], 0.0)
        return float(np.linalg.norm(neg)), math.inf

    def cross_section(self, p, r):
        if r <= 0:
            raise ValueError("r must be positive")
        p = as_point(p, self.dim)
        if not np.allclose(p, self.vertex, atol=1e-12):
            raise NotImplementedError("analytic cross-sections require P at the vertex")
        if self.dim == 1:
            return SignSet1D(frozenset({1}))
        return SignCap(self.dim, self.k, self.frame)

    def to_json(self):
        out = {"kind": self.kind, "dim": self.dim, "k": self.k, "vertex": self.vertex.tolist()}
        if self.frame is not None:
            out["frame"] = self.frame.tolist()
        return out


class Ball(Domain):
    kind = "ball"

    def __init__(self, center, radius: float):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.center = as_point(center)
        self.dim = self.center.size
        self.radius = float(radius)

    def contains(self, pts, tol=0.0):
        r = np.linalg.norm(_as_points(pts, self.dim) - self.center, axis=1)
        return r < self.radius + tol

    def distance_range(self, p):
        d = np.linalg.norm(as_point(p, self.dim) - self.center)
        return max(0.0, d - self.radius), d + self.radius

    def cross_section(self, p, r):
        if r <= 0:
            raise ValueError("r must be positive")
        u = as_point(p, self.dim) - self.center
        du = np.linalg.norm(u)
        if du < 1e-14:
            if r < self.radius:
                return FullSphere(self.dim) if self.dim > 1 else SignSet1D(frozenset({-1, 1}))
            return EmptySection(self.dim)
        hi = (self.radius**2 - r**2 - du**2) / (2 * r * du)
        if hi >= 1.0:
            return FullSphere(self.dim)
        if hi <= -1.0:
            return EmptySection(self.dim)
        return SphericalCap(-u / du, lo=-hi, hi=np.inf)

    def to_json(self):
        return {"kind": self.kind, "dim": self.dim, "center": self.center.tolist(),
                "radius": self.radius}


class BallK(Domain):
    """Orthant sector of a ball: orthant cone intersected with B_R(vertex)."""

    kind = "ball_k"

    def __init__(self, dim: int, k: int, vertex=None, radius: float = 1.0, frame=None):
        if radius <= 0:
            raise ValueError("radius must be positive")
        if not (0 <= k <= dim):
            raise ValueError("need 0 <= k <= dim")
        self.dim, self.k = dim, k
        self.vertex = np.zeros(dim) if vertex is None else as_point(vertex, dim)
        self.radius = float(radius)
        self.frame = None if frame is None else _check_frame(frame, dim)

    def _coords(self, pts):
        rel = _as_points(pts, self.dim) - self.vertex
        return rel if self.frame is None else rel @ self.frame

    def contains(self, pts, tol=0.0):
        c = self._coords(pts)
        ok = np.linalg.norm(c, axis=1) < self.radius + tol
        if self.k:
            ok &= np.all(c[:, : self.k] > -tol, axis=1)
        return ok

    def distance_range(self, p):
        c = self._coords(np.atleast_2d(as_point(p, self.dim)))[0]
        proj = c.copy()
        proj[: self.k] = np.maximum(proj[: self.k], 0.0)
        nr = np.linalg.norm(proj)
        if nr > self.radius:
            proj *= self.radius / nr
        d = float(np.linalg.norm(c - proj))
        # sup over the closed sector: attained on the sphere boundary
        if np.allclose(c, 0.0, atol=1e-14):
            rho = self.radius
        else:
            rho = float(np.linalg.norm(c) + self.radius)  # upper bound; exact at vertex
            if self.k == 0:
                rho = float(np.linalg.norm(c) + self.radius)
        return d, rho

    def cross_section(self, p, r):
        if r <= 0:
            raise ValueError("r must be positive")
        p = as_point(p, self.dim)
        if not np.allclose(p, self.vertex, atol=1e-12):
            raise NotImplementedError("analytic cross-sections require P at the vertex")
        if r >= self.radius:
            return EmptySection(self.dim)
        if self.k == 0:
            return FullSphere(self.dim) if self.dim > 1 else SignSet1D(frozenset({-1, 1}))
        if self.dim == 1:
            return SignSet1D(frozenset({1}))
        return SignCap(self.dim, self.k, self.frame)

    def to_json(self):
        out = {"kind": self.kind, "dim": self.dim, "k": self.k,
               "vertex": self.vertex.tolist(), "radius": self.radius}
        if self.frame is not None:
            out["frame"] = self.frame.tolist()
        return out


class ExteriorBallK(Domain):
    """Orthant cone minus the closed ball of radius R about the vertex."""

    kind = "exterior_ball_k"

    def __init__(self, dim: int, k: int, vertex=None, radius: float = 1.0, frame=None):
        if radius <= 0:
            raise ValueError("radius must be positive")
        if not (0 <= k <= dim):
            raise ValueError("need 0 <= k <= dim")
        self.dim, self.k = dim, k
        self.vertex = np.zeros(dim) if vertex is None else as_point(vertex, dim)
        self.radius = float(radius)
        self.frame = None if frame is None else _check_frame(frame, dim)

    def _coords(self, pts):
        rel = _as_points(pts, self.dim) - self.vertex
        return rel if self.frame is None else rel @ self.frame

    def contains(self, pts, tol=0.0):
        c = self._coords(pts)
        ok = np.linalg.norm(c, axis=1) > self.radius - tol
        if self.k:
            ok &= np.all(c[:, : self.k] > -tol, axis=1)
        return ok

    def distance_range(self, p):
        p = as_point(p, self.dim)
        if not np.allclose(p, self.vertex, atol=1e-12):
            raise NotImplementedError("distance_range requires P at the vertex")
        return self.radius, math.inf

    def cross_section(self, p, r):
        if r <= 0:
            raise ValueError("r must be positive")
        p = as_point(p, self.dim)
        if not np.allclose(p, self.vertex, atol=1e-12):
            raise NotImplementedError("analytic cross-sections require P at the vertex")
        if r <= self.radius:
            return EmptySection(self.dim)
        if self.k == 0:
            return FullSphere(self.dim) if self.dim > 1 else SignSet1D(frozenset({-1, 1}))
        if self.dim == 1:
            return SignSet1D(frozenset({1}))
        return SignCap(self.dim, self.k, self.frame)

    def ball(self) -> BallK:
        return BallK(self.dim, self.k, self.vertex, self.radius, self.frame)

    def to_json(self):
        out = {"kind": self.kind, "dim": self.dim, "k": self.k,
               "vertex": self.vertex.tolist(), "radius": self.radius}
        if self.frame is not None:
            out["frame"] = self.frame.tolist()
        return out


class TruncatedCone(Domain):
    """Radial slab of a cone: r_min < |x - vertex| < r_max, direction in Sigma."""

    kind = "truncated_cone"

    def __init__(self, vertex, section: CrossSection, r_min: float, r_max: float | None):
        self.vertex = as_point(vertex)
        self.dim = self.vertex.size
        if section.dim != self.dim:
            raise ValueError("cross-section dimension mismatch")
        self.section = section
        r_max_eff = math.inf if r_max is None else float(r_max)
        if not (0 <= r_min < r_max_eff):
            raise ValueError("need 0 <= r_min < r_max")
        self.r_min, self.r_max = float(r_min), r_max_eff

    def contains(self, pts, tol=0.0):
        rel = _as_points(pts, self.dim) - self.vertex
        r = np.linalg.norm(rel, axis=1)
        ok = (r > self.r_min - tol) & (r < self.r_max + tol)
        nz = r > 0
        dirs = np.zeros_like(rel)
        dirs[nz] = rel[nz] / r[nz, None]
        ok &= nz & self.section.contains(dirs, pad=tol)
        return ok

    def distance_range(self, p):
        p = as_point(p, self.dim)
        if not np.allclose(p, self.vertex, atol=1e-12):
            raise NotImplementedError("distance_range requires P at the vertex")
        return self.r_min, self.r_max

    def cross_section(self, p, r):
        if r <= 0:
            raise ValueError("r must be positive")
        p = as_point(p, self.dim)
        if not np.allclose(p, self.vertex, atol=1e-12):
            raise NotImplementedError("analytic cross-sections require P at the vertex")
        if self.r_min < r < self.r_max:
            return self.section
        return EmptySection(self.dim)

    def to_json(self):
        if isinstance(self.section, SignCap):
            sec = {"type": "sign_cap", "k": self.section.k}
        elif isinstance(self.section, AngularUnion):
            sec = {"type": "angular_union", "intervals": self.section.intervals}
        elif isinstance(self.section, FullSphere):
            sec = {"type": "full"}
        else:
            raise NotImplementedError("serialization for this cross-section kind")
        return {"kind": self.kind, "dim": self.dim, "vertex": self.vertex.tolist(),
                "section": sec, "r_min": self.r_min,
                "r_max": None if math.isinf(self.r_max) else self.r_max}


class Polygon2D(Domain):
    kind = "polygon2d"

    def __init__(self, vertices, check: bool = True):
        V = np.asarray(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 2 or V.shape[0] < 3:
            raise ValueError("need at least three 2-D vertices")
        self.vertices = V
        self.dim = 2
        if 2.0 * self.signed_area() <= 0:
            raise ValueError("polygon must be positively oriented (counterclockwise)")
        if check and len(V) <= 1500 and not self._is_simple():
            raise ValueError("polygon must be simple (non self-intersecting)")

    def signed_area(self) -> float:
        V = self.vertices
        W = np.roll(V, -1, axis=0)
        return 0.5 * float(np.sum(V[:, 0] * W[:, 1] - W[:, 0] * V[:, 1]))

    def area(self) -> float:
        return abs(self.signed_area())

    def _is_simple(self) -> bool:
        V = self.vertices
        m = len(V)
        segs = [(V[i], V[(i + 1) % m]) for i in range(m)]

        def cross2(u, v):
            return u[0] * v[1] - u[1] * v[0]

        def intersects(p1, p2, p3, p4):
            d1 = cross2(p4 - p3, p1 - p3)
            d2 = cross2(p4 - p3, p2 - p3)
            d3 = cross2(p2 - p1, p3 - p1)
            d4 = cross2(p2 - p1, p4 - p1)
            return (d1 * d2 < 0) and (d3 * d4 < 0)

        for i in range(m):
            for j in range(i + 2, m):
                if i == 0 and j == m - 1:
                    continue
                if intersects(*segs[i], *segs[j]):
                    return False
        return True

    def edges(self):
        V = self.vertices
        return V, np.roll(V, -1, axis=0)

    def _edge_chunks(self, npts: int):
        A, B = self.edges()
        m = len(A)
        step = max(1, int(5e6 / max(npts, 1)))
        for i in range(0, m, step):
            yield A[i:i + step], B[i:i + step]

    def boundary_distance(self, pts) -> np.ndarray:
        pts = _as_points(pts, 2)
        best = np.full(pts.shape[0], np.inf)
        for A, B in self._edge_chunks(pts.shape[0]):
            ab = B - A                                        # (m, 2)
            L2 = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-300)
            rel = pts[None, :, :] - A[:, None, :]             # (m, p, 2)
            t = np.clip(np.einsum("mpj,mj->mp", rel, ab) / L2[:, None], 0.0, 1.0)
            proj = rel - t[:, :, None] * ab[:, None, :]
            best = np.minimum(best, np.sqrt(np.einsum("mpj,mpj->mp", proj, proj)).min(axis=0))
        return best

    def contains(self, pts, tol=0.0):
        pts = _as_points(pts, 2)
        x, y = pts[:, 0], pts[:, 1]
        inside = np.zeros(pts.shape[0], dtype=bool)
        for A, B in self._edge_chunks(pts.shape[0]):
            x1, y1 = A[:, 0][:, None], A[:, 1][:, None]
            x2, y2 = B[:, 0][:, None], B[:, 1][:, None]
            cond = (y1 > y[None, :]) != (y2 > y[None, :])
            with np.errstate(divide="ignore", invalid="ignore"):
                xin = x1 + (y[None, :] - y1) * (x2 - x1) / (y2 - y1)
            hits = cond & (x[None, :] < xin)
            inside ^= (np.sum(hits, axis=0) % 2).astype(bool)
        if tol > 0:
            inside |= self.boundary_distance(pts) <= tol
        return inside

    def distance_range(self, p):
        p = as_point(p, 2)
        d = 0.0 if self.contains_point(p, tol=1e-12) else float(self.boundary_distance(p[None, :])[0])
        rho = float(np.max(np.linalg.norm(self.vertices - p, axis=1)))
        return d, rho

    def cross_section(self, p, r):
        """Angular intervals of the circle |x - P| = r lying inside the polygon."""
        if r <= 0:
            raise ValueError("r must be positive")
        P = as_point(p, 2)
        events = []
        A, B = self.edges()
        for a, b in zip(A, B):
            # |a + t(b-a) - P|^2 = r^2 on t in [0, 1]
            d = b - a
            f = a - P
            qa = float(d @ d)
            qb = 2.0 * float(f @ d)
            qc = float(f @ f) - r * r
            disc = qb * qb - 4 * qa * qc
            if disc < 0:
                continue
            sq = math.sqrt(disc)
            for t in ((-qb - sq) / (2 * qa), (-qb + sq) / (2 * qa)):
                if -1e-12 <= t <= 1 + 1e-12:
                    z = a + np.clip(t, 0.0, 1.0) * d - P
                    events.append(math.atan2(z[1], z[0]) % (2 * math.pi))
        if not events:
            probe = P + np.array([r, 0.0])
            if self.contains_point(probe, tol=0.0):
                return AngularUnion([(0.0, 2 * math.pi)])
            return EmptySection(2)
        events = sorted(set(events))
        # dedupe nearly equal angles (tangencies)
        dedup = [events[0]]
        for e in events[1:]:
            if e - dedup[-1] > 1e-12:
                dedup.append(e)
        events = dedup
        intervals = []
        m = len(events)
        for i in range(m):
            a0 = events[i]
            b0 = events[(i + 1) % m] + (2 * math.pi if i == m - 1 else 0.0)
            if b0 - a0 < 1e-14:
                continue
            mid = 0.5 * (a0 + b0)
            probe = P + r * np.array([math.cos(mid), math.sin(mid)])
            if self.contains_point(probe, tol=0.0):
                intervals.append((a0, b0))
        if not intervals:
            return EmptySection(2)
        return AngularUnion(intervals)

    def to_json(self):
        return {"kind": self.kind, "dim": 2, "vertices": self.vertices.tolist()}


class Interval(Domain):
    kind = "interval"

    def __init__(self, a: float, b: float):
        if not (b > a):
            raise ValueError("need a < b")
        self.a, self.b = float(a), float(b)
        self.dim = 1

    def contains(self, pts, tol=0.0):
        x = _as_points(pts, 1)[:, 0]
        return (x > self.a - tol) & (x < self.b + tol)

    def distance_range(self, p):
        p = float(as_point(p, 1)[0])
        d = max(0.0, self.a - p, p - self.b)
        return d, max(abs(self.b - p), abs(p - self.a))

    def cross_section(self, p, r):
        if r <= 0:
            raise ValueError("r must be positive")
        p = float(as_point(p, 1)[0])
        signs = set()
        if self.a < p + r < self.b:
            signs.add(1)
        if self.a < p - r < self.b:
            signs.add(-1)
        return SignSet1D(frozenset(signs)) if signs else EmptySection(1)

    def to_json(self):
        return {"kind": self.kind, "dim": 1, "a": self.a, "b": self.b}


class HalfLine(Domain):
    kind = "half_line"

    def __init__(self, origin: float = 0.0, direction: int = 1):
        if direction not in (-1, 1):
            raise ValueError("direction must be +1 or -1")
        self.origin, self.direction = float(origin), int(direction)
        self.dim = 1

    def contains(self, pts, tol=0.0):
        x = _as_points(pts, 1)[:, 0]
        return self.direction * (x - self.origin) > -tol

    def distance_range(self, p):
        p = float(as_point(p, 1)[0])
        return max(0.0, -self.direction * (p - self.origin)), math.inf

    def cross_section(self, p, r):
        if r <= 0:
            raise ValueError("r must be positive")
        p = float(as_point(p, 1)[0])
        signs = set()
        if self.direction * (p + r - self.origin) > 0:
            signs.add(1)
        if self.direction * (p - r - self.origin) > 0:
            signs.add(-1)
        return SignSet1D(frozenset(signs)) if signs else EmptySection(1)

    def to_json(self):
        return {"kind": self.kind, "dim": 1, "origin": self.origin,
                "direction": self.direction}


def domain_from_json(obj: dict) -> Domain:
    kind = obj["kind"]
    if kind == "free_space":
        return FreeSpace(obj["dim"])
    if kind == "half_space_k":
        return HalfSpaceK(obj["dim"], obj["k"], obj.get("vertex"), obj.get("frame"))
    if kind == "ball":
        return Ball(obj["center"], obj["radius"])
    if kind == "ball_k":
        return BallK(obj["dim"], obj["k"], obj.get("vertex"), obj["radius"], obj.get("frame"))
    if kind == "exterior_ball_k":
        return ExteriorBallK(obj["dim"], obj["k"], obj.get("vertex"), obj["radius"],
                             obj.get("frame"))
    if kind == "truncated_cone":
        sec = obj["section"]
        if sec["type"] == "sign_cap":
            section: CrossSection = SignCap(obj["dim"], sec["k"])
        elif sec["type"] == "angular_union":
            section = AngularUnion([tuple(t) for t in sec["intervals"]])
        elif sec["type"] == "full":
            section = FullSphere(obj["dim"])
        else:
            raise ValueError(f"unknown section type {sec['type']!r}")
        return TruncatedCone(obj["vertex"], section, obj["r_min"], obj.get("r_max"))
    if kind == "polygon2d":
        return Polygon2D(obj["vertices"])
    if kind == "interval":
        return Interval(obj["a"], obj["b"])
    if kind == "half_line":
        return HalfLine(obj.get("origin", 0.0), obj.get("direction", 1))
    raise ValueError(f"unknown domain kind {kind!r}")


def cross_section(dom: Domain, p, r: float) -> CrossSection:
    """Rescaled trace of the domain on the sphere of radius r about P."""
    return dom.cross_section(p, r)


# ---------------------------------------------------------------------------
# star-convexity classification
# ---------------------------------------------------------------------------

@dataclass
class MssClassification:
    """Outcome of the monotone cross-section test about a center P."""

    tag: str
    center: np.ndarray
    d_omega: float
    rho_omega: float

    def to_json(self) -> dict:
        return {"tag": self.tag, "center": self.center.tolist(),
                "d_omega": self.d_omega,
                "rho_omega": None if math.isinf(self.rho_omega) else self.rho_omega}


def classify_mss(dom: Domain, p, r_grid) -> MssClassification:
    """Classify star-convexity of the domain or its complement about P.

    Samples cross-sections on the given radius grid; the domain is inner
    (outer) radially convex iff the sections are inclusion-decreasing
    (increasing) in r.  Grid-resolved: monotonicity is only checked between
    consecutive sampled radii.
    """
    P = as_point(p, dom.dim)
    r_grid = np.asarray(r_grid, dtype=float).ravel()
    if r_grid.size == 0:
        raise ValueError("r_grid must be nonempty")
    if np.any(r_grid <= 0) or np.any(np.diff(r_grid) <= 0):
        raise ValueError("r_grid must be positive and strictly increasing")
    d, rho = dom.distance_range(P)
    sections = [dom.cross_section(P, r) for r in r_grid]
    inner = all(sections[i].includes(sections[i + 1]) for i in range(len(sections) - 1))
    outer = all(sections[i + 1].includes(sections[i]) for i in range(len(sections) - 1))
    # an inner center must lie in the closure of the domain; an outer center
    # must lie outside the open domain (the complement of free space is empty
    # and admits any center)
    if inner and d > 1e-12:
        inner = False
    if outer and not isinstance(dom, FreeSpace) and dom.contains_point(P, tol=-1e-12):
        outer = False
    if inner and outer:
        tag = BOTH
    elif inner:
        tag = INNER_GRC
    elif outer:
        tag = OUTER_GRC
    else:
        tag = NEITHER
    return MssClassification(tag, P, float(d), float(rho))
