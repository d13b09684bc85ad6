"""Fundamental solutions, reflection-image Green kernels, and the nonlocal operator.

The Green functions implemented here are the closed-form ones: signed sums of
fundamental solutions over coordinate sign flips for orthant cones (2^k image
points), with an extra family of sphere-inverted images for orthant sectors of
balls; the exterior kernels follow by inversion.  The one-dimensional order-1/2
kernels on an interval and a half-line have explicit logarithmic formulas.
Everything evaluates vectorized over point arrays.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gamma as _gamma

from . import geometry as geo
from ._quad import dyadic_breaks, gauss_panel, gauss_panels, sphere_directions

ANGULAR = "angular"
PAPER_CYCLES = "paper_cycles"


def worker_count() -> int:
    """Worker cap from the CONEKIT_THREADS environment variable (>= 1)."""
    try:
        return max(1, int(os.environ.get("CONEKIT_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# fundamental solutions
# ---------------------------------------------------------------------------

def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1}."""
    return 2.0 * math.pi ** (n / 2.0) / _gamma(n / 2.0)


@lru_cache(maxsize=None)
def fundamental_constant(n: int, s: float) -> float:
    """Constant in the fundamental solution of the order-2s Laplacian.

    Subcritical order (2s < n): the Riesz kernel constant
    Gamma((n-2s)/2) / (4^s pi^{n/2} Gamma(s)); for s = 1 this equals
    1/((n-2) area(S^{n-1})).  Critical order (2s = n): coefficient of
    log(1/|x-y|), via the exact radial recursion for even n >= 4.
    """
    if 2 * s < n:
        return float(_gamma((n - 2 * s) / 2.0) / (4.0**s * math.pi ** (n / 2.0) * _gamma(s)))
    if 2 * s == n:
        if n == 1:
            return 1.0 / math.pi
        if n == 2:
            return 1.0 / (2.0 * math.pi)
        if n % 2 == 0:
            c = fundamental_constant(n, 1.0)
            k = 1
            while 2 * (k + 1) < n:
                c /= 2 * k * (n - 2 * k - 2)
                k += 1
            return c / (n - 2)
    raise ValueError("need 2s <= n (integer s at critical order)")


def _pair_dist(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.linalg.norm(np.atleast_2d(x) - np.atleast_2d(y), axis=1)


def fundamental(s: float, n: int, x, y, constant: float | None = None) -> np.ndarray | float:
    """Free-space kernel: c/|x-y|^{n-2s} (2s < n) or c ln(1/|x-y|) (2s = n)."""
    d = _pair_dist(np.asarray(x, float), np.asarray(y, float))
    if np.any(d == 0.0):
        raise ValueError("fundamental solution is singular at x = y")
    c = fundamental_constant(n, s) if constant is None else constant
    if 2 * s < n:
        out = c * d ** (2 * s - n)
    elif 2 * s == n:
        out = c * np.log(1.0 / d)
    else:
        raise ValueError("need 2s <= n")
    return float(out[0]) if out.size == 1 and np.ndim(x) == 1 else out


# ---------------------------------------------------------------------------
# Green kernels
# ---------------------------------------------------------------------------

class GreenKernel:
    """Base class: pointwise-evaluable Dirichlet/Navier Green function."""

    s: float
    domain: geo.Domain

    @property
    def dim(self) -> int:
        return self.domain.dim

    def eval(self, x, y, validate: bool = True) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x, y):
        out = self.eval(x, y)
        return float(out[0]) if out.size == 1 else out


class FreeSpaceKernel(GreenKernel):
    def __init__(self, domain: geo.FreeSpace, s: float, constant: float | None = None):
        self.domain, self.s, self.constant = domain, float(s), constant

    def eval(self, x, y, validate: bool = True):
        return np.atleast_1d(fundamental(self.s, self.dim, x, y, self.constant))


def _sign_pattern(dim: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """All 2^k coordinate sign flips on the first k axes, with parities."""
    signs = np.ones((2**k, dim))
    parity = np.ones(2**k)
    for i, subset in enumerate(itertools.chain.from_iterable(
            itertools.combinations(range(k), j) for j in range(k + 1))):
        signs[i, list(subset)] = -1.0
        parity[i] = (-1.0) ** len(subset)
    return signs, parity


class ImagesKernel(GreenKernel):
    """Reflection-image Green function on an orthant cone or ball sector.

    Valid for s = 1 (Dirichlet) and integer s (Navier): the signed sum of
    fundamental solutions over the 2^k sign flips, minus, on ball sectors,
    the matching sum of sphere-inverted images.  Vanishes on the boundary and
    is symmetric in (x, y).
    """

    def __init__(self, domain, s: float = 1.0, constant: float | None = None):
        if isinstance(domain, geo.Ball):
            domain = geo.BallK(domain.dim, 0, domain.center, domain.radius)
        if not isinstance(domain, (geo.HalfSpaceK, geo.BallK)):
            raise TypeError("images kernel needs an orthant cone or a ball sector")
        n = domain.dim
        if not (s == 1.0 or (float(s).is_integer() and s >= 1)):
            raise ValueError("images formula requires s = 1 or integer s")
        if 2 * s > n:
            raise ValueError("need 2s <= n")
        self.domain, self.s = domain, float(s)
        self.constant = fundamental_constant(n, float(s)) if constant is None else constant
        self._signs, self._parity = _sign_pattern(n, domain.k)
        self._log = (2 * s == n)

    def _gamma_of(self, dist: np.ndarray) -> np.ndarray:
        if self._log:
            with np.errstate(divide="ignore"):
                return self.constant * np.log(1.0 / dist)
        return self.constant * dist ** (2 * self.s - self.dim)

    def _coords(self, pts):
        d = self.domain
        rel = np.atleast_2d(np.asarray(pts, float)) - d.vertex
        return rel if d.frame is None else rel @ d.frame

    def eval(self, x, y, validate: bool = True):
        d = self.domain
        X, Y = np.atleast_2d(np.asarray(x, float)), np.atleast_2d(np.asarray(y, float))
        X, Y = np.broadcast_arrays(X, Y)
        if validate:
            tol = 1e-9 * (getattr(d, "radius", 1.0))
            if not (np.all(d.contains(X, tol)) and np.all(d.contains(Y, tol))):
                raise ValueError("evaluation points must lie in the closed domain")
        xp, yp = self._coords(X), self._coords(Y)
        total = np.zeros(xp.shape[0])
        for sgn, par in zip(self._signs, self._parity):
            ry = yp * sgn
            dist = np.linalg.norm(xp - ry, axis=1)
            total += par * self._gamma_of(dist)
        if isinstance(d, geo.BallK):
            R = d.radius
            x2 = np.einsum("ij,ij->i", xp, xp)
            y2 = np.einsum("ij,ij->i", yp, yp)
            for sgn, par in zip(self._signs, self._parity):
                dot = np.einsum("ij,ij->i", xp, yp * sgn)
                dist = np.sqrt(np.maximum(x2 * y2 / R**2 - 2.0 * dot + R**2, 0.0))
                total -= par * self._gamma_of(dist)
        return total


class ExteriorImagesKernel(GreenKernel):
    """Green function outside a ball sector, by inversion of the sector kernel.

    G(x, y) = (R^2/(|x-P||y-P|))^{n-2s} G_sector(x*, y*) with x* the inversion
    about the sphere of radius R; the prefactor degenerates to 1 at critical
    order 2s = n.  The choice of prefactor is the one that preserves the
    c|x-y|^{2s-n} diagonal singularity (checked by the unit-flux test).
    """

    def __init__(self, domain: geo.ExteriorBallK, s: float = 1.0, constant: float | None = None):
        if not isinstance(domain, geo.ExteriorBallK):
            raise TypeError("exterior kernel needs an ExteriorBallK domain")
        self.domain, self.s = domain, float(s)
        self._inner = ImagesKernel(domain.ball(), s, constant)

    def eval(self, x, y, validate: bool = True):
        d = self.domain
        X, Y = np.atleast_2d(np.asarray(x, float)), np.atleast_2d(np.asarray(y, float))
        X, Y = np.broadcast_arrays(X, Y)
        if validate:
            tol = 1e-9 * d.radius
            if not (np.all(d.contains(X, tol)) and np.all(d.contains(Y, tol))):
                raise ValueError("evaluation points must lie outside the closed ball, in the cone")
        R, P = d.radius, d.vertex
        rx = np.linalg.norm(X - P, axis=1)
        ry = np.linalg.norm(Y - P, axis=1)
        Xs = P + (R**2 / rx**2)[:, None] * (X - P)
        Ys = P + (R**2 / ry**2)[:, None] * (Y - P)
        inner = self._inner.eval(Xs, Ys, validate=False)
        n = self.dim
        if 2 * self.s == n:
            return inner
        return (R**2 / (rx * ry)) ** (n - 2 * self.s) * inner


class IntervalSqrtKernel(GreenKernel):
    """Order-1/2 Green function on a 1-D interval (explicit log formula)."""

    def __init__(self, domain: geo.Interval, c: float = 1.0):
        self.domain, self.s, self.c = domain, 0.5, float(c)

    def eval(self, x, y, validate: bool = True):
        d = self.domain
        X = np.atleast_1d(np.asarray(x, float)).ravel()
        Y = np.atleast_1d(np.asarray(y, float)).ravel()
        X, Y = np.broadcast_arrays(X, Y)
        if validate and not (np.all(d.contains(X[:, None], 1e-12)) and np.all(d.contains(Y[:, None], 1e-12))):
            raise ValueError("points must lie in the interval")
        r = 0.5 * (d.b - d.a)
        m = 0.5 * (d.a + d.b)
        u, v = X - m, Y - m
        num = r * r - u * v + np.sqrt(np.maximum((r * r - u * u) * (r * r - v * v), 0.0))
        with np.errstate(divide="ignore"):
            return self.c * np.log(num / (r * np.abs(u - v)))


class HalfLineSqrtKernel(GreenKernel):
    """Order-1/2 Green function on a half-line (limit of the interval kernel)."""

    def __init__(self, domain: geo.HalfLine, c: float = 1.0):
        self.domain, self.s, self.c = domain, 0.5, float(c)

    def eval(self, x, y, validate: bool = True):
        d = self.domain
        X = np.atleast_1d(np.asarray(x, float)).ravel()
        Y = np.atleast_1d(np.asarray(y, float)).ravel()
        X, Y = np.broadcast_arrays(X, Y)
        u = d.direction * (X - d.origin)
        v = d.direction * (Y - d.origin)
        if validate and (np.any(u < -1e-12) or np.any(v < -1e-12)):
            raise ValueError("points must lie on the half-line")
        with np.errstate(divide="ignore"):
            return self.c * np.log((u + v + 2.0 * np.sqrt(np.maximum(u * v, 0.0))) / np.abs(u - v))


class IteratedKernel(GreenKernel):
    """Higher-order kernel G^k(x,y) = ∫ G^1(x,z) G^{k-1}(z,y) dz on a ball sector.

    Evaluated by a polar quadrature split along the perpendicular bisector of
    (x, y): each half uses rays from its own endpoint, whose volume Jacobian
    absorbs that endpoint's kernel singularity while the other factor stays
    smooth on that half.  Cost grows exponentially with ``steps``; steps = 2
    is the practical case.
    """

    def __init__(self, base: ImagesKernel, steps: int, angular_order: int = 16,
                 radial_order: int = 12):
        if not isinstance(base.domain, geo.BallK):
            raise ValueError("iterated kernels need a bounded ball sector")
        if steps < 1:
            raise ValueError("steps must be >= 1")
        self.base, self.steps = base, int(steps)
        self.domain, self.s = base.domain, base.s * steps
        if 2 * self.s > self.dim:
            raise ValueError("iterated order exceeds the critical order")
        self.angular_order, self.radial_order = angular_order, radial_order
        self._dirs, self._wdirs = sphere_directions(self.dim, angular_order)
        self._prev = (base if steps == 2 else
                      IteratedKernel(base, steps - 1, angular_order, radial_order)
                      if steps > 2 else None)

    def _ray_exit(self, q: np.ndarray, other: np.ndarray) -> np.ndarray:
        """Exit parameter of rays from q: sphere, cone faces, bisector plane."""
        d = self.domain
        qc = (q - d.vertex) if d.frame is None else (q - d.vertex) @ d.frame
        dirs = self._dirs if d.frame is None else self._dirs @ d.frame
        R = d.radius
        b = dirs @ qc
        t_sph = -b + np.sqrt(np.maximum(b * b + R * R - qc @ qc, 0.0))
        t = t_sph
        for i in range(d.k):
            di = dirs[:, i]
            with np.errstate(divide="ignore"):
                ti = np.where(di < 0, -qc[i] / di, np.inf)
            t = np.minimum(t, ti)
        u = other - q
        sep = np.linalg.norm(u)
        if sep > 0:
            # keep the side of the bisector containing q
            a = self._dirs @ (u / sep)
            with np.errstate(divide="ignore"):
                t_pl = np.where(a > 0, (sep / 2.0) / a, np.inf)
            t = np.minimum(t, t_pl)
        return t

    def _half_integral(self, q: np.ndarray, other: np.ndarray, x: np.ndarray,
                       y: np.ndarray) -> float:
        t_exit = self._ray_exit(q, other)
        sep = np.linalg.norm(q - other)
        n = self.dim
        total = 0.0
        tq, wq = gauss_panel(0.0, 1.0, self.radial_order)
        cand = sep * np.array([0.25, 0.5, 1.0, 2.0, 4.0])
        for j, (te, d, wd) in enumerate(zip(t_exit, self._dirs, self._wdirs)):
            if not np.isfinite(te) or te <= 0:
                continue
            breaks = np.concatenate(([0.0], cand[cand < te], [te]))
            breaks = np.unique(breaks)
            for a, b in zip(breaks[:-1], breaks[1:]):
                t = a + (b - a) * tq
                w = (b - a) * wq
                z = q[None, :] + t[:, None] * d[None, :]
                g1 = self.base.eval(np.broadcast_to(x, z.shape), z, validate=False)
                g2 = (self._prev.eval(z, np.broadcast_to(y, z.shape), validate=False)
                      if self.steps >= 2 else np.ones(z.shape[0]))
                total += wd * np.sum(w * t ** (n - 1) * g1 * g2)
        return total

    def eval(self, x, y, validate: bool = True):
        X, Y = np.atleast_2d(np.asarray(x, float)), np.atleast_2d(np.asarray(y, float))
        X, Y = np.broadcast_arrays(X, Y)
        if self.steps == 1:
            return self.base.eval(X, Y, validate)
        if validate:
            tol = 1e-9 * self.domain.radius
            if not (np.all(self.domain.contains(X, tol)) and np.all(self.domain.contains(Y, tol))):
                raise ValueError("points must lie in the closed domain")
        out = np.empty(X.shape[0])
        for i, (xi, yi) in enumerate(zip(X, Y)):
            # canonical order makes the rule, hence the value, symmetric
            a, b = (xi, yi) if tuple(xi) <= tuple(yi) else (yi, xi)
            if np.array_equal(a, b):
                raise ValueError("iterated kernel is singular at x = y")
            out[i] = self._half_integral(a, b, a, b) + self._half_integral(b, a, a, b)
        return out


def green_for(domain: geo.Domain, s: float, constant: float | None = None,
              c: float = 1.0) -> GreenKernel:
    """Kernel factory for the domain kinds with closed-form Green functions."""
    if isinstance(domain, geo.FreeSpace):
        return FreeSpaceKernel(domain, s, constant)
    if isinstance(domain, geo.HalfSpaceK):
        return ImagesKernel(domain, s, constant)
    if isinstance(domain, (geo.Ball, geo.BallK)):
        if float(s).is_integer() and s >= 2:
            # the sign-flip images stay valid at higher integer order, but the
            # sphere-inverted images do not (they violate the second boundary
            # condition); compose the first-order kernel instead
            return green_iterated(ImagesKernel(domain, 1.0, constant), int(s))
        return ImagesKernel(domain, s, constant)
    if isinstance(domain, geo.ExteriorBallK):
        return ExteriorImagesKernel(domain, s, constant)
    if isinstance(domain, geo.Interval) and s == 0.5:
        return IntervalSqrtKernel(domain, c)
    if isinstance(domain, geo.HalfLine) and s == 0.5:
        return HalfLineSqrtKernel(domain, c)
    raise NotImplementedError(f"no closed-form kernel for {domain.kind!r} at s={s}")


def green_images(domain, s, x, y, constant: float | None = None):
    """Signed image-sum Green function on an orthant cone / ball / ball sector."""
    return ImagesKernel(domain, s, constant)(x, y)


def green_exterior(domain, s, x, y, constant: float | None = None):
    """Green function outside a ball sector via sphere inversion."""
    return ExteriorImagesKernel(domain, s, constant)(x, y)


def green_interval_half(domain, x, y, c: float = 1.0):
    """Order-1/2 kernels: interval or half-line, explicit log formulas."""
    if isinstance(domain, geo.Interval):
        return IntervalSqrtKernel(domain, c)(x, y)
    if isinstance(domain, geo.HalfLine):
        return HalfLineSqrtKernel(domain, c)(x, y)
    raise TypeError("domain must be an Interval or a HalfLine")


def green_iterated(base: ImagesKernel, steps: int, angular_order: int = 16,
                   radial_order: int = 12) -> GreenKernel:
    """Compose a first-order kernel with itself ``steps`` times (Navier order)."""
    if steps == 1:
        return base
    return IteratedKernel(base, steps, angular_order, radial_order)


# ---------------------------------------------------------------------------
# the nonlocal operator and its normalization constant
# ---------------------------------------------------------------------------

@dataclass
class FracLapConfig:
    """Quadrature layout for the principal-value evaluation.

    The symmetric second-difference integrand is split at ``r_split``: dyadic
    Gauss panels refine toward 0 inside, bounded-width panels (so oscillatory
    profiles stay resolved) run out to ``r_cut``, and the remainder is the
    analytic power-law tail assuming u tends to ``far_field``.  ``breakpoints``
    are radii |z| where the integrand loses smoothness (e.g. support edges of
    a truncated profile); panels are refined toward them from both sides.
    """

    r_split: float = 1.0
    inner_order: int = 12
    outer_order: int = 12
    inner_levels: int = 17
    outer_panel_width: float = 1.0
    r_cut: float = 1000.0
    far_field: float = 0.0
    breakpoints: tuple = ()
    normalization: str = ANGULAR

    def __post_init__(self):
        if self.r_split <= 0:
            raise ValueError("r_split must be positive")
        if self.inner_order < 4 or self.outer_order < 4:
            raise ValueError("quadrature orders must be >= 4")


def _radial_breaks(cfg: FracLapConfig) -> np.ndarray:
    inner = cfg.r_split * 0.5 ** np.arange(cfg.inner_levels, -1, -1.0)
    n_out = int(np.ceil((cfg.r_cut - cfg.r_split) / cfg.outer_panel_width))
    outer = cfg.r_split + (cfg.r_cut - cfg.r_split) * np.arange(1, n_out + 1) / n_out
    breaks = np.concatenate((inner, outer))
    for bp in cfg.breakpoints:
        bp = float(bp)
        if not (0.0 < bp < cfg.r_cut):
            continue
        w = max(1e-3 * bp, 1e-12)
        lo = bp - bp * 0.5 ** np.arange(1, 30)
        hi = bp + bp * 0.5 ** np.arange(1, 30)
        breaks = np.concatenate((breaks, lo[lo > 0], hi[hi < cfg.r_cut], [bp]))
    return np.unique(breaks)


def frac_laplacian(u, s: float, x, cfg: FracLapConfig | None = None) -> float:
    """Order-2s fractional Laplacian at a point, s in (0, 1).

    Uses the symmetrized principal-value form
    C(s,n)/2 * Int (2u(x) - u(x+z) - u(x-z)) / |z|^{n+2s} dz, which is
    absolutely convergent wherever u is C^2.  u may be any callable on (m, n)
    point arrays (a GridFunction works).  Supported in dimensions 1 and 2.
    """
    if not (0.0 < s < 1.0):
        raise ValueError("s must lie in (0, 1)")
    cfg = cfg or FracLapConfig()
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.size
    C = normalization_const(s, n, cfg.normalization)
    breaks = _radial_breaks(cfg)
    order = max(cfg.inner_order, cfg.outer_order)
    t, wt = gauss_panels(breaks, order)
    ux = float(np.asarray(u(x[None, :])).ravel()[0])
    tmin = breaks[0]

    def second_diff(direction: np.ndarray, radii: np.ndarray) -> np.ndarray:
        zp = x[None, :] + radii[:, None] * direction[None, :]
        zm = x[None, :] - radii[:, None] * direction[None, :]
        return 2.0 * ux - np.asarray(u(zp)).ravel() - np.asarray(u(zm)).ravel()

    def ray_integral(direction: np.ndarray) -> float:
        D = second_diff(direction, t)
        val = float(np.sum(wt * D * t ** (-1.0 - 2.0 * s)))
        # below tmin the quadratic Taylor term dominates; integrating it
        # analytically avoids amplifying float cancellation by t^{-1-2s}
        d0 = float(second_diff(direction, np.array([tmin]))[0])
        val += d0 * tmin ** (-2.0 * s) / (2.0 - 2.0 * s)
        return val

    if n == 1:
        integral = ray_integral(np.array([1.0]))
        tail = 2.0 * (ux - cfg.far_field) * cfg.r_cut ** (-2.0 * s) / (2.0 * s)
        return C * (integral + tail)
    if n == 2:
        dirs, wd = sphere_directions(2, 16)
        integral = sum(w * ray_integral(d) for d, w in zip(dirs, wd))
        tail = sphere_area(2) * 2.0 * (ux - cfg.far_field) * cfg.r_cut ** (-2.0 * s) / (2.0 * s)
        return C * 0.5 * (integral + tail)
    raise NotImplementedError("frac_laplacian supports n = 1 and n = 2")


@lru_cache(maxsize=None)
def _one_minus_cos_integral(s: float) -> float:
    """Int_0^inf (1 - cos u) / u^{1+2s} du by panel quadrature + analytic tail."""
    R = 2000.0
    # near 0 the integrand is (u^2/2 - u^4/24 + ...) u^{-1-2s}: integrate the
    # series below 2^-18, panels up to 1, then bounded-width panels to R
    eps = 2.0**-18
    val = eps ** (2.0 - 2.0 * s) / (2.0 * (2.0 - 2.0 * s)) \
        - eps ** (4.0 - 2.0 * s) / (24.0 * (4.0 - 2.0 * s))
    t, w = gauss_panels(dyadic_breaks(0.0, 1.0, 18, toward="left")[1:], 16)
    val += float(np.sum(w * (1.0 - np.cos(t)) * t ** (-1.0 - 2.0 * s)))
    m = int(R - 1.0)
    outer = 1.0 + (R - 1.0) * np.arange(m + 1) / m
    t, w = gauss_panels(outer, 16)
    val += float(np.sum(w * (1.0 - np.cos(t)) * t ** (-1.0 - 2.0 * s)))
    # tail: R^{-2s}/(2s) - int_R^inf cos(u) u^{-1-2s} du, by parts twice
    val += R ** (-2.0 * s) / (2.0 * s) + math.sin(R) * R ** (-1.0 - 2.0 * s) \
        - (1.0 + 2.0 * s) * math.cos(R) * R ** (-2.0 - 2.0 * s)
    return val


@lru_cache(maxsize=None)
def _axis_moment(n: int, s: float) -> float:
    """Int over S^{n-1} of |d_1|^{2s}; equals 2 for n = 1."""
    if n == 1:
        return 2.0
    return float(2.0 * math.pi ** ((n - 1) / 2.0) * _gamma(s + 0.5) / _gamma(s + n / 2.0))


@lru_cache(maxsize=None)
def normalization_const(s: float, n: int, convention: str = ANGULAR) -> float:
    """Normalization constant of the nonlocal operator.

    Reciprocal of Int_{R^n} (1 - cos(a z_1)) / |z|^{n+2s} dz with a = 1
    ("angular") or a = 2*pi ("paper_cycles"); the two differ by the factor
    (2 pi)^{2s}.  Computed from the defining integral, not a closed form.
    """
    if not (0.0 < s < 1.0):
        raise ValueError("s must lie in (0, 1)")
    if convention not in (ANGULAR, PAPER_CYCLES):
        raise ValueError(f"unknown convention {convention!r}")
    a = 2.0 * math.pi if convention == PAPER_CYCLES else 1.0
    return 1.0 / (_one_minus_cos_integral(float(s)) * a ** (2.0 * s) * _axis_moment(n, float(s)))


# ---------------------------------------------------------------------------
# kernel hypothesis verification
# ---------------------------------------------------------------------------

@dataclass
class HypothesisReport:
    hypothesis: str
    min_margin: float
    theta_fit: float | None
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"hypothesis": self.hypothesis,
                "min_margin": self.min_margin,
                "theta_fit": self.theta_fit,
                "pass": bool(self.passed)}


def _interior_directions(domain, m, rng, margin=0.15):
    """Unit directions strictly inside the domain's cone of directions."""
    n = domain.dim
    if isinstance(domain, geo.HalfLine):
        return np.full((m, 1), float(domain.direction))
    k = getattr(domain, "k", 0)
    out = []
    while sum(len(b) for b in out) < m:
        v = rng.standard_normal((4 * m, n))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        if k:
            frame = getattr(domain, "frame", None)
            c = v if frame is None else v @ frame
            v = v[np.all(c[:, :k] > margin, axis=1)]
        out.append(v)
    return np.concatenate(out)[:m]


def _domain_scale(domain) -> float:
    if isinstance(domain, geo.Interval):
        return 0.5 * (domain.b - domain.a)
    return float(getattr(domain, "radius", 1.0))


def _center_of(domain) -> np.ndarray:
    if isinstance(domain, geo.HalfLine):
        return np.array([domain.origin])
    if isinstance(domain, geo.Interval):
        return np.array([domain.a])
    for attr in ("vertex", "center"):
        if hasattr(domain, attr):
            return np.asarray(getattr(domain, attr), float)
    return np.zeros(domain.dim)


def _is_inner_kind(domain) -> bool:
    return isinstance(domain, (geo.Ball, geo.BallK, geo.Interval, geo.Polygon2D))


def _h3_samples(kernel, m, rng):
    """Admissible (x, y, lambda) triples for the sphere-comparison inequality."""
    dom = kernel.domain
    n = dom.dim
    P = _center_of(dom)
    scale = _domain_scale(dom)
    dirs_x = _interior_directions(dom, m, rng)
    dirs_y = _interior_directions(dom, m, rng)
    if _is_inner_kind(dom):
        # shrink variant: 0 < lambda < rho, x and y inside B_lambda with
        # admissible inversions
        rho = scale
        lam = rho * rng.uniform(0.2, 0.9, m)
        lo = lam**2 / rho
        fx = rng.uniform(0.1, 0.9, m)
        fy = rng.uniform(0.1, 0.9, m)
        rx = lo * (0.97 * lam / lo) ** fx * 1.02
        ry = lo * (0.97 * lam / lo) ** fy * 1.02
    else:
        # dilate variant: lambda > d_Omega, |x| > lambda with x^lam inside,
        # y outside B_lambda
        d0 = dom.distance_range(P)[0]
        lam = (d0 + 0.05 * scale) * (1.0 + rng.uniform(0.05, 3.0, m))
        if isinstance(dom, geo.ExteriorBallK):
            # keep both inversions inside the domain: radii in (lambda, lambda^2/R)
            R = dom.radius
            fx = rng.uniform(0.05, 0.95, m)
            fy = rng.uniform(0.05, 0.95, m)
            rx = lam * (lam / R) ** fx
            ry = lam * (lam / R) ** fy
        else:
            rx = lam * (1.0 + rng.uniform(0.05, 3.0, m))
            ry = lam * (1.0 + rng.uniform(0.05, 3.0, m))
    x = P + rx[:, None] * dirs_x
    y = P + ry[:, None] * dirs_y
    return x, y, lam, P


def _h3_margins(kernel, x, y, lam, P):
    n = kernel.dim
    rx = np.linalg.norm(x - P, axis=1)
    xs = P + (lam**2 / rx**2)[:, None] * (x - P)
    w = np.ones_like(rx) if 2 * kernel.s == n else (lam / rx) ** (n - 2 * kernel.s)
    first = kernel.eval(x, y, validate=False) - w * kernel.eval(xs, y, validate=False)
    ry = np.linalg.norm(y - P, axis=1)
    ys = P + (lam**2 / ry**2)[:, None] * (y - P)
    wy = np.ones_like(ry) if 2 * kernel.s == n else (lam / ry) ** (n - 2 * kernel.s)
    wxy = w * wy
    second = first - (wxy * kernel.eval(xs, ys, validate=False)
                      - wy * kernel.eval(x, ys, validate=False))
    return first, second


def _theta_rays(kernel, near: bool, rng, n_rays=8, n_pts=24):
    dom = kernel.domain
    P = _center_of(dom)
    scale = _domain_scale(dom)
    dirs = _interior_directions(dom, n_rays, rng, margin=0.3)
    if near:
        radii = np.geomspace(1e-5, 1e-2, n_pts) * scale
        x0 = P + 0.5 * scale * dirs[0]
    else:
        base = scale if not isinstance(dom, geo.ExteriorBallK) else 2 * scale
        radii = np.geomspace(1e2, 1e5, n_pts) * base
        x0 = P + 1.5 * base * dirs[0]
    slopes, kmin = [], np.inf
    for d in dirs:
        y = P + radii[:, None] * d[None, :]
        K = kernel.eval(np.broadcast_to(x0, y.shape), y, validate=False)
        kmin = min(kmin, float(np.min(K)))
        if np.all(K > 0):
            slopes.append(np.polyfit(np.log(radii), np.log(K), 1)[0])
    slope = float(np.mean(slopes)) if slopes else math.nan
    theta = slope if near else -slope
    return theta, kmin


def verify_hypotheses(kernel: GreenKernel, which: str, samples: int = 1000,
                      seed: int = 0, expect_theta: float | None = None,
                      theta_tol: float = 0.05,
                      margin_tol: float = -1e-12) -> HypothesisReport:
    """Numerically audit a kernel against the comparison-kernel assumptions.

    which: "H1" (two-sided bound / positivity), "H2" (far-field decay
    exponent), "H2t" (near-vertex growth exponent), "H3"/"H3t" (the sphere
    comparison inequalities; the admissible sampling ranges follow the
    domain's classification).  Exponents are least-squares slopes of
    log K along interior rays.
    """
    rng = np.random.default_rng(seed)
    dom = kernel.domain
    n = kernel.dim
    if which == "H1":
        if n == 1:
            if isinstance(dom, geo.HalfLine):
                t = dom.origin + dom.direction * 10.0 ** rng.uniform(-2, 3, (2, samples))
            elif isinstance(dom, geo.Interval):
                t = rng.uniform(dom.a, dom.b, (2, samples))
            else:
                t = rng.uniform(-1.0, 1.0, (2, samples))
            x, y = t[0][:, None], t[1][:, None]
        else:
            x, y, _, _ = _h3_samples(kernel, samples, rng)
        K = kernel.eval(x, y, validate=False)
        dist = np.linalg.norm(x - y, axis=1)
        good = dist > 1e-12
        K, dist = K[good], dist[good]
        x, y = x[good], y[good]
        if 2 * kernel.s < n:
            c2 = float(np.max(K * dist ** (n - 2 * kernel.s)))
            ok = bool(np.all(K > 0) and np.isfinite(c2))
            return HypothesisReport("H1", float(np.min(K)), None, ok,
                                    {"fitted_C2": c2})
        P = _center_of(dom)
        rx = np.linalg.norm(x - P, axis=1)
        ry = np.linalg.norm(y - P, axis=1)
        c0 = math.e
        denom = np.log(c0 * (1 + rx) * (1 + ry) / dist)
        c1 = float(np.max(K / denom))
        ok = bool(np.all(K > 0) and np.all(denom > 0) and np.isfinite(c1))
        return HypothesisReport("H1", float(np.min(K)), None, ok,
                                {"fitted_C0": c0, "fitted_C1": c1})
    if which in ("H2", "H2t"):
        near = which == "H2t" or (which == "H2" and _is_inner_kind(dom))
        theta, kmin = _theta_rays(kernel, near, rng)
        ok = kmin > 0 and math.isfinite(theta)
        if expect_theta is not None:
            ok = ok and abs(theta - expect_theta) <= theta_tol
        return HypothesisReport(which, kmin, theta, bool(ok),
                                {"expected_theta": expect_theta})
    if which in ("H3", "H3t"):
        x, y, lam, P = _h3_samples(kernel, samples, rng)
        first, second = _h3_margins(kernel, x, y, lam, P)
        mn = float(min(np.min(first), np.min(second)))
        ok = bool(np.min(first) >= margin_tol and np.min(second) >= margin_tol)
        return HypothesisReport(which, mn, None, ok,
                                {"min_first": float(np.min(first)),
                                 "min_second": float(np.min(second))})
    raise ValueError(f"unknown hypothesis {which!r}")
