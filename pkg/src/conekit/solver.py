"""Integral-operator machinery: singular quadrature, fixed points, barriers.

The positive-solution construction iterates u <- K(u) with
K(u)(x) = Int G(x,y) (|y-P|^a u(y)^p + t) dy.  For the homogeneous case
(t = 0, p > 1) the nontrivial fixed point repels plain damped iteration
(the linearization has eigenvalue p along the solution itself), so a
sup-norm-projected variant is provided that quotients out exactly that
direction; the damped form is kept for inhomogeneous problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from ._quad import dyadic_breaks, gauss_panel, gauss_panels, sphere_directions
from .grids import GridFunction
from .kernels import GreenKernel, fundamental_constant
from scipy.special import gamma as _gamma


@dataclass(frozen=True)
class PowerNonlinearity:
    """f(y, u) = |y - P|^a u^p + t."""

    a: float = 0.0
    p: float = 2.0
    t: float = 0.0
    center: tuple = ()

    def __call__(self, y: np.ndarray, u: np.ndarray) -> np.ndarray:
        u = np.maximum(u, 0.0)
        out = u**self.p
        if self.a != 0.0:
            P = np.zeros(y.shape[1]) if not self.center else np.asarray(self.center, float)
            out = out * np.linalg.norm(y - P, axis=1) ** self.a
        return out + self.t


@dataclass
class SolverConfig:
    max_iters: int = 500
    damping: float = 1.0
    residual_tol: float = 1e-8
    divergence_norm: float = 1e12

    def __post_init__(self):
        if not (0.0 < self.damping <= 1.0):
            raise ValueError("damping must lie in (0, 1]")
        if self.residual_tol <= 0:
            raise ValueError("residual_tol must be positive")


# ---------------------------------------------------------------------------
# quadrature rules
# ---------------------------------------------------------------------------

class QuadRule:
    """Nodes/weights over a bounded domain, with evaluation-point refinement."""

    def __init__(self, domain: geo.Domain, order: int):
        self.domain, self.order = domain, order
        self.nodes, self.weights = self._plain()
        self._singular_cache: dict = {}

    def singular_cached(self, x0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        key = np.asarray(x0, float).tobytes()
        hit = self._singular_cache.get(key)
        if hit is None:
            hit = self._singular_cache[key] = self.singular(x0)
        return hit

    # -- plain product rule --------------------------------------------------
    def _plain(self):
        d = self.domain
        if isinstance(d, geo.Interval):
            return self._interval_rule(d.a, d.b)
        if isinstance(d, geo.Ball):
            d = geo.BallK(d.dim, 0, d.center, d.radius)
        if isinstance(d, geo.BallK):
            return self._sector_rule(d)
        raise NotImplementedError(f"no quadrature for domain kind {self.domain.kind!r}")

    def _interval_rule(self, a, b):
        x, w = gauss_panel(a, b, self.order)
        return x[:, None], w

    def _sector_dirs(self, d: geo.BallK):
        dirs, wd = sphere_directions(d.dim, self.order)
        if d.k:
            coords = dirs if d.frame is None else dirs @ d.frame
            keep = np.all(coords[:, : d.k] > 0, axis=1)
            dirs, wd = dirs[keep], wd[keep]
            # renormalize to the exact sector measure (product rule nodes
            # avoid the cut planes, but their weights tile the full sphere)
            wd = wd * (self._sector_area(d) / np.sum(wd))
        return dirs, wd

    @staticmethod
    def _sector_area(d: geo.BallK) -> float:
        return 2.0 * math.pi ** (d.dim / 2.0) / _gamma(d.dim / 2.0) / 2.0**d.k

    def _sector_rule(self, d: geo.BallK):
        dirs, wd = self._sector_dirs(d)
        r, wr = gauss_panel(0.0, d.radius, self.order)
        nodes = d.vertex[None, None, :] + r[:, None, None] * dirs[None, :, :]
        wts = (wr * r ** (d.dim - 1))[:, None] * wd[None, :]
        return nodes.reshape(-1, d.dim), wts.ravel()

    # -- rule refined around a singular evaluation point ----------------------
    def singular(self, x0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = self.domain
        x0 = np.asarray(x0, dtype=float).ravel()
        if isinstance(d, geo.Interval):
            lo = dyadic_breaks(d.a, float(x0[0]), 42, toward="right")
            hi = dyadic_breaks(float(x0[0]), d.b, 42, toward="left")
            t, w = gauss_panels(np.unique(np.concatenate([lo, hi])), self.order)
            return t[:, None], w
        if isinstance(d, geo.Ball):
            d = geo.BallK(d.dim, 0, d.center, d.radius)
        if isinstance(d, geo.BallK):
            return self._sector_singular(d, x0)
        raise NotImplementedError(f"no singular rule for {self.domain.kind!r}")

    def _sector_singular(self, d: geo.BallK, x0: np.ndarray):
        dirs, wd = self._sector_dirs(d)
        xc = (x0 - d.vertex) if d.frame is None else (x0 - d.vertex) @ d.frame
        dc = dirs if d.frame is None else dirs @ d.frame
        R = d.radius
        b = dc @ xc
        t_exit = -b + np.sqrt(np.maximum(b * b + R * R - xc @ xc, 0.0))
        for i in range(d.k):
            with np.errstate(divide="ignore"):
                ti = np.where(dc[:, i] < 0, -xc[i] / np.minimum(dc[:, i], -1e-300), np.inf)
            t_exit = np.minimum(t_exit, ti)
        keep = t_exit > 1e-13 * R  # sub-scale rays contribute O(t^2)
        dirs, wd, t_exit = dirs[keep], wd[keep], t_exit[keep]
        if dirs.shape[0] == 0:
            return np.empty((0, d.dim)), np.empty(0)
        tq, wq = gauss_panel(0.0, 1.0, self.order)
        # geometric layers toward the evaluation point
        fracs = np.array([0.0, 0.125, 0.5, 1.0])
        a = t_exit[:, None] * fracs[:-1]            # (m, 3)
        bb = t_exit[:, None] * fracs[1:]
        t = a[..., None] + (bb - a)[..., None] * tq  # (m, 3, q)
        w = (bb - a)[..., None] * wq * wd[:, None, None] * t ** (d.dim - 1)
        nodes = x0[None, None, None, :] + t[..., None] * dirs[:, None, None, :]
        return nodes.reshape(-1, d.dim), w.ravel()

    def integrate(self, f) -> float:
        return float(np.sum(self.weights * f(self.nodes)))

    def integrate_singular(self, f, x0) -> float:
        nodes, wts = self.singular(x0)
        return float(np.sum(wts * f(nodes)))


def quadrature_for(domain: geo.Domain, order: int) -> QuadRule:
    """Product quadrature over a bounded domain (interval, ball, ball sector)."""
    if isinstance(domain, (geo.FreeSpace, geo.HalfSpaceK, geo.ExteriorBallK, geo.HalfLine)):
        raise ValueError("unbounded domain: truncate before building a rule")
    return QuadRule(domain, order)


# ---------------------------------------------------------------------------
# the integral operator and its fixed points
# ---------------------------------------------------------------------------

def apply_K(kernel: GreenKernel, u: GridFunction, nonlin: PowerNonlinearity,
            rule: QuadRule) -> GridFunction:
    """K(u)(x) = Int G(x, y) f(y, u(y)) dy at every node of u."""
    if np.any(u.values < 0):
        raise ValueError("apply_K requires a nonnegative field")
    out = np.empty(u.values.size)
    for i, x in enumerate(u.nodes):
        nodes, wts = rule.singular_cached(x)
        if nodes.shape[0] == 0:
            out[i] = 0.0
            continue
        g = kernel.eval(np.broadcast_to(x, nodes.shape), nodes, validate=False)
        out[i] = np.sum(wts * g * nonlin(nodes, u(nodes)))
    return u.with_values(out)


@dataclass
class PicardResult:
    solution: GridFunction
    residuals: list
    iterations: int
    converged: bool
    diverged: bool
    scheme: str

    def report(self, extra: dict | None = None) -> dict:
        rep = {"residual": self.residuals[-1] if self.residuals else None,
               "sup_norm": self.solution.sup_norm,
               "iters": self.iterations,
               "converged": bool(self.converged),
               "diverged": bool(self.diverged),
               "scheme": self.scheme}
        if extra:
            rep.update(extra)
        return rep


def picard_solve(kernel: GreenKernel, nonlin: PowerNonlinearity, cfg: SolverConfig,
                 initial: GridFunction, rule: QuadRule | None = None,
                 scheme: str = "auto") -> PicardResult:
    """Iterate toward a fixed point u = K(u).

    scheme "damped": u <- (1-theta) u + theta K(u) (monotone for supersolution
    starts; the nontrivial branch of the homogeneous problem repels it).
    scheme "normalized": iterate the sup-normalized map v <- K(v)/|K(v)| and
    rescale by homogeneity at the end (requires t = 0, p > 1); this is the
    scheme that actually reaches the positive branch.  "auto" picks
    "normalized" exactly in that case.
    """
    if np.any(initial.values < 0):
        raise ValueError("initial iterate must be nonnegative")
    rule = rule or quadrature_for(kernel.domain, 24)
    if scheme == "auto":
        scheme = "normalized" if (nonlin.t == 0.0 and nonlin.p > 1.0) else "damped"
    theta = cfg.damping
    residuals: list[float] = []

    if scheme == "damped":
        u = initial
        for it in range(1, cfg.max_iters + 1):
            Ku = apply_K(kernel, u, nonlin, rule)
            res = float(np.max(np.abs(u.values - Ku.values)))
            residuals.append(res)
            u = u.with_values(np.maximum((1.0 - theta) * u.values + theta * Ku.values, 0.0))
            if u.sup_norm > cfg.divergence_norm:
                return PicardResult(u, residuals, it, False, True, scheme)
            if res <= cfg.residual_tol:
                return PicardResult(u, residuals, it, True, False, scheme)
        return PicardResult(u, residuals, cfg.max_iters, False, False, scheme)

    if scheme != "normalized":
        raise ValueError(f"unknown scheme {scheme!r}")
    if nonlin.t != 0.0 or nonlin.p <= 1.0:
        raise ValueError("normalized scheme requires t = 0 and p > 1")
    v = initial.with_values(initial.values / max(initial.sup_norm, 1e-300))
    for it in range(1, cfg.max_iters + 1):
        Kv = apply_K(kernel, v, nonlin, rule)
        nv = Kv.sup_norm
        if not np.isfinite(nv) or nv <= 0:
            return PicardResult(v, residuals, it, False, True, scheme)
        scale = nv ** (1.0 / (1.0 - nonlin.p))
        res = scale * float(np.max(np.abs(v.values - Kv.values / nv)))
        residuals.append(res)
        v = v.with_values(np.maximum((1.0 - theta) * v.values + theta * Kv.values / nv, 0.0))
        if res <= cfg.residual_tol:
            u = v.with_values(scale * v.values)
            return PicardResult(u, residuals, it, True, False, scheme)
    u = v.with_values(scale * v.values)
    return PicardResult(u, residuals, cfg.max_iters, False, False, scheme)


# ---------------------------------------------------------------------------
# barrier, norm lower bound, shooting oracle
# ---------------------------------------------------------------------------

def barrier_constant(n: int, s: float) -> float:
    """Constant making the truncated paraboloid a unit right-hand side.

    Gamma(n/2) / (4^s Gamma(s+1) Gamma(n/2+s)) under the angular operator
    normalization; equals 1/(2n) at s = 1.
    """
    return float(_gamma(n / 2.0) / (4.0**s * _gamma(s + 1.0) * _gamma(n / 2.0 + s)))


def barrier_zeta(s: float, n: int, x0, d: float, x, C_ns: float | None = None):
    """Supersolution bump C (diam)^{2s} (1 - |x-x0|^2/diam^2)_+^s."""
    if d <= 0:
        raise ValueError("diameter must be positive")
    C = barrier_constant(n, s) if C_ns is None else float(C_ns)
    x0 = np.asarray(x0, dtype=float).ravel()
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    r2 = np.sum((pts - x0) ** 2, axis=1)
    vals = C * d ** (2.0 * s) * np.maximum(1.0 - r2 / d**2, 0.0) ** s
    return float(vals[0]) if np.ndim(x) == 1 else vals


def lower_bound_rho(n: int, s: float, p: float, diam: float,
                    C_ns: float | None = None) -> float:
    """A-priori sup-norm floor (C^{1/2s} diam)^{-2s/(p-1)} for positive fixed points."""
    if p <= 1.0:
        raise ValueError("p must exceed 1")
    if diam <= 0:
        raise ValueError("diam must be positive")
    C = barrier_constant(n, s) if C_ns is None else float(C_ns)
    return float((C ** (1.0 / (2.0 * s)) * diam) ** (-2.0 * s / (p - 1.0)))


def calibrate_barrier_constant(s: float, n: int, probes=(0.0, 0.3, -0.3),
                               normalization: str = "angular") -> dict:
    """Fit the barrier constant from the constancy of the nonlocal operator.

    Evaluates the fractional Laplacian of (1 - |x|^2)_+^s at interior probes;
    the fitted constant is 1/mean(values), reported with its spread.  Cross-
    checks the closed form used by ``barrier_constant``.
    """
    from .kernels import FracLapConfig, frac_laplacian

    if n != 1:
        raise NotImplementedError("calibration probes are 1-D")

    def profile(pts):
        return np.maximum(1.0 - pts[:, 0] ** 2, 0.0) ** s

    vals = []
    for x in probes:
        cfg = FracLapConfig(r_split=0.25, r_cut=8.0, far_field=0.0,
                            breakpoints=(abs(1.0 - x), abs(1.0 + x)),
                            normalization=normalization)
        vals.append(frac_laplacian(profile, s, np.array([x]), cfg))
    vals = np.asarray(vals)
    mean = float(np.mean(vals))
    return {"fitted_constant": 1.0 / mean,
            "closed_form": barrier_constant(n, s),
            "relative_spread": float((np.max(vals) - np.min(vals)) / abs(mean)),
            "values": vals.tolist()}


@dataclass
class ShootingResult:
    profile: GridFunction
    center_value: float
    boundary_value: float
    radius: float

    @property
    def sup_norm(self) -> float:
        return float(np.max(self.profile.values))


def _integrate_radial(alpha: float, n: int, p: float, t: float, R: float,
                      steps: int) -> tuple[np.ndarray, np.ndarray]:
    """RK4 for -u'' - (n-1)/r u' = u^p + t from the regular center."""
    h = R / steps
    r = np.linspace(0.0, R, steps + 1)
    u = np.empty(steps + 1)
    v = np.empty(steps + 1)  # u'

    def f(u_):
        return max(u_, 0.0) ** p + t

    # series start: u = a - f(a) r^2 / (2n)
    u[0], v[0] = alpha, 0.0
    u[1] = alpha - f(alpha) * h * h / (2.0 * n)
    v[1] = -f(alpha) * h / n

    def rhs(r_, y):
        u_, v_ = y
        return np.array([v_, -(n - 1.0) / r_ * v_ - f(u_)])

    y = np.array([u[1], v[1]])
    for i in range(1, steps):
        r_ = r[i]
        k1 = rhs(r_, y)
        k2 = rhs(r_ + h / 2, y + h / 2 * k1)
        k3 = rhs(r_ + h / 2, y + h / 2 * k2)
        k4 = rhs(r_ + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        u[i + 1], v[i + 1] = y
    return r, u


def radial_shooting_oracle(n: int, p: float, radius: float = 1.0, s: float = 1.0,
                           t: float = 0.0, steps: int = 2000,
                           bracket: tuple[float, float] = (1e-2, 1e4),
                           tol: float = 1e-10) -> ShootingResult:
    """Independent two-point solver for the radial Dirichlet problem (s = 1).

    Bisects on the center value until the profile's first zero lands on the
    boundary.  Only the second-order radial problem is supported; p = 1 is
    rejected (linear eigenvalue problem, no isolated positive solution).
    """
    if s != 1.0:
        raise ValueError("shooting oracle is limited to s = 1")
    if p <= 1.0:
        raise ValueError("p must exceed 1 (p = 1 is an eigenvalue problem)")

    def end_value(alpha):
        return _integrate_radial(alpha, n, p, t, radius, steps)[1][-1]

    lo, hi = bracket
    flo = end_value(lo)
    if flo <= 0:
        raise ValueError("bracket left end already overshoots")
    fhi = end_value(hi)
    grow = 0
    while fhi > 0 and grow < 60:
        hi *= 2.0
        fhi = end_value(hi)
        grow += 1
    if fhi > 0:
        raise ValueError("no sign change found in the bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = end_value(mid)
        if abs(fm) < tol:
            lo = hi = mid
            break
        if fm > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16 * hi:
            break
    alpha = 0.5 * (lo + hi)
    r, u = _integrate_radial(alpha, n, p, t, radius, steps)
    profile = GridFunction.radial(r, np.maximum(u, 0.0), dim=n)
    return ShootingResult(profile, alpha, float(u[-1]), radius)


def torsion_profile(domain: geo.Ball, radii: np.ndarray) -> GridFunction:
    """Exact solution of the unit-source Dirichlet problem on a ball."""
    n = domain.dim
    R = domain.radius
    vals = (R**2 - radii**2) / (2.0 * n)
    return GridFunction.radial(radii, vals, center=domain.center, dim=n)
