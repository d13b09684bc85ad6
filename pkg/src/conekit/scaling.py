"""Sphere-comparison engine: critical exponents, exponent bootstrap, comparisons.

The comparison field is w_lam = u_lam - u, where u_lam is the weighted
inversion of u about the sphere of radius lam.  Dilating (outer-convex
domains) requires w_lam >= 0 inside the sphere; shrinking (bounded
star-shaped domains) requires w_lam <= 0 on the inverted exterior.  The
bootstrap is the affine exponent recurrence mu <- p*mu +/- (2s + a) whose
escape direction classifies sub/critical/supercritical growth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Domain, as_point, kelvin_pullback
from .grids import GridFunction

DILATE_OUTWARD = "dilate_outward"          # mu <- p*mu + (2s + a)
DILATE_FUNDAMENTAL = "dilate_fundamental"  # mu <- p*mu - (2s + a)
SHRINK_INWARD = "shrink_inward"            # mu <- p*mu + (2s + a)

DIVERGES_PLUS = "diverges_plus"
DIVERGES_MINUS = "diverges_minus"
FIXED_POINT = "fixed_point"
CONVERGES = "converges"

_PLUS_DIRECTIONS = (DILATE_OUTWARD, SHRINK_INWARD)
_ALL_DIRECTIONS = (DILATE_OUTWARD, DILATE_FUNDAMENTAL, SHRINK_INWARD)


@dataclass(frozen=True)
class ExponentParams:
    """Problem exponents (n, s, a, p) for the |x - P|^a u^p nonlinearity."""

    n: int
    s: float
    a: float
    p: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not (0.0 < self.s <= self.n / 2.0):
            raise ValueError("need 0 < s <= n/2")
        critical_order = (2.0 * self.s == self.n)
        lo = -self.n if critical_order else -2.0 * self.s
        if self.a <= lo:
            raise ValueError(f"need a > {lo} for this order")
        if self.p < 1.0:
            raise ValueError("p must be >= 1")


def p_critical(n: int, s: float, a: float) -> float:
    """Threshold exponent (n + 2s + 2a)/(n - 2s); +inf at critical order."""
    ExponentParams(n, s, a, 1.0)
    if 2.0 * s == n:
        return math.inf
    return (n + 2.0 * s + 2.0 * a) / (n - 2.0 * s)


@dataclass
class BootstrapRun:
    mu0: float
    direction: str
    sequence: np.ndarray
    verdict: str

    def to_json(self) -> dict:
        return {"mu0": self.mu0, "direction": self.direction,
                "verdict": self.verdict, "sequence": self.sequence.tolist()}


def bootstrap(params: ExponentParams, mu0: float, direction: str, K: int) -> BootstrapRun:
    """Run the exact affine exponent recurrence for K steps and classify it.

    With the "+" sign the fixed point is mu* = -(2s+a)/(p-1); iterates move
    away from it geometrically (ratio p), so the verdict is the sign of
    mu0 - mu* (a fixed point when they coincide).  p = 1 steps by a constant.
    """
    if direction not in _ALL_DIRECTIONS:
        raise ValueError(f"unknown direction {direction!r}")
    if K < 1:
        raise ValueError("K must be >= 1")
    step = 2.0 * params.s + params.a
    sign = 1.0 if direction in _PLUS_DIRECTIONS else -1.0
    seq = np.empty(K + 1)
    seq[0] = mu = float(mu0)
    for k in range(1, K + 1):
        mu = params.p * mu + sign * step
        seq[k] = mu
    if params.p == 1.0:
        verdict = DIVERGES_PLUS if sign * step > 0 else DIVERGES_MINUS
    else:
        mu_star = -sign * step / (params.p - 1.0)
        if mu0 == mu_star:
            verdict = FIXED_POINT
        else:
            verdict = DIVERGES_PLUS if mu0 > mu_star else DIVERGES_MINUS
    return BootstrapRun(float(mu0), direction, seq, verdict)


INSIDE = "inside"
OUTSIDE = "outside"


def omega_lambda(u: GridFunction, center, lam: float, s: float,
                 side: str = INSIDE, domain: Domain | None = None) -> GridFunction:
    """Comparison field w_lam = u_lam - u on the side-appropriate sample set.

    "inside": nodes of u inside the sphere of radius lam (dilate mode);
    "outside": nodes whose inversion lies outside it (shrink mode).  The order
    exponent is n - 2s, or 0 at critical order, where the transform is plain
    composition with the inversion.
    """
    P = as_point(center, u.dim)
    order_exp = u.dim - 2.0 * s
    if order_exp < 0:
        raise ValueError("need 2s <= n")
    r = np.linalg.norm(u.nodes - P, axis=1)
    if side == INSIDE:
        keep = (r > 0) & (r < lam)
    elif side == OUTSIDE:
        keep = (r > 0) & (r < lam)  # inverted exterior lies inside the sphere
        if domain is not None:
            refl = P + (lam**2 / r[keep] ** 2)[:, None] * (u.nodes[keep] - P)
            sub = np.zeros(r.size, dtype=bool)
            sub[np.flatnonzero(keep)[domain.contains(refl, tol=1e-12)]] = True
            keep = sub
    else:
        raise ValueError("side must be 'inside' or 'outside'")
    nodes = u.nodes[keep]
    if nodes.size == 0:
        return GridFunction(np.empty((0, u.dim)), np.empty(0), u.interp, u.center)
    ulam = kelvin_pullback(u, P, lam, order_exp, nodes=nodes)
    vals = ulam.values - u(nodes)
    func = None
    if u.func is not None:
        def func(pts, _ul=ulam, _u=u):
            return _ul.func(pts) - _u(pts)
    return GridFunction(nodes, vals, u.interp, u.center, func)


@dataclass
class Lambda0Result:
    lambda0: float
    exhausted: bool                      # comparison never failed on the grid
    none_passed: bool                    # comparison failed already at the first radius
    first_failure: float | None          # first grid radius where it failed
    min_margin_at_failure: float | None
    grid: np.ndarray
    min_margins: np.ndarray

    def to_json(self) -> dict:
        return {"lambda0": self.lambda0,
                "exhausted": bool(self.exhausted),
                "none_passed": bool(self.none_passed),
                "first_failure": self.first_failure,
                "min_margin_at_failure": self.min_margin_at_failure,
                "grid": self.grid.tolist()}


def find_lambda0(u: GridFunction, center, s: float, direction: str,
                 lam_grid, domain: Domain | None = None,
                 tol: float | None = None) -> Lambda0Result:
    """Grid-resolved critical comparison radius.

    Dilate: the largest grid radius lam such that min w_mu >= -tol over the
    node samples for every grid mu <= lam.  Shrink: scans downward requiring
    w_mu <= tol, returning the smallest passing radius.  Node-sampled: radii
    whose comparison region contains no nodes pass vacuously.
    """
    if direction not in ("dilate", "shrink"):
        raise ValueError("direction must be 'dilate' or 'shrink'")
    P = as_point(center, u.dim)
    grid = np.asarray(lam_grid, dtype=float).ravel()
    if grid.size == 0 or np.any(np.diff(grid) <= 0) or np.any(grid <= 0):
        raise ValueError("lam_grid must be positive, sorted, strictly increasing")
    tol = 1e-10 * u.sup_norm if tol is None else float(tol)
    order = grid if direction == "dilate" else grid[::-1]
    side = INSIDE if direction == "dilate" else OUTSIDE
    margins = []
    last_ok = None
    first_failure = None
    failure_margin = None
    for lam in order:
        w = omega_lambda(u, P, lam, s, side=side, domain=domain)
        if w.values.size == 0:
            m = math.inf
        else:
            m = float(np.min(w.values)) if direction == "dilate" else float(-np.max(w.values))
        margins.append(m)
        if m >= -tol:
            last_ok = lam
        else:
            first_failure = float(lam)
            failure_margin = m
            break
    none_passed = last_ok is None
    lam0 = float(order[0]) if none_passed else float(last_ok)
    margins = np.array(margins)
    if direction == "shrink":
        margins = margins[::-1]
    return Lambda0Result(lam0, first_failure is None and not none_passed,
                         none_passed, first_failure, failure_margin, grid, margins)
