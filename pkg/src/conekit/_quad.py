"""Shared quadrature helpers: Gauss-Legendre panels and sphere direction grids."""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss


def gauss_panel(a: float, b: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on the interval [a, b]."""
    x, w = leggauss(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def gauss_panels(breaks: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule on consecutive panels given by sorted breakpoints."""
    breaks = np.asarray(breaks, dtype=float)
    a = breaks[:-1]
    b = breaks[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    x, w = leggauss(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    wts = half[:, None] * w[None, :]
    return nodes.ravel(), wts.ravel()


def dyadic_breaks(a: float, b: float, levels: int, toward: str = "left") -> np.ndarray:
    """Panel breakpoints on [a, b] refined geometrically toward one endpoint."""
    t = 0.5 ** np.arange(levels, 0, -1)
    if toward == "left":
        pts = a + (b - a) * np.concatenate(([0.0], t, [1.0]))
    else:
        pts = b - (b - a) * np.concatenate(([0.0], t, [1.0]))[::-1]
    return np.unique(pts)


def sphere_directions(n: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Product quadrature for the unit sphere S^{n-1}: directions and weights.

    Weights sum to the sphere area.  n = 1 returns the two points +-1;
    n = 2 uses a periodic trapezoid in angle; n = 3 uses Gauss-Legendre in
    cos(theta) times a trapezoid in phi; n = 4 adds a Gauss rule in the
    first polar angle with its sin^2 weight.
    """
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if n == 2:
        m = max(4, 4 * order)
        phi = 2.0 * np.pi * np.arange(m) / m
        d = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        return d, np.full(m, 2.0 * np.pi / m)
    if n == 3:
        u, wu = leggauss(order)          # u = cos(theta)
        m = 2 * order
        phi = 2.0 * np.pi * np.arange(m) / m
        wphi = 2.0 * np.pi / m
        su = np.sqrt(np.maximum(0.0, 1.0 - u**2))
        d = np.stack(
            [
                np.outer(su, np.cos(phi)).ravel(),
                np.outer(su, np.sin(phi)).ravel(),
                np.repeat(u, m),
            ],
            axis=1,
        )
        w = np.repeat(wu, m) * wphi
        return d, w
    if n == 4:
        t1, wt1 = gauss_panel(0.0, np.pi, order)   # weight sin^2(t1)
        u, wu = leggauss(order)                     # u = cos(t2)
        m = 2 * order
        phi = 2.0 * np.pi * np.arange(m) / m
        wphi = 2.0 * np.pi / m
        su = np.sqrt(np.maximum(0.0, 1.0 - u**2))
        # direction = (cos t1, sin t1 * (cos t2, sin t2 cos phi, sin t2 sin phi))
        ct1, st1 = np.cos(t1), np.sin(t1)
        D = np.empty((t1.size, u.size, m, 4))
        D[..., 0] = ct1[:, None, None]
        D[..., 1] = st1[:, None, None] * u[None, :, None]
        D[..., 2] = st1[:, None, None] * su[None, :, None] * np.cos(phi)[None, None, :]
        D[..., 3] = st1[:, None, None] * su[None, :, None] * np.sin(phi)[None, None, :]
        W = (wt1 * st1**2)[:, None, None] * wu[None, :, None] * np.full(m, wphi)[None, None, :]
        return D.reshape(-1, 4), W.ravel()
    raise NotImplementedError(f"sphere_directions: n={n} not supported")


def reference_directions(n: int, count: int = 2048) -> np.ndarray:
    """Deterministic quasi-uniform direction set used for set-inclusion tests."""
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        phi = 2.0 * np.pi * (np.arange(count) + 0.5) / count
        return np.stack([np.cos(phi), np.sin(phi)], axis=1)
    rng = np.random.default_rng(20480 + n)
    v = rng.standard_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
