"""Sampled scalar fields with an interpolation rule (and optional exact closure)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

INTERP_KINDS = ("piecewise_linear_1d", "radial_cubic", "bilinear_polar")


def _as_points(pts: np.ndarray, dim: int | None = None) -> np.ndarray:
    a = np.asarray(pts, dtype=float)
    if a.ndim == 1:
        a = a[None, :] if dim is None or a.size == dim else a[:, None]
    if dim is not None and a.shape[1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got shape {a.shape}")
    return a


@dataclass
class GridFunction:
    """A scalar field u given by node samples plus an interpolation rule.

    ``nodes`` is (m, n) with ambient dimension n; ``values`` is (m,).  When
    ``func`` is supplied, evaluation bypasses interpolation and is exact --
    several identities (Kelvin involution, anti-symmetry) are only meaningful
    at exact samples.
    """

    nodes: np.ndarray
    values: np.ndarray
    interp: str = "piecewise_linear_1d"
    center: np.ndarray | None = None
    func: Callable[[np.ndarray], np.ndarray] | None = None
    _spline: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        self.values = np.asarray(self.values, dtype=float).ravel()
        if self.nodes.shape[0] != self.values.size:
            raise ValueError("nodes/values length mismatch")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")
        if self.interp not in INTERP_KINDS:
            raise ValueError(f"unknown interpolation rule {self.interp!r}")
        if self.center is not None:
            self.center = np.asarray(self.center, dtype=float)

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    @classmethod
    def from_function(cls, func, nodes, interp="piecewise_linear_1d", center=None) -> "GridFunction":
        nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
        return cls(nodes, np.asarray(func(nodes), dtype=float), interp, center, func)

    @classmethod
    def from_polar_grid(cls, radii, angles, values2d, center=(0.0, 0.0)) -> "GridFunction":
        """2-D field sampled on a regular (r, phi) product grid; bilinear rule."""
        r = np.asarray(radii, dtype=float).ravel()
        phi = np.asarray(angles, dtype=float).ravel()
        vals = np.asarray(values2d, dtype=float)
        if vals.shape != (r.size, phi.size):
            raise ValueError("values2d must have shape (len(radii), len(angles))")
        c = np.asarray(center, dtype=float)
        nodes = c + np.stack(
            [np.outer(r, np.cos(phi)).ravel(), np.outer(r, np.sin(phi)).ravel()], axis=1
        )
        gf = cls(nodes, vals.ravel(), "bilinear_polar", c)
        gf._polar = (r, phi, vals)
        return gf

    @classmethod
    def radial(cls, radii, values, center=None, dim: int = 3, func=None) -> "GridFunction":
        """Radial profile stored as nodes on the first coordinate axis."""
        r = np.asarray(radii, dtype=float).ravel()
        center = np.zeros(dim) if center is None else np.asarray(center, float)
        nodes = np.zeros((r.size, dim))
        nodes[:, 0] = r
        nodes += center
        return cls(nodes, values, "radial_cubic", center, func)

    def _radii(self) -> np.ndarray:
        c = self.center if self.center is not None else np.zeros(self.dim)
        return np.linalg.norm(self.nodes - c, axis=1)

    def _build_spline(self):
        r = self._radii()
        order = np.argsort(r)
        r, v = r[order], self.values[order]
        keep = np.concatenate(([True], np.diff(r) > 1e-14))
        r, v = r[keep], v[keep]
        if r.size < 4:
            self._spline = ("lin", r, v)
        elif r[0] < 1e-12:
            # symmetric profile: clamp the slope at the center
            self._spline = ("cub", r, CubicSpline(r, v, bc_type=((1, 0.0), "not-a-knot")))
        else:
            self._spline = ("cub", r, CubicSpline(r, v))

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = _as_points(pts, self.dim)
        if self.func is not None:
            return np.asarray(self.func(pts), dtype=float).ravel()
        if self.interp == "piecewise_linear_1d":
            if self.dim != 1:
                raise ValueError("piecewise_linear_1d requires dimension 1")
            order = np.argsort(self.nodes[:, 0])
            x = self.nodes[order, 0]
            q = pts[:, 0]
            if np.any(q < x[0] - 1e-12) or np.any(q > x[-1] + 1e-12):
                raise ValueError("evaluation outside the sampled range")
            return np.interp(q, x, self.values[order])
        if self.interp == "radial_cubic":
            if self._spline is None:
                self._build_spline()
            kind, r, s = self._spline
            c = self.center if self.center is not None else np.zeros(self.dim)
            q = np.linalg.norm(pts - c, axis=1)
            if np.any(q > r[-1] * (1 + 1e-9) + 1e-30):
                raise ValueError("evaluation outside the sampled radius range")
            q = np.minimum(q, r[-1])
            return np.interp(q, r, s) if kind == "lin" else s(q)
        if self.interp == "bilinear_polar":
            r, phi, vals = self._polar
            rel = pts - self.center
            q = np.linalg.norm(rel, axis=1)
            a = np.mod(np.arctan2(rel[:, 1], rel[:, 0]) - phi[0], 2 * np.pi) + phi[0]
            if np.any(q < r[0] - 1e-12) or np.any(q > r[-1] + 1e-12):
                raise ValueError("evaluation outside the sampled radius range")
            q = np.clip(q, r[0], r[-1])
            # periodic wrap in angle
            phi_ext = np.concatenate([phi, [phi[0] + 2 * np.pi]])
            vals_ext = np.concatenate([vals, vals[:, :1]], axis=1)
            i = np.clip(np.searchsorted(r, q) - 1, 0, r.size - 2)
            j = np.clip(np.searchsorted(phi_ext, a) - 1, 0, phi_ext.size - 2)
            tr = (q - r[i]) / np.maximum(r[i + 1] - r[i], 1e-300)
            ta = (a - phi_ext[j]) / np.maximum(phi_ext[j + 1] - phi_ext[j], 1e-300)
            return (
                vals_ext[i, j] * (1 - tr) * (1 - ta)
                + vals_ext[i + 1, j] * tr * (1 - ta)
                + vals_ext[i, j + 1] * (1 - tr) * ta
                + vals_ext[i + 1, j + 1] * tr * ta
            )
        raise NotImplementedError(f"evaluation for {self.interp!r}")

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.nodes.copy(), np.asarray(values, float), self.interp, self.center, None)
