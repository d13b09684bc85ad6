import json

import numpy as np
import pytest

from conekit import (
    BOTH,
    INNER_GRC,
    NEITHER,
    OUTER_GRC,
    Ball,
    BallK,
    ExteriorBallK,
    GridFunction,
    HalfLine,
    HalfSpaceK,
    Interval,
    Polygon2D,
    TruncatedCone,
    SignCap,
    classify_mss,
    cross_section,
    domain_from_json,
    kelvin_point,
    kelvin_pullback,
    signed_reflection,
)

RNG = np.random.default_rng(42)


class TestKelvinPoint:
    def test_basic_value(self):
        out = kelvin_point(np.array([2.0, 0, 0]), np.zeros(3), 1.0)
        assert np.allclose(out, [0.5, 0, 0])

    def test_fixed_point_on_sphere(self):
        out = kelvin_point(np.array([1.0, 0.0]), np.zeros(2), 1.0)
        assert np.allclose(out, [1.0, 0.0], atol=1e-15)

    def test_involution(self):
        x = np.array([0.3, -1.2, 0.7])
        P = np.array([1.0, 1.0, 1.0])
        back = kelvin_point(kelvin_point(x, P, 2.0), P, 2.0)
        assert np.max(np.abs(back - x)) < 1e-12 * np.linalg.norm(x)

    def test_radius_product_identity(self):
        for _ in range(20):
            x = RNG.standard_normal(4)
            P = RNG.standard_normal(4)
            lam = float(RNG.uniform(0.2, 3.0))
            y = kelvin_point(x, P, lam)
            prod = np.linalg.norm(y - P) * np.linalg.norm(x - P)
            assert abs(prod - lam**2) < 1e-12 * lam**2

    def test_singular_center(self):
        with pytest.raises(ValueError):
            kelvin_point(np.zeros(3), np.zeros(3), 1.0)


class TestKelvinPullback:
    def test_power_field_maps_to_constant(self):
        # |x|^{-(n-2s)} becomes the constant lam^{-(n-2s)} under the transform
        pts = RNG.standard_normal((50, 3)) * 2.0
        u = GridFunction.from_function(
            lambda q: np.linalg.norm(np.atleast_2d(q), axis=1) ** (-1.0), pts)
        ul = kelvin_pullback(u, np.zeros(3), 1.0, order_exp=1.0)
        assert np.max(np.abs(ul.values - 1.0)) < 1e-12

    def test_constant_field_value(self):
        u = GridFunction.from_function(lambda q: np.ones(np.atleast_2d(q).shape[0]),
                                       np.array([[2.0, 0.0, 0.0]]))
        ul = kelvin_pullback(u, np.zeros(3), 1.0, order_exp=1.0)
        assert abs(ul.values[0] - 0.5) < 1e-15

    def test_involution_on_grid(self):
        g = np.linspace(0.3, 2.5, 10)
        pts = np.stack(np.meshgrid(g, g, g), axis=-1).reshape(-1, 3)
        u = GridFunction.from_function(
            lambda q: np.cos(np.atleast_2d(q)[:, 0]) + np.atleast_2d(q)[:, 1] ** 2, pts)
        lam, oe = 1.7, 1.0
        ull = kelvin_pullback(kelvin_pullback(u, np.zeros(3), lam, oe), np.zeros(3), lam, oe)
        assert np.max(np.abs(ull.values - u.values)) < 1e-12 * max(1.0, u.sup_norm)


class TestSignedReflection:
    def test_single_axis(self):
        out = signed_reflection(np.array([1.0, 2.0, 3.0]), axes=[1])
        assert np.allclose(out, [1.0, -2.0, 3.0])

    def test_empty_subset_is_identity(self):
        y = RNG.standard_normal(5)
        assert np.allclose(signed_reflection(y, axes=[]), y)

    def test_involution(self):
        y = RNG.standard_normal(4)
        twice = signed_reflection(signed_reflection(y, axes=[0, 2]), axes=[0, 2])
        assert np.allclose(twice, y)

    def test_norm_preserved_about_center(self):
        y = RNG.standard_normal(3)
        P = RNG.standard_normal(3)
        out = signed_reflection(y, axes=[0, 1], center=P)
        assert abs(np.linalg.norm(out - P) - np.linalg.norm(y - P)) < 1e-12

    def test_frame_conjugation(self):
        th = 0.7
        O = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        y = np.array([1.0, 1.0])
        out = signed_reflection(y, axes=[0], frame=O)
        manual = O @ (np.diag([-1.0, 1.0]) @ (O.T @ y))
        assert np.allclose(out, manual)


class TestCrossSection:
    def test_cone_sections_scale_invariant(self):
        dom = HalfSpaceK(3, 1)
        s1 = cross_section(dom, np.zeros(3), 0.5)
        s2 = cross_section(dom, np.zeros(3), 7.0)
        assert isinstance(s1, SignCap) and isinstance(s2, SignCap)
        assert s1.includes(s2) and s2.includes(s1)

    def test_ball_full_then_empty(self):
        dom = Ball(np.zeros(3), 1.0)
        assert not cross_section(dom, np.zeros(3), 0.5).is_empty
        assert cross_section(dom, np.zeros(3), 2.0).is_empty

    def test_unit_square_quarter_arc(self):
        sq = Polygon2D([[0, 0], [1, 0], [1, 1], [0, 1]])
        cs = cross_section(sq, [0.0, 0.0], 0.5)
        (a, b), = cs.intervals
        assert abs(a - 0.0) < 1e-12 and abs(b - np.pi / 2) < 1e-12

    def test_square_interior_circle_is_full(self):
        sq = Polygon2D([[0, 0], [1, 0], [1, 1], [0, 1]])
        cs = cross_section(sq, [0.5, 0.5], 0.2)
        assert cs.total_angle() == pytest.approx(2 * np.pi)

    def test_r_must_be_positive(self):
        with pytest.raises(ValueError):
            cross_section(Ball(np.zeros(2), 1.0), np.zeros(2), -1.0)


def _segment_in_polygon(poly: Polygon2D, P, x, samples=60, tol=1e-9):
    t = np.linspace(0.0, 1.0, samples)[:, None]
    seg = np.asarray(P)[None, :] * (1 - t) + np.asarray(x)[None, :] * t
    return bool(np.all(poly.contains(seg, tol=tol)))


def _star_oracle(poly: Polygon2D, P, per_edge=12):
    """Brute-force check that [P, x] stays in the closed polygon."""
    A = poly.vertices
    B = np.roll(A, -1, axis=0)
    for a, b in zip(A, B):
        for lam in np.linspace(0.02, 0.98, per_edge):
            x = (1 - lam) * a + lam * b
            if not _segment_in_polygon(poly, P, x):
                return False
    return True


class TestClassifyMss:
    def test_ball_is_inner_about_center(self):
        c = classify_mss(Ball(np.zeros(3), 2.0), np.zeros(3), np.linspace(0.1, 3.0, 15))
        assert c.tag == INNER_GRC
        assert c.d_omega == 0.0 and c.rho_omega == pytest.approx(2.0)

    def test_exterior_ball_is_outer(self):
        c = classify_mss(ExteriorBallK(3, 0, radius=1.5), np.zeros(3),
                         np.linspace(0.2, 8.0, 25))
        assert c.tag == OUTER_GRC
        assert c.d_omega == pytest.approx(1.5)

    def test_cone_is_both(self):
        c = classify_mss(HalfSpaceK(2, 1), np.zeros(2), np.linspace(0.1, 5.0, 10))
        assert c.tag == BOTH

    def test_truncated_cone_is_neither_about_vertex(self):
        dom = TruncatedCone(np.zeros(2), SignCap(2, 1), 1.0, 3.0)
        c = classify_mss(dom, np.zeros(2), np.linspace(0.2, 4.0, 25))
        assert c.tag == NEITHER

    def test_fan_exterior_is_outer(self):
        dom = TruncatedCone(np.zeros(2), SignCap(2, 1), 1.0, None)
        c = classify_mss(dom, np.zeros(2), np.linspace(0.2, 9.0, 25))
        assert c.tag == OUTER_GRC

    def test_l_shape_inner_about_origin(self):
        L = Polygon2D([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]])
        c = classify_mss(L, [0.0, 0.0], np.linspace(0.05, 2.9, 40))
        assert c.tag == INNER_GRC
        assert _star_oracle(L, np.array([0.0, 0.0]))

    def test_interval_inner(self):
        c = classify_mss(Interval(-1.0, 3.0), np.array([0.5]), np.linspace(0.1, 4.0, 20))
        assert c.tag == INNER_GRC

    def test_half_line_both(self):
        c = classify_mss(HalfLine(0.0, 1), np.array([0.0]), np.linspace(0.1, 9.0, 20))
        assert c.tag == BOTH

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            classify_mss(Ball(np.zeros(2), 1.0), np.zeros(2), [])

    def test_polygon_agreement_with_segment_oracle(self):
        # radial polygons about the origin are star-shaped there; probing the
        # same polygons from a far-off center generally breaks it
        rng = np.random.default_rng(7)
        agree = 0
        cases = 0
        for trial in range(24):
            m = int(rng.integers(6, 14))
            ang = np.sort(rng.uniform(0, 2 * np.pi, m))
            if np.min(np.diff(ang)) < 0.05:
                continue
            rad = rng.uniform(0.5, 1.5, m)
            V = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
            try:
                poly = Polygon2D(V)
            except ValueError:
                continue
            for P in (np.zeros(2), np.array([0.9 * np.max(rad), 0.0])):
                d, rho = poly.distance_range(P)
                grid = np.linspace(max(1e-3, d * 0.5 + 1e-6), rho * 0.999, 60)
                got = classify_mss(poly, P, grid).tag == INNER_GRC
                want = poly.contains_point(P, tol=1e-12) and _star_oracle(poly, P)
                cases += 1
                agree += got == want
        assert cases >= 20
        assert agree == cases

    def test_inner_domain_monotone_inclusion(self):
        # sampled restatement of the inclusion-monotonicity characterization
        L = Polygon2D([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]])
        radii = np.linspace(0.1, 2.2, 12)
        secs = [cross_section(L, [0.0, 0.0], r) for r in radii]
        for s_small, s_big in zip(secs[1:], secs[:-1]):
            assert s_big.includes(s_small)


class TestDomainJson:
    @pytest.mark.parametrize("dom", [
        Ball([0.5, -0.25, 1.0], 2.0),
        BallK(3, 2, radius=1.5),
        ExteriorBallK(2, 1, radius=0.7),
        HalfSpaceK(3, 1, vertex=[1.0, 0.0, 0.0]),
        Polygon2D([[0, 0], [1, 0], [1, 1]]),
        Interval(-1.0, 2.0),
        HalfLine(0.5, -1),
        TruncatedCone(np.zeros(2), SignCap(2, 1), 0.5, 2.0),
    ])
    def test_roundtrip(self, dom):
        clone = domain_from_json(json.loads(json.dumps(dom.to_json())))
        assert clone.to_json() == dom.to_json()
        pts = RNG.standard_normal((40, dom.dim)) * 2.0
        assert np.array_equal(clone.contains(pts), dom.contains(pts))

    def test_frame_must_be_orthonormal(self):
        with pytest.raises(ValueError):
            HalfSpaceK(2, 1, frame=[[1.0, 0.0], [1.0, 1.0]])

    def test_polygon_orientation_enforced(self):
        with pytest.raises(ValueError):
            Polygon2D([[0, 0], [0, 1], [1, 1], [1, 0]])  # clockwise
