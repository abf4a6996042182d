import numpy as np
import pytest

from evpoly.core import GeometryError, Polygon3, det3
from evpoly.constructions import ExampleSpiral, GridScheme, sample_curve
from evpoly.equal_volume import centroaffine_volumes
from evpoly.projective import (
    SPIRAL_SMOOTH_LENGTH,
    InflectionError,
    LiftNormalization,
    PlanarProjectivePolygon,
    b_sequence,
    default_normalization,
    lift_representative,
    projective_lengths,
    signed_cbrt,
    smooth_reference_length,
    spiral_analytic_normalization,
    table1_experiment,
)

SQUARE = np.array([[1, 1], [-1, 1], [-1, -1], [1, -1]], float)


def spiral_poly(n):
    pts = sample_curve(ExampleSpiral(), 0.0, 2 * np.pi, n,
                       GridScheme.HALF_OPEN_STEP)
    return PlanarProjectivePolygon.from_vertices(pts)


class TestSignedCbrt:
    def test_values(self):
        assert signed_cbrt(8.0) == pytest.approx(2.0)
        assert signed_cbrt(-8.0) == pytest.approx(-2.0)
        assert signed_cbrt(0.0) == 0.0

    def test_odd(self, rng):
        x = rng.normal(size=20)
        np.testing.assert_allclose(signed_cbrt(-x), -signed_cbrt(x))


class TestBSequence:
    def test_square(self):
        b = b_sequence(PlanarProjectivePolygon.from_vertices(SQUARE, closed=True).vertices)
        np.testing.assert_allclose(b.values, 4.0)

    def test_collinear_raises_with_index(self):
        pts = np.array([[0, 0], [1, 0], [2, 0], [3, 1]], float)
        with pytest.raises(InflectionError) as exc:
            b_sequence(pts)
        assert exc.value.index == 1

    def test_spiral_all_positive(self):
        poly = spiral_poly(100)
        assert np.all(poly.b.values > 0)


class TestLift:
    def test_square_in_unit_plane_unit_scales(self):
        poly = PlanarProjectivePolygon.from_vertices(SQUARE)
        phi = lift_representative(poly, LiftNormalization(1.0, 1.0, 4.0))
        np.testing.assert_allclose(np.linalg.norm(phi.points, axis=1),
                                   np.sqrt(3.0), rtol=1e-12)

    def test_constant_volume_exact(self, rng):
        poly = spiral_poly(200)
        norm = default_normalization(poly)
        phi = lift_representative(poly, norm)
        rep = centroaffine_volumes(phi)
        # the recursion enforces every triple volume; only roundoff is left
        assert rep.spread <= 1e-11

    def test_c_homogeneity(self):
        poly = spiral_poly(50)
        n0 = spiral_analytic_normalization(0.0, 2 * np.pi / 50)
        k = 1.7
        n1 = LiftNormalization(k * n0.a1, k * n0.a2, k ** 3 * n0.c)
        phi0 = lift_representative(poly, n0)
        phi1 = lift_representative(poly, n1)
        np.testing.assert_allclose(phi1.points, k * phi0.points, rtol=1e-10)

    def test_analytic_seeds_track_analytic_scales(self):
        n = 200
        h = 2 * np.pi / n
        poly = spiral_poly(n)
        phi = lift_representative(poly, spiral_analytic_normalization(0.0, h))
        t = h * np.arange(n)
        a_true = 2.0 ** (-1.0 / 3.0) * np.exp(2.0 * t / 3.0)
        a_got = phi.points[:, 2]
        assert np.max(np.abs(a_got / a_true - 1.0)) < 5 * h

    def test_closed_polygon_rejected(self):
        poly = PlanarProjectivePolygon.from_vertices(SQUARE, closed=True)
        with pytest.raises(GeometryError):
            lift_representative(poly, LiftNormalization(1.0, 1.0, 4.0))


class TestProjectiveLengths:
    def test_table1_values(self):
        rows = {n: (p1, p2) for n, _, p1, p2 in table1_experiment([10, 100, 1000])}
        assert rows[10][0] == pytest.approx(4.26627, abs=1e-5)
        assert rows[10][1] == pytest.approx(3.55522, abs=1e-5)
        assert rows[100][0] == pytest.approx(6.87572, abs=1e-5)
        assert rows[100][1] == pytest.approx(6.80410, abs=1e-5)
        assert rows[1000][0] == pytest.approx(7.13407, abs=1e-5)
        assert rows[1000][1] == pytest.approx(7.12691, abs=1e-5)

    def test_estimators_differ_but_converge_together(self):
        rows = table1_experiment([10, 100, 1000])
        gaps = [abs(p1 - p2) for _, _, p1, p2 in rows]
        assert gaps[0] > 1e-3
        assert gaps[0] > gaps[1] > gaps[2]

    def test_summation_window(self):
        n = 12
        poly = spiral_poly(n)
        phi = lift_representative(poly, spiral_analytic_normalization(0.0, 2 * np.pi / n))
        rep = projective_lengths(phi)
        assert rep.summation_range == (2, n - 3)
        assert len(rep.per_side_terms2) == n - 5
        assert rep.pl1 == pytest.approx(float(rep.per_side_terms1.values.sum()))

    def test_reversal_flips_sign(self):
        n = 60
        poly = spiral_poly(n)
        phi = lift_representative(poly, spiral_analytic_normalization(0.0, 2 * np.pi / n))
        rep = projective_lengths(phi)
        rev = Polygon3.from_points(phi.points[::-1])
        rep_rev = projective_lengths(rev)
        assert rep_rev.pl1 == pytest.approx(-rep.pl1, rel=1e-9)
        assert rep_rev.pl2 == pytest.approx(-rep.pl2, rel=1e-9)

    def test_regular_polygon_lift_has_zero_length(self):
        t = np.linspace(0, 2 * np.pi, 13)[:-1]
        pts = np.stack([np.cos(t), np.sin(t), np.ones_like(t)], axis=1)
        scale = det3(pts[0], pts[1], pts[2]) ** (-1.0 / 3.0)
        phi = Polygon3.from_points(scale * pts, closed=True)
        rep = projective_lengths(phi)
        # terms are cube roots of ~1e-17 roundoff, hence the loose bound
        assert rep.pl1 == pytest.approx(0.0, abs=1e-4)
        assert rep.pl2 == pytest.approx(0.0, abs=1e-4)

    def test_too_short(self):
        poly = spiral_poly(8)
        phi = lift_representative(poly, spiral_analytic_normalization(0.0, 2 * np.pi / 8))
        projective_lengths(phi)  # 8 vertices is the minimum with both windows
        with pytest.raises(GeometryError):
            projective_lengths(Polygon3.from_points(phi.points[:5]))


class TestSmoothReference:
    def test_spiral_constant(self):
        val = smooth_reference_length(lambda t: 40.0 / 27.0, 0.0, 2 * np.pi)
        assert val == pytest.approx(SPIRAL_SMOOTH_LENGTH, abs=1e-10)
        # commonly quoted rounded value; the closed form is 2 pi 40^(1/3) / 3
        assert val == pytest.approx(7.1625, abs=3e-4)

    def test_zero_function(self):
        assert smooth_reference_length(lambda t: 0.0, 0.0, 2 * np.pi) == 0.0

    def test_unit_constant(self):
        assert smooth_reference_length(lambda t: 1.0, 0.0, 1.0) == pytest.approx(1.0)

    def test_non_finite_integrand(self):
        with pytest.raises(GeometryError):
            smooth_reference_length(lambda t: np.inf, 0.0, 1.0)
