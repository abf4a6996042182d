import numpy as np
import pytest

from conftest import random_equal_volume_polygon, random_generic_framed

from evpoly.core import GeometryError, Grid, GridSeq, Polygon3
from evpoly.constructions import ExampleSpiralRepresentative, sample_curve
from evpoly.darboux import FramedPolygon, parallel_darboux
from evpoly.equal_volume import (
    centroaffine_volumes,
    darboux_volumes,
    is_equal_volume,
    resample_equal_volume,
    space_volumes,
)


def spiral_framed(n=300, jitter=0.0):
    rep = ExampleSpiralRepresentative()
    t = np.linspace(0.0, 2 * np.pi, n)
    if jitter:
        t = t + jitter * (2 * np.pi / n) * np.sin(7 * t)
    pts = rep(t)
    return FramedPolygon.silhouette(pts, closed=False)


class TestVolumeReports:
    def test_centroaffine_random_exact(self, rng):
        p = random_equal_volume_polygon(rng, 14, c=0.7)
        rep = centroaffine_volumes(p)
        assert rep.c_hat == pytest.approx(0.7, rel=1e-10)
        assert rep.spread < 1e-10
        assert is_equal_volume(rep)

    def test_analytic_spiral_representative_is_equal_volume(self):
        # uniform samples of the representative differ by a unimodular
        # linear map per step, so the triple volumes are exactly constant
        poly = sample_curve(ExampleSpiralRepresentative(), 0.0, 2 * np.pi, 200)
        rep = centroaffine_volumes(poly)
        assert rep.spread < 1e-10

    def test_darboux_volumes_match_centroaffine_for_silhouette(self):
        f = spiral_framed(50)
        df = parallel_darboux(f)
        rep_d = darboux_volumes(f, df)
        rep_c = centroaffine_volumes(f.polygon)
        # silhouette xi is the position field scaled by s(i) = |phi(i)|/|phi(0)|
        # only the constancy transfers, not the value
        assert rep_d.spread < 1e-9
        assert rep_c.spread < 1e-9

    def test_volume_slots_open(self, rng):
        p = random_equal_volume_polygon(rng, 8)
        rep = centroaffine_volumes(p)
        assert rep.volumes.base == 1
        assert len(rep.volumes) == 6

    def test_sign_change_rejected(self):
        pts = np.array([[1, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, -1], [1, 1, -1]], float)
        rep = centroaffine_volumes(Polygon3.from_points(pts))
        assert not is_equal_volume(rep, tol=np.inf)

    def test_space_volumes_requires_side_grid(self):
        s = GridSeq(np.random.default_rng(1).normal(size=(6, 3)), Grid.VERTEX)
        with pytest.raises(GeometryError):
            space_volumes(s)

    def test_space_volumes_of_accumulated_polygon(self, rng):
        p = random_equal_volume_polygon(rng, 10, c=1.3)
        accum = np.vstack([np.zeros(3), np.cumsum(p.points, axis=0)])
        s = GridSeq(accum, Grid.SIDE)
        rep = space_volumes(s)
        assert rep.c_hat == pytest.approx(1.3, rel=1e-9)
        assert rep.spread < 1e-9


class TestResampler:
    def test_already_equal_volume_is_fixed_point(self):
        f = spiral_framed(200)
        df = parallel_darboux(f)
        res = resample_equal_volume(f, df)
        assert not res.truncated
        np.testing.assert_allclose(res.framed.polygon.points, f.polygon.points,
                                   atol=1e-12)

    def test_output_is_equal_volume(self):
        f = spiral_framed(400, jitter=0.3)
        df = parallel_darboux(f)
        assert darboux_volumes(f, df).spread > 1e-3
        res = resample_equal_volume(f, df)
        df2 = parallel_darboux(res.framed)
        rep = darboux_volumes(res.framed, df2)
        assert rep.spread <= 1e-9

    def test_idempotent(self):
        f = spiral_framed(400, jitter=0.3)
        res = resample_equal_volume(f, parallel_darboux(f))
        res2 = resample_equal_volume(res.framed, parallel_darboux(res.framed))
        n = min(len(res.framed.polygon), len(res2.framed.polygon))
        gap = np.abs(res.framed.polygon.points[:n] - res2.framed.polygon.points[:n])
        assert gap.max() <= 1e-12 * f.polygon.diameter()

    def test_vertices_stay_on_input_polyline(self):
        f = spiral_framed(250, jitter=0.3)
        res = resample_equal_volume(f, parallel_darboux(f))
        pts = f.polygon.points
        for q in res.framed.polygon.points:
            d = np.inf
            for a, b in zip(pts[:-1], pts[1:]):
                ab = b - a
                t = np.clip(np.dot(q - a, ab) / np.dot(ab, ab), 0.0, 1.0)
                d = min(d, np.linalg.norm(a + t * ab - q))
            assert d <= 1e-12 * f.polygon.diameter()

    def test_truncation_flag(self):
        f = spiral_framed(250, jitter=0.3)
        res = resample_equal_volume(f, parallel_darboux(f))
        if res.truncated:
            assert len(res.framed.polygon) < len(f.polygon)

    def test_closed_input_rejected(self):
        t = np.linspace(0, 2 * np.pi, 11)[:-1]
        pts = np.stack([np.cos(t), np.sin(t), np.ones_like(t)], axis=1)
        f = FramedPolygon.silhouette(pts, closed=True)
        with pytest.raises(GeometryError):
            resample_equal_volume(f, parallel_darboux(f))

    def test_too_short_rejected(self, rng):
        f = random_generic_framed(rng, 3)
        with pytest.raises(GeometryError):
            resample_equal_volume(f, parallel_darboux(f))
