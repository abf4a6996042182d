"""Discrete projective length of planar polygons via equal-volume lifts.

A convex planar polygon, viewed in the z = 1 slice, is rescaled per
vertex so consecutive vertex triples span constant volume about the
origin.  The third-order invariants of that representative give two
estimators of the projective length, pl1 and pl2, whose cube-root terms
approach the smooth integrand per side as the sampling refines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .constructions import (
    ExampleSpiral,
    ExampleSpiralRepresentative,
    GridScheme,
    sample_curve,
)
from .core import (
    GeometryError,
    Grid,
    GridSeq,
    Polygon3,
    Topology,
    det2,
    det3,
)
from .invariants import SolveMode, centroaffine_frenet

__all__ = [
    "PlanarProjectivePolygon",
    "ProjectiveLengthReport",
    "InflectionError",
    "LiftNormalization",
    "signed_cbrt",
    "b_sequence",
    "default_normalization",
    "lift_representative",
    "projective_lengths",
    "smooth_reference_length",
    "table1_experiment",
    "spiral_analytic_normalization",
]


class InflectionError(GeometryError):
    """A vertex determinant b(i) is nonpositive (convexity hypothesis fails)."""

    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"vertex {index}: b = {value:.3e} <= 0, polygon has an inflection")


def signed_cbrt(x):
    """Real cube root preserving sign; vectorized."""
    x = np.asarray(x, dtype=float)
    r = np.sign(x) * np.abs(x) ** (1.0 / 3.0)
    return float(r) if r.ndim == 0 else r


@dataclass(frozen=True)
class PlanarProjectivePolygon:
    """Planar polygon with its per-vertex convexity determinants b(i)."""

    vertices: GridSeq
    b: GridSeq

    @classmethod
    def from_vertices(cls, points, closed: bool = False) -> "PlanarProjectivePolygon":
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise GeometryError("planar polygon vertices must be 2-vectors")
        topo = Topology.CLOSED if closed else Topology.OPEN
        v = GridSeq(pts, Grid.VERTEX, topo)
        return cls(v, b_sequence(v))

    @property
    def closed(self) -> bool:
        return self.vertices.topology is Topology.CLOSED


def b_sequence(poly) -> GridSeq:
    """Consecutive edge-pair determinants b(i) = [phi'(i-1/2), phi'(i+1/2)].

    Accepts a (N, 2) array or a vertex GridSeq.  Raises on any b <= 0.
    """
    if isinstance(poly, GridSeq):
        pts = poly.values
        topo = poly.topology
    else:
        pts = np.asarray(poly, dtype=float)
        topo = Topology.OPEN
    if len(pts) < 3:
        raise GeometryError("need at least 3 vertices")
    if topo is Topology.CLOSED:
        e = np.roll(pts, -1, axis=0) - pts
        b = det2(np.roll(e, 1, axis=0), e)
        base = 0
    else:
        e = pts[1:] - pts[:-1]
        b = det2(e[:-1], e[1:])
        base = 1
    bad = np.nonzero(b <= 0.0)[0]
    if bad.size:
        j = int(bad[0])
        raise InflectionError(j + base, float(b[j]))
    return GridSeq(b, Grid.VERTEX, topo, base)


@dataclass(frozen=True)
class LiftNormalization:
    """Seed scales for the first two vertices and the target volume c."""

    a1: float
    a2: float
    c: float
    label: str = "unit-seed"


def default_normalization(poly: PlanarProjectivePolygon) -> LiftNormalization:
    """Unit seeds with c the geometric mean of the raw triple volumes."""
    pts = poly.vertices.values
    raw = np.column_stack([pts, np.ones(len(pts))])
    vols = det3(raw[:-2], raw[1:-1], raw[2:])
    if np.any(vols <= 0):
        raise InflectionError(int(np.argmin(vols)) + 1, float(vols.min()))
    c = float(np.exp(np.mean(np.log(vols))))
    return LiftNormalization(1.0, 1.0, c, "unit-seed")


def spiral_analytic_normalization(t0: float, h: float) -> LiftNormalization:
    """Seeds and c from the spiral's analytic equal-volume representative."""
    rep = ExampleSpiralRepresentative()
    t = t0 + h * np.arange(3)
    p = rep(t)
    a = 2.0 ** (-1.0 / 3.0) * np.exp(2.0 * t / 3.0)
    return LiftNormalization(float(a[0]), float(a[1]),
                             float(det3(p[0], p[1], p[2])), "analytic-seed")


def lift_representative(poly: PlanarProjectivePolygon,
                        norm: LiftNormalization | None = None) -> Polygon3:
    """Equal-volume space representative phi(i) = a(i) (vertex(i), 1).

    The scales follow a(i+1) = c / (a(i-1) a(i) b(i)) from the two seeds,
    which makes every consecutive triple volume about the origin exactly
    c.  Only open polygons are lifted (the recursion has a closure
    obstruction on loops).
    """
    if poly.closed:
        raise GeometryError("representative lift is defined for open polygons")
    if norm is None:
        norm = default_normalization(poly)
    if norm.a1 <= 0 or norm.a2 <= 0 or norm.c <= 0:
        raise GeometryError("lift seeds and volume constant must be positive")
    b = poly.b
    pts = poly.vertices.values
    n = len(pts)
    a = np.empty(n)
    a[0], a[1] = norm.a1, norm.a2
    for i in range(1, n - 1):
        denom = a[i - 1] * a[i] * float(b.at(i))
        a[i + 1] = norm.c / denom
        if not np.isfinite(a[i + 1]):
            raise GeometryError(f"vertex {i + 1}: lift recursion overflowed")
    lifted = a[:, None] * np.column_stack([pts, np.ones(n)])
    return Polygon3.from_points(lifted, closed=False)


@dataclass(frozen=True)
class ProjectiveLengthReport:
    pl1: float
    pl2: float
    per_side_terms1: GridSeq
    per_side_terms2: GridSeq
    summation_range: tuple
    normalization: LiftNormalization | None


def projective_lengths(phi: Polygon3, mode: SolveMode = SolveMode.EXACT,
                       normalization: LiftNormalization | None = None) -> ProjectiveLengthReport:
    """Both discrete projective-length sums of an equal-volume polygon.

    Per side the terms are the signed cube roots of rho1'(i+1/2) +
    2 tau(i+1/2) and rho2'(i+1/2) + 2 tau(i+1/2).  For open polygons both
    sums run over the same window: from the first side where the
    narrower of the two estimators is defined through the last side each
    one reaches (pl1 extends one side further on the right).
    """
    if len(phi) < 6:
        raise GeometryError("need at least 6 vertices for projective lengths")
    fr = centroaffine_frenet(phi, mode=mode)
    r1, r2, tau = fr.rho1, fr.rho2, fr.tau
    topo = phi.vertices.topology

    if phi.closed:
        n = len(tau.values)
        d1 = np.roll(r1.values, -1) - r1.values
        d2 = np.roll(r2.values, -1) - r2.values
        t1 = signed_cbrt(d1 + 2.0 * tau.values)
        t2 = signed_cbrt(d2 + 2.0 * tau.values)
        terms1 = GridSeq(t1, Grid.SIDE, topo)
        terms2 = GridSeq(t2, Grid.SIDE, topo)
        rng = (0, n - 1)
        return ProjectiveLengthReport(float(t1.sum()), float(t2.sum()),
                                      terms1, terms2, rng, normalization)

    # open windows: rho1' on sides [r1.base, ...], rho2' on [r2.base, ...]
    start = max(r1.base, r2.base + 1, tau.base)
    stop1 = min(r1.base + len(r1.values) - 2, tau.base + len(tau.values) - 1)
    stop2 = min(r2.base + len(r2.values) - 2, tau.base + len(tau.values) - 1)
    if stop1 < start or stop2 < start:
        raise GeometryError("polygon too short for a nonempty summation window")
    k1 = np.arange(start, stop1 + 1)
    k2 = np.arange(start, stop2 + 1)
    t1 = signed_cbrt(np.array([r1.at(k + 1) - r1.at(k) + 2.0 * tau.at(k) for k in k1]))
    t2 = signed_cbrt(np.array([r2.at(k + 1) - r2.at(k) + 2.0 * tau.at(k) for k in k2]))
    terms1 = GridSeq(t1, Grid.SIDE, topo, int(start))
    terms2 = GridSeq(t2, Grid.SIDE, topo, int(start))
    return ProjectiveLengthReport(float(t1.sum()), float(t2.sum()),
                                  terms1, terms2,
                                  (int(start), int(stop1)), normalization)


def smooth_reference_length(rho_prime_plus_2tau, t0: float, t1: float) -> float:
    """Integral of the signed cube root of rho' + 2 tau over [t0, t1]."""

    def integrand(t):
        v = float(rho_prime_plus_2tau(t))
        if not np.isfinite(v):
            raise GeometryError(f"non-finite integrand at t = {t}")
        return signed_cbrt(v)

    val, _ = quad(integrand, t0, t1, epsabs=1e-10, epsrel=1e-12, limit=200)
    return float(val)


SPIRAL_SMOOTH_LENGTH = 2.0 * np.pi * 40.0 ** (1.0 / 3.0) / 3.0


def table1_experiment(sizes) -> list:
    """Projective lengths of the spiral for several sampling densities.

    For each N the spiral (exp(-t) cos t, exp(-t) sin t) is sampled on
    [0, 2 pi) with step h = 2 pi / N, lifted with analytic seeds, and
    both length estimators are computed.  Returns rows of
    (N, h, pl1, pl2).
    """
    rows = []
    for N in sizes:
        N = int(N)
        if N < 6:
            raise GeometryError(f"N = {N}: need at least 6 samples")
        h = 2.0 * np.pi / N
        pts = sample_curve(ExampleSpiral(), 0.0, 2.0 * np.pi, N,
                           GridScheme.HALF_OPEN_STEP)
        poly = PlanarProjectivePolygon.from_vertices(pts, closed=False)
        norm = spiral_analytic_normalization(0.0, h)
        phi = lift_representative(poly, norm)
        rep = projective_lengths(phi, SolveMode.EXACT, norm)
        rows.append((N, h, rep.pl1, rep.pl2))
    return rows
