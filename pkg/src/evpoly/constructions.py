"""Generators: equal-area planar polygons, their space lifts, and curve samplers.

An equal-area planar polygon Gamma lives on the side grid (vertices at
half-integer slots); its difference polygon gamma(i) = Gamma'(i) sits on
the vertex grid and satisfies [gamma(i), gamma(i+1)] = const.  Lifting
with a base point P produces space polygons whose affine focal set is a
single line (silhouette lift) or whose mu is constant (area lift).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    GeometryError,
    Grid,
    GridSeq,
    Polygon3,
    Topology,
    det2,
    forward_diff,
)

__all__ = [
    "PlanarEqualAreaPolygon",
    "NotEqualAreaError",
    "support_function",
    "silhouette_lift",
    "area_lift",
    "recover_base_point",
    "affine_curvature",
    "lift_residuals",
    "regular_equal_area",
    "random_equal_area",
    "ExampleSpiral",
    "ExampleSpiralRepresentative",
    "Ellipse",
    "Custom",
    "GridScheme",
    "sample_curve",
]

EQUAL_AREA_TOL = 1e-10


class NotEqualAreaError(GeometryError):
    """The planar polygon's edge-pair determinants are not constant."""


@dataclass(frozen=True)
class PlanarEqualAreaPolygon:
    """Planar polygon on the side grid with constant edge-pair area.

    ``Gamma`` holds the half-integer vertices, ``gamma`` the difference
    vectors on the vertex grid, ``area_constant`` the common value of
    [gamma(i), gamma(i+1)].
    """

    Gamma: GridSeq
    gamma: GridSeq
    area_constant: float
    area_spread: float

    @classmethod
    def from_vertices(cls, points, closed: bool = False,
                      tol: float = EQUAL_AREA_TOL) -> "PlanarEqualAreaPolygon":
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise GeometryError("equal-area polygon vertices must be 2-vectors")
        topo = Topology.CLOSED if closed else Topology.OPEN
        if len(pts) < (3 if closed else 4):
            raise GeometryError("too few vertices for an equal-area polygon")
        Gamma = GridSeq(pts, Grid.SIDE, topo)
        gamma = forward_diff(Gamma)
        g = gamma.values
        if closed:
            areas = det2(g, np.roll(g, -1, axis=0))
        else:
            areas = det2(g[:-1], g[1:])
        c = float(np.median(areas))
        if c == 0.0:
            raise NotEqualAreaError("vanishing edge-pair area")
        spread = float(np.max(np.abs(areas - c)) / abs(c))
        if spread > tol:
            raise NotEqualAreaError(
                f"edge-pair areas vary by {spread:.3e} relative (tol {tol:.0e})")
        return cls(Gamma, gamma, c, spread)

    @property
    def closed(self) -> bool:
        return self.Gamma.topology is Topology.CLOSED

    def normalized(self) -> "PlanarEqualAreaPolygon":
        """Rescale so the area constant is +-1 (unit equal-area form)."""
        s = abs(self.area_constant) ** -0.5
        if s == 1.0:
            return self
        return PlanarEqualAreaPolygon.from_vertices(
            s * self.Gamma.values, self.closed)


def support_function(G: PlanarEqualAreaPolygon, P,
                     agreement_tol: float = 1e-10) -> GridSeq:
    """Affine distance z(i) = [Gamma(i+1/2) - P, gamma(i)] per vertex.

    The same determinant taken from the other half-integer neighbour must
    agree (gamma is the exact difference of Gamma); disagreement means
    the inputs are inconsistent.
    """
    P = np.asarray(P, dtype=float)
    G_v = G.Gamma.values
    g = G.gamma.values
    n = len(G_v)
    scale = float(np.max(np.abs(G_v - P))) or 1.0
    z = np.empty(len(g))
    for j, i in enumerate(G.gamma.slots):
        right = G_v[i % n] if G.closed else G.Gamma.at(int(i))
        left = G_v[(i - 1) % n] if G.closed else G.Gamma.at(int(i) - 1)
        z_r = det2(right - P, g[j])
        z_l = det2(left - P, g[j])
        if abs(z_r - z_l) > agreement_tol * scale * max(1.0, float(np.linalg.norm(g[j]))):
            raise GeometryError(
                f"vertex {int(i)}: support function ambiguous, gamma is not Gamma'")
        z[j] = 0.5 * (z_r + z_l)
    return GridSeq(z, Grid.VERTEX, G.gamma.topology, G.gamma.base)


def silhouette_lift(G: PlanarEqualAreaPolygon, P) -> Polygon3:
    """Space polygon phi(i) = (gamma(i), z(i)), equal-volume about the origin.

    The input is rescaled to unit area constant first, so the lifted
    polygon satisfies the affine relation phi''(i) = -k(i) phi(i) + (0,0,1)
    with k the planar affine curvature.  Its focal set is a single line.
    """
    Gn = G.normalized()
    z = support_function(Gn, P)
    pts = np.column_stack([Gn.gamma.values, z.values])
    return Polygon3.from_points(pts, closed=G.closed)


def area_lift(G: PlanarEqualAreaPolygon, P) -> GridSeq:
    """Space polygon Phi(i+1/2) = (Gamma(i+1/2), Z(i+1/2)) on the side grid.

    Z accumulates the support function, anchored at zero on the first
    half-integer slot, so the difference polygon of Phi is exactly the
    silhouette lift.  Phi has constant mu.
    """
    Gn = G.normalized()
    z = support_function(Gn, P)
    G_v = Gn.Gamma.values
    if G.closed:
        Z = np.concatenate([[0.0], np.cumsum(np.roll(z.values, -1)[:-1])])
    else:
        Z = np.concatenate([[0.0], np.cumsum(z.values)])
    pts = np.column_stack([G_v, Z])
    return GridSeq(pts, Grid.SIDE, Gn.Gamma.topology, Gn.Gamma.base)


def recover_base_point(G: PlanarEqualAreaPolygon, z: GridSeq):
    """Solve for the base point P given support-function values.

    z(i) = [Gamma(i+1/2), gamma(i)] - [P, gamma(i)] is linear in P; the
    two degrees of freedom are recovered by least squares.  Returns
    (P, residual).
    """
    g = G.gamma.values
    G_v = G.Gamma.values
    n = len(G_v)
    rows = []
    rhs = []
    for j, i in enumerate(G.gamma.slots):
        right = G_v[i % n] if G.closed else G.Gamma.at(int(i))
        # [P, gamma] = Px*gy - Py*gx
        rows.append([g[j][1], -g[j][0]])
        rhs.append(det2(right, g[j]) - z.values[j])
    a = np.asarray(rows)
    b = np.asarray(rhs)
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    res = float(np.max(np.abs(a @ sol - b))) if len(b) else 0.0
    return sol, res


def affine_curvature(G: PlanarEqualAreaPolygon) -> GridSeq:
    """Discrete affine curvature k with gamma''(i) = -k(i) gamma(i).

    For a unit equal-area polygon gamma(i+1) + gamma(i-1) is parallel to
    gamma(i); k is 2 minus that proportionality factor.
    """
    g = G.gamma.values
    n = len(g)
    if G.closed:
        s = np.roll(g, -1, axis=0) + np.roll(g, 1, axis=0)
        slots = np.arange(n)
        base = 0
    else:
        s = g[2:] + g[:-2]
        slots = np.arange(1, n - 1)
        base = G.gamma.base + 1
    k = np.empty(len(slots))
    for j in range(len(slots)):
        gi = g[(slots[j] - G.gamma.base) % n] if G.closed else g[j + 1]
        r = float(np.dot(s[j], gi) / np.dot(gi, gi))
        off = s[j] - r * gi
        if np.linalg.norm(off) > 1e-8 * max(1.0, np.linalg.norm(s[j])):
            raise NotEqualAreaError(
                f"vertex {int(slots[j])}: neighbour sum not parallel to gamma")
        k[j] = 2.0 - r
    topo = G.gamma.topology
    return GridSeq(k, Grid.VERTEX, topo, 0 if G.closed else base)


def lift_residuals(G: PlanarEqualAreaPolygon, P):
    """Componentwise residuals of the lift relation phi'' = -k phi + (0,0,1).

    Returns (max residual of gamma'' + k gamma, max residual of
    z'' + k z - 1), both on the unit-normalized polygon.
    """
    Gn = G.normalized()
    k = affine_curvature(Gn)
    z = support_function(Gn, P)
    g = Gn.gamma.values
    zv = z.values
    n = len(g)
    r_g = 0.0
    r_z = 0.0
    sign = 1.0 if Gn.area_constant > 0 else -1.0
    for i in k.slots:
        i = int(i)
        if Gn.closed:
            j = i % n
            gpp = g[(j + 1) % n] - 2 * g[j] + g[(j - 1) % n]
            zpp = zv[(j + 1) % n] - 2 * zv[j] + zv[(j - 1) % n]
            gi, zi = g[j], zv[j]
        else:
            j = i - Gn.gamma.base
            gpp = g[j + 1] - 2 * g[j] + g[j - 1]
            zpp = zv[j + 1] - 2 * zv[j] + zv[j - 1]
            gi, zi = g[j], zv[j]
        kk = k.at(i)
        r_g = max(r_g, float(np.max(np.abs(gpp + kk * gi))))
        r_z = max(r_z, abs(zpp + kk * zi - sign))
    return r_g, r_z


def regular_equal_area(N: int) -> PlanarEqualAreaPolygon:
    """Closed regular N-gon scaled so the edge-pair area constant is 1."""
    if N < 3:
        raise GeometryError("need at least 3 vertices")
    theta = 2.0 * np.pi * (np.arange(N) + 0.5) / N
    pts = np.column_stack([np.cos(theta), np.sin(theta)])
    # edge length 2 R sin(pi/N), turning angle 2 pi / N
    area = 4.0 * np.sin(np.pi / N) ** 2 * np.sin(2.0 * np.pi / N)
    r = area ** -0.5
    return PlanarEqualAreaPolygon.from_vertices(r * pts, closed=True)


def random_equal_area(N: int, rng: np.random.Generator,
                      step_low: float = 0.5, step_high: float = 1.8) -> PlanarEqualAreaPolygon:
    """Open equal-area polygon with unit constant, grown edge by edge.

    Each new difference vector is t*gamma + rot90(gamma)/|gamma|^2 for a
    random t, which keeps [gamma(i), gamma(i+1)] = 1 exactly.
    """
    if N < 4:
        raise GeometryError("need at least 4 vertices")
    g = np.empty((N - 1, 2))
    ang = rng.uniform(0, 2 * np.pi)
    g[0] = np.array([np.cos(ang), np.sin(ang)]) * rng.uniform(0.7, 1.4)
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    for i in range(1, N - 1):
        t = rng.uniform(step_low, step_high)
        g[i] = t * g[i - 1] + rot @ g[i - 1] / np.dot(g[i - 1], g[i - 1])
    start = rng.normal(size=2)
    pts = np.vstack([start, start + np.cumsum(g, axis=0)])
    return PlanarEqualAreaPolygon.from_vertices(pts, closed=False)


class ExampleSpiral:
    """Planar logarithmic spiral t -> (exp(-t) cos t, exp(-t) sin t)."""

    dim = 2

    def __call__(self, t):
        e = np.exp(-t)
        return np.stack([e * np.cos(t), e * np.sin(t)], axis=-1)


class ExampleSpiralRepresentative:
    """The spiral's centro-affine arc-length representative in 3-space.

    phi(t) = 2^(-1/3) exp(2t/3) (exp(-t) cos t, exp(-t) sin t, 1); its
    consecutive-triple volumes about the origin are exactly constant on
    any uniform grid.
    """

    dim = 3

    def __call__(self, t):
        a = 2.0 ** (-1.0 / 3.0) * np.exp(2.0 * t / 3.0)
        e = np.exp(-t)
        return np.stack([a * e * np.cos(t), a * e * np.sin(t), a], axis=-1)


class Ellipse:
    """Planar ellipse t -> (a cos t, b sin t)."""

    dim = 2

    def __init__(self, a: float = 1.0, b: float = 1.0):
        self.a = float(a)
        self.b = float(b)

    def __call__(self, t):
        return np.stack([self.a * np.cos(t), self.b * np.sin(t)], axis=-1)


class Custom:
    """Wrap an arbitrary t -> point map with an explicit dimension."""

    def __init__(self, fn, dim: int):
        self.fn = fn
        self.dim = int(dim)

    def __call__(self, t):
        return np.asarray(self.fn(t), dtype=float)


class GridScheme:
    HALF_OPEN_STEP = "half_open_step"
    INCLUDE_BOTH_ENDS = "include_both_ends"


def sample_curve(curve, t0: float, t1: float, N: int,
                 scheme: str = GridScheme.HALF_OPEN_STEP):
    """Sample a parametric curve on a uniform grid.

    ``half_open_step`` uses h = (t1 - t0)/N with samples at t0 + i*h for
    i = 0..N-1 (the last point stops one step short of t1);
    ``include_both_ends`` uses h = (t1 - t0)/(N - 1).  Returns an open
    Polygon3 for 3-space curves, or the raw (N, 2) vertex array for
    planar ones.
    """
    if N < 4:
        raise GeometryError("need at least 4 samples")
    if not t1 > t0:
        raise GeometryError("need t1 > t0")
    if scheme == GridScheme.HALF_OPEN_STEP:
        h = (t1 - t0) / N
        t = t0 + h * np.arange(N)
    elif scheme == GridScheme.INCLUDE_BOTH_ENDS:
        t = np.linspace(t0, t1, N)
    else:
        raise GeometryError(f"unknown grid scheme {scheme!r}")
    pts = np.asarray(curve(t), dtype=float)
    if curve.dim == 3:
        return Polygon3.from_points(pts, closed=False)
    return pts
