"""Parallel Darboux fields and the osculating developable of a framed polygon.

A framed polygon models a polygonal line drawn on a polyhedron with planar
quadrilateral faces: each vertex carries the direction of the polyhedron
edge through it, and each side together with the two adjacent directions
spans the (planar) face containing that side.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import (
    GeometryError,
    Grid,
    GridSeq,
    Polygon3,
    Topology,
    det3,
)
from .meshes import Mesh

__all__ = [
    "FramedPolygon",
    "DarbouxField",
    "FrameReport",
    "DegenerateFrameError",
    "SurfaceKind",
    "OsculatingClass",
    "validate_frame",
    "parallel_darboux",
    "osculating_points",
    "osculating_developable",
    "classify_osculating",
]

TOL_FACE_DEFAULT = 1e-8
CLASSIFY_TOL_DEFAULT = 1e-6


class DegenerateFrameError(GeometryError):
    """The Darboux recursion is singular at some side."""

    def __init__(self, side: int, reason: str):
        self.side = side
        super().__init__(f"side {side}: {reason}")


@dataclass(frozen=True)
class FramedPolygon:
    """Polygon plus a transversal edge direction per vertex."""

    polygon: Polygon3
    directions: GridSeq

    def __post_init__(self):
        d = self.directions
        if d.grid is not Grid.VERTEX or len(d) != len(self.polygon):
            raise GeometryError("directions must sit on the polygon's vertex grid")
        if d.topology is not self.polygon.topology:
            raise GeometryError("directions and polygon topology disagree")
        norms = np.linalg.norm(d.values, axis=1)
        if np.any(norms == 0.0):
            raise GeometryError("zero direction vector")

    @classmethod
    def build(cls, points, directions, closed: bool = False) -> "FramedPolygon":
        topo = Topology.CLOSED if closed else Topology.OPEN
        return cls(Polygon3.from_points(points, closed),
                   GridSeq(directions, Grid.VERTEX, topo))

    @classmethod
    def silhouette(cls, points, apex=(0.0, 0.0, 0.0), closed: bool = False) -> "FramedPolygon":
        """Frame a polygon by the lines through a fixed point (cone edges)."""
        pts = np.asarray(points, dtype=float)
        return cls.build(pts, pts - np.asarray(apex, dtype=float), closed)

    @property
    def unit_directions(self) -> np.ndarray:
        d = self.directions.values
        return d / np.linalg.norm(d, axis=1, keepdims=True)

    @property
    def closed(self) -> bool:
        return self.polygon.closed

    def n_sides(self) -> int:
        n = len(self.polygon)
        return n if self.closed else n - 1


@dataclass(frozen=True)
class DarbouxField:
    """Parallel Darboux vectors per vertex and sigma per side.

    ``holonomy`` is the around-the-loop scale mismatch for closed
    polygons (None when open): the ratio s(N)/s(0) of the recursion
    continued once around, which is 1 for a globally consistent field.
    """

    xi: GridSeq
    sigma: GridSeq
    holonomy: float | None = None


@dataclass(frozen=True)
class FrameReport:
    """Per-side coplanarity residuals and per-vertex transversality margins."""

    coplanarity: np.ndarray
    transversality: np.ndarray
    bad_sides: list
    bad_vertices: list
    tol_face: float

    @property
    def ok(self) -> bool:
        return not self.bad_sides and not self.bad_vertices


def _edges(f: FramedPolygon) -> np.ndarray:
    return f.polygon.sides().values


def validate_frame(f: FramedPolygon, tol_face: float = TOL_FACE_DEFAULT) -> FrameReport:
    """Check the planar-quadrilateral-face hypothesis and transversality.

    Coplanarity residual per side is |det(side, d_left, d_right)|
    normalized by the product of the three norms; transversality margin
    per vertex is the smallest sine of the angle between the direction
    and its adjacent sides.
    """
    p = f.polygon.points
    e = _edges(f)
    dh = f.unit_directions
    n = len(p)
    nsides = f.n_sides()

    eh = e / np.linalg.norm(e, axis=1, keepdims=True)
    dl = dh
    dr = np.roll(dh, -1, axis=0)
    if not f.closed:
        dl, dr = dh[:-1], dh[1:]
    cop = np.abs(det3(eh, dl, dr))
    bad_sides = [int(k) for k in np.nonzero(cop > tol_face)[0]]

    margins = np.full(n, np.inf)
    for i in range(n):
        adjacent = []
        if f.closed:
            adjacent = [eh[i % nsides], eh[(i - 1) % nsides]]
        else:
            if i < nsides:
                adjacent.append(eh[i])
            if i > 0:
                adjacent.append(eh[i - 1])
        for a in adjacent:
            margins[i] = min(margins[i], float(np.linalg.norm(np.cross(dh[i], a))))
    bad_vertices = [int(i) for i in np.nonzero(margins <= tol_face)[0]]

    return FrameReport(cop, margins, bad_sides, bad_vertices, tol_face)


def _face_decompose(edge: np.ndarray, d0: np.ndarray, d1: np.ndarray, side: int):
    """Write ``edge = p*d0 + q*d1`` in the face plane.

    Solves a 2x2 system in the two coordinates that survive discarding
    the dominant component of the face normal.  Returns None when d0 and
    d1 are (anti)parallel, which is the cylinder-like case.
    """
    nrm = np.cross(d0, d1)
    s = np.linalg.norm(nrm)
    if s <= 1e-12:
        return None
    drop = int(np.argmax(np.abs(nrm)))
    keep = [j for j in range(3) if j != drop]
    a = np.array([[d0[keep[0]], d1[keep[0]]], [d0[keep[1]], d1[keep[1]]]])
    try:
        p, q = np.linalg.solve(a, edge[keep])
    except np.linalg.LinAlgError as exc:
        raise DegenerateFrameError(side, "singular face basis") from exc
    return float(p), float(q)


def parallel_darboux(f: FramedPolygon, seed_scale: float = 1.0,
                     tol_face: float = TOL_FACE_DEFAULT) -> DarbouxField:
    """Compute the parallel Darboux vector field and sigma per side.

    The field is fixed by ``xi(0) = seed_scale * d(0)/|d(0)|`` and the
    per-side recursion obtained from decomposing each side in the face
    basis of its two end directions: with side = p*d0 + q*d1,

        s_next = -q * s / p,   sigma = s / p.

    Scaling the seed scales both xi and sigma linearly.
    """
    if seed_scale == 0.0:
        raise GeometryError("seed_scale must be nonzero")
    report = validate_frame(f, tol_face)
    if not report.ok:
        raise GeometryError(
            f"frame validation failed (sides {report.bad_sides}, vertices {report.bad_vertices})")

    e = _edges(f)
    dh = f.unit_directions
    n = len(f.polygon)
    nsides = f.n_sides()

    s = np.empty(n)
    sigma = np.empty(nsides)
    s[0] = seed_scale
    s_wrap = None
    for k in range(nsides):
        i, j = k, (k + 1) % n
        pq = _face_decompose(e[k], dh[i], dh[j], k)
        if pq is None:
            # parallel end directions: prism-like face, xi is constant
            # along it and sigma vanishes.
            flip = float(np.sign(np.dot(dh[i], dh[j])))
            nxt = s[k % n] * flip
            sigma[k] = 0.0
        else:
            p, q = pq
            if abs(p) <= 1e-14 * (abs(q) + 1.0):
                raise DegenerateFrameError(k, "side parallel to far direction, recursion singular")
            nxt = -q * s[k % n] / p
            sigma[k] = s[k % n] / p
        if j == 0:
            s_wrap = nxt
        else:
            s[j] = nxt

    topo = f.polygon.topology
    xi = GridSeq(s[:, None] * dh, Grid.VERTEX, topo)
    sg = GridSeq(sigma, Grid.SIDE, topo)
    holonomy = None
    if f.closed and s_wrap is not None:
        holonomy = float(s_wrap / s[0])
    return DarbouxField(xi, sg, holonomy)


def osculating_points(f: FramedPolygon, df: DarbouxField,
                      agreement_tol: float = 1e-10):
    """Intersections of consecutive Darboux support lines, one per side.

    Each point evaluates as ``phi(k) + xi(k)/sigma(k)`` and equivalently
    from the far vertex; the midpoint of the two evaluations is returned.
    Sides with ``sigma = 0`` have no finite intersection (parallel
    support lines) and come back as NaN rows, with their indices listed
    separately.
    """
    p = f.polygon.points
    xi = df.xi.values
    sigma = df.sigma.values
    n = len(p)
    nsides = len(sigma)
    out = np.full((nsides, 3), np.nan)
    at_infinity = []
    scale = f.polygon.diameter()
    for k in range(nsides):
        i, j = k, (k + 1) % n
        if sigma[k] == 0.0 or not np.isfinite(1.0 / sigma[k]):
            at_infinity.append(k)
            continue
        o1 = p[i] + xi[i] / sigma[k]
        o2 = p[j] + xi[j] / sigma[k]
        gap = np.linalg.norm(o1 - o2)
        ref = max(np.linalg.norm(o1 - p[i]), np.linalg.norm(o2 - p[j]), scale)
        if gap > agreement_tol * ref:
            raise GeometryError(
                f"side {k}: the two support-line evaluations disagree (gap {gap:.3e})")
        out[k] = 0.5 * (o1 + o2)
    seq = GridSeq(out, Grid.SIDE, f.polygon.topology, finite=not at_infinity)
    return seq, at_infinity


def osculating_developable(f: FramedPolygon, df: DarbouxField,
                           extent: float | None = None) -> Mesh:
    """Ruled mesh of the faces between consecutive Darboux support lines.

    One planar quad per side, bounded by the support lines through the
    two end vertices, truncated to parameter |u| <= extent along the
    unit Darboux directions.
    """
    if extent is None:
        extent = 2.0 * f.polygon.diameter()
    p = f.polygon.points
    xi = df.xi.values
    xh = xi / np.linalg.norm(xi, axis=1, keepdims=True)
    n = len(p)
    verts = []
    faces = []
    for k in range(f.n_sides()):
        i, j = k, (k + 1) % n
        quad = [p[i] - extent * xh[i], p[i] + extent * xh[i],
                p[j] + extent * xh[j], p[j] - extent * xh[j]]
        b = len(verts)
        verts.extend(quad)
        faces.append([b, b + 1, b + 2, b + 3])
    return Mesh(np.array(verts), faces)


class SurfaceKind(enum.Enum):
    CONE = "cone"
    CYLINDER = "cylinder"
    GENERAL = "general"


@dataclass(frozen=True)
class OsculatingClass:
    kind: SurfaceKind
    quality: float
    apex: np.ndarray | None = None


def classify_osculating(df: DarbouxField, tol: float = CLASSIFY_TOL_DEFAULT,
                        f: FramedPolygon | None = None) -> OsculatingClass:
    """Cone / cylinder / general classification of the osculating surface.

    Quality is the relative spread of sigma, (max-min)/median|sigma|;
    zero for a perfect silhouette.  Passing the framed polygon lets the
    cone branch report the apex (mean of the support-line intersections).
    """
    sigma = df.sigma.values
    xi_scale = float(np.median(np.linalg.norm(df.xi.values, axis=1)))
    med = float(np.median(np.abs(sigma)))
    spread = float(sigma.max() - sigma.min())

    if med > 0 and spread / med <= tol and np.all(np.abs(sigma) > tol * med):
        apex = None
        if f is not None:
            pts, _ = osculating_points(f, df)
            apex = np.nanmean(pts.values, axis=0)
        return OsculatingClass(SurfaceKind.CONE, spread / med, apex)

    if f is not None:
        edge_scale = float(np.median(np.linalg.norm(f.polygon.sides().values, axis=1)))
    else:
        edge_scale = 1.0
    if np.max(np.abs(sigma)) <= tol * (xi_scale / edge_scale):
        return OsculatingClass(SurfaceKind.CYLINDER, 0.0)

    quality = spread / med if med > 0 else np.inf
    return OsculatingClass(SurfaceKind.GENERAL, quality)
