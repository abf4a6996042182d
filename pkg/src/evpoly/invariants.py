"""Discrete Frenet coefficients, the gauge field, and the affine focal set.

For an equal-volume framed polygon the third difference of each side
stays inside the face through that side, so it decomposes against the
side vector and either end's Darboux vector:

    phi'''(k) = -rho2(k)   * side(k) + tau(k) * xi(k+1)
    phi'''(k) = -rho1(k+1) * side(k) + tau(k) * xi(k)

(0-based side slots; side k joins vertices k and k+1).  The scalar
sequences satisfy  -tau*sigma = rho2(k) - rho1(k+1)  on every side.

Open-topology windows (N vertices):
    third differences / tau / mu / Q : sides   1 .. N-4
    rho2                             : vertices 1 .. N-4
    rho1                             : vertices 2 .. N-3
    lambda / eta                     : vertices 1 .. N-3
    O                                : sides   0 .. N-2
Closed polygons use all N slots, indices mod N.
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
    det2,
    det3,
)
from .darboux import DarbouxField, FramedPolygon, osculating_points
from .equal_volume import centroaffine_volumes, darboux_volumes
from .meshes import Mesh

__all__ = [
    "SolveMode",
    "FrenetData",
    "FocalSetData",
    "FocalKind",
    "FocalClass",
    "PlanarReduction",
    "GaugeObstructionError",
    "NotEqualVolumeError",
    "frenet",
    "centroaffine_frenet",
    "lambda_from_tau",
    "focal_data",
    "focal_set_mesh",
    "classify_focal",
    "planar_reduction",
    "mu_prime_check",
]

EQUAL_VOLUME_TOL = 1e-8
TAU_AGREEMENT_TOL = 1e-9


class SolveMode(enum.Enum):
    EXACT = "exact"
    LEAST_SQUARES = "least_squares"


class NotEqualVolumeError(GeometryError):
    """Exact-mode Frenet requested on a polygon whose volumes vary.

    The constant-volume condition is what keeps the third difference
    inside the face plane; without it the exact 2x2 solve is ill-posed.
    """


class GaugeObstructionError(GeometryError):
    """No closed gauge field exists because the tau sum is nonzero."""

    def __init__(self, total: float):
        self.total = total
        super().__init__(f"closed polygon with sum(tau) = {total:.3e}: no periodic gauge exists")


@dataclass(frozen=True)
class FrenetData:
    rho1: GridSeq
    rho2: GridSeq
    tau: GridSeq
    c: float
    residual: GridSeq
    tau_gap: GridSeq

    @property
    def topology(self) -> Topology:
        return self.tau.topology

    def compatibility_residual(self, sigma: GridSeq) -> np.ndarray:
        """|  -tau*sigma - (rho2(k) - rho1(k+1)) | per side."""
        t = self.tau.values
        r2 = self.rho2.values
        if self.topology is Topology.CLOSED:
            r1n = np.roll(self.rho1.values, -1)
            sg = sigma.values
        else:
            r1n = self.rho1.values           # rho1 base is rho2 base + 1 already
            sg = np.array([sigma.at(k) for k in self.tau.slots])
        return np.abs(-t * sg - (r2 - r1n))


def _third_diffs(p: np.ndarray, closed: bool):
    """Third differences per side and the slots they live on."""
    if closed:
        n = len(p)
        k = np.arange(n)
        d3 = p[(k + 2) % n] - 3 * p[(k + 1) % n] + 3 * p[k] - p[(k - 1) % n]
        return d3, k
    d3 = p[3:] - 3 * p[2:-1] + 3 * p[1:-2] - p[:-3]
    return d3, np.arange(1, len(p) - 2)


def _solve_pair(d3, edge, xi_near, xi_far, mode: SolveMode):
    """Solve both Frenet decompositions of one third difference.

    Returns (rho_far, rho_near, tau, residual, tau_gap) where rho_far
    pairs with xi at the left vertex and rho_near with the right one.
    """
    normal = np.cross(edge, xi_near)
    nn = np.linalg.norm(normal)
    if nn == 0.0:
        raise GeometryError("degenerate face basis in Frenet solve")
    normal = normal / nn
    res = abs(float(np.dot(d3, normal)))

    def solve_one(xi):
        a = np.stack([-edge, xi], axis=1)
        if mode is SolveMode.EXACT:
            keep = [j for j in range(3) if j != int(np.argmax(np.abs(normal)))]
            return np.linalg.solve(a[keep], d3[keep])
        sol, *_ = np.linalg.lstsq(a, d3, rcond=None)
        return sol

    rho_near, tau_a = solve_one(xi_far)   # expansion against far-end xi
    rho_far, tau_b = solve_one(xi_near)   # expansion against near-end xi
    gap = abs(float(tau_a - tau_b))
    tau = 0.5 * float(tau_a + tau_b)
    return float(rho_far), float(rho_near), tau, res, gap


def frenet(f: FramedPolygon, df: DarbouxField,
           mode: SolveMode = SolveMode.EXACT) -> FrenetData:
    """Frenet coefficient sequences of an equal-volume framed polygon."""
    p = f.polygon.points
    n = len(p)
    if n < 5 and not f.closed:
        raise GeometryError("need at least 5 vertices for open Frenet data")
    rep = darboux_volumes(f, df)
    if mode is SolveMode.EXACT and rep.spread > EQUAL_VOLUME_TOL:
        raise NotEqualVolumeError(
            f"volume spread {rep.spread:.3e} exceeds {EQUAL_VOLUME_TOL:.0e}; "
            "the third difference leaves the face plane, so the exact solve "
            "does not apply (resample first or use least-squares mode)")

    xi = df.xi.values
    d3, slots = _third_diffs(p, f.closed)
    m = len(slots)
    rho1 = np.empty(m)
    rho2 = np.empty(m)
    tau = np.empty(m)
    res = np.empty(m)
    gap = np.empty(m)
    for j, k in enumerate(slots):
        edge = p[(k + 1) % n] - p[k]
        r1, r2, t, rr, g = _solve_pair(d3[j], edge, xi[k], xi[(k + 1) % n], mode)
        rho1[j], rho2[j], tau[j], res[j], gap[j] = r1, r2, t, rr, g
        if mode is SolveMode.EXACT and g > TAU_AGREEMENT_TOL * max(1.0, abs(t)):
            raise GeometryError(
                f"side {int(k)}: the two tau evaluations disagree by {g:.3e}")

    topo = f.polygon.topology
    if f.closed:
        return FrenetData(
            rho1=GridSeq(np.roll(rho1, 1), Grid.VERTEX, topo),  # rho1 slot k+1
            rho2=GridSeq(rho2, Grid.VERTEX, topo),
            tau=GridSeq(tau, Grid.SIDE, topo),
            c=rep.c_hat,
            residual=GridSeq(res, Grid.SIDE, topo),
            tau_gap=GridSeq(gap, Grid.SIDE, topo),
        )
    base = int(slots[0])
    return FrenetData(
        rho1=GridSeq(rho1, Grid.VERTEX, topo, base + 1),
        rho2=GridSeq(rho2, Grid.VERTEX, topo, base),
        tau=GridSeq(tau, Grid.SIDE, topo, base),
        c=rep.c_hat,
        residual=GridSeq(res, Grid.SIDE, topo, base),
        tau_gap=GridSeq(gap, Grid.SIDE, topo, base),
    )


def _silhouette_frame(p: Polygon3, origin) -> tuple[FramedPolygon, DarbouxField]:
    """Centro-affine framing: directions through the base point, sigma = -1."""
    o = np.asarray(origin, dtype=float)
    pts = p.points
    f = FramedPolygon.silhouette(pts, o, closed=p.closed)
    topo = p.vertices.topology
    xi = GridSeq(pts - o, Grid.VERTEX, topo)
    nsides = len(pts) if p.closed else len(pts) - 1
    sigma = GridSeq(np.full(nsides, -1.0), Grid.SIDE, topo)
    return f, DarbouxField(xi, sigma, 1.0 if p.closed else None)


def centroaffine_frenet(p: Polygon3, origin=(0.0, 0.0, 0.0),
                        mode: SolveMode = SolveMode.EXACT,
                        method: str = "determinant") -> FrenetData:
    """Frenet data of a polygon in the centro-affine setting.

    ``method="determinant"`` uses closed-form bracket identities (valid
    for exactly constant volumes, Exact mode only); ``method="solve"``
    goes through the generic per-side 2x2 path.  Both are exposed so they
    can be cross-checked.
    """
    f, df = _silhouette_frame(p, origin)
    if method == "solve" or mode is not SolveMode.EXACT:
        return frenet(f, df, mode)

    rep = centroaffine_volumes(p, origin)
    if rep.spread > EQUAL_VOLUME_TOL:
        raise NotEqualVolumeError(
            f"volume spread {rep.spread:.3e} exceeds {EQUAL_VOLUME_TOL:.0e}")
    c = rep.c_hat
    q = p.points - np.asarray(origin, dtype=float)
    n = len(q)
    d3, slots = _third_diffs(q, p.closed)
    m = len(slots)
    rho1 = np.empty(m)
    rho2 = np.empty(m)
    tau = np.empty(m)
    for j, k in enumerate(slots):
        d_a = det3(q[(k - 1) % n], q[k % n], q[(k + 2) % n])
        d_b = det3(q[(k + 2) % n], q[(k + 1) % n], q[(k - 1) % n])
        rho2[j] = 3.0 + d_b / c
        rho1[j] = 3.0 - d_a / c          # value at vertex k+1
        tau[j] = (d_a + d_b) / c
    topo = p.vertices.topology
    zeros = np.zeros(m)
    if p.closed:
        return FrenetData(GridSeq(np.roll(rho1, 1), Grid.VERTEX, topo),
                          GridSeq(rho2, Grid.VERTEX, topo),
                          GridSeq(tau, Grid.SIDE, topo), c,
                          GridSeq(zeros, Grid.SIDE, topo),
                          GridSeq(zeros, Grid.SIDE, topo))
    base = int(slots[0])
    return FrenetData(GridSeq(rho1, Grid.VERTEX, topo, base + 1),
                      GridSeq(rho2, Grid.VERTEX, topo, base),
                      GridSeq(tau, Grid.SIDE, topo, base), c,
                      GridSeq(zeros, Grid.SIDE, topo, base),
                      GridSeq(zeros, Grid.SIDE, topo, base))


def lambda_from_tau(tau: GridSeq, anchor_index: int, anchor_value: float,
                    closed_tol: float = 1e-9) -> GridSeq:
    """Anti-difference gauge: lambda(i) - lambda(i+1) = tau(side i)."""
    t = tau.values
    if tau.topology is Topology.CLOSED:
        total = float(t.sum())
        scale = float(np.abs(t).sum()) or 1.0
        if abs(total) > closed_tol * scale:
            raise GaugeObstructionError(total)
        lam = np.empty(len(t))
        lam[anchor_index % len(t)] = anchor_value
        n = len(t)
        for j in range(1, n):
            i = (anchor_index + j) % n
            lam[i] = lam[(i - 1) % n] - t[(i - 1) % n]
        return GridSeq(lam, Grid.VERTEX, Topology.CLOSED)
    # open: lambda lives on vertices base .. base+len(tau)
    base = tau.base
    m = len(t) + 1
    j0 = anchor_index - base
    if not 0 <= j0 < m:
        raise GeometryError(f"anchor {anchor_index} outside gauge window [{base}, {base + m})")
    lam = np.empty(m)
    lam[j0] = anchor_value
    for j in range(j0 + 1, m):
        lam[j] = lam[j - 1] - t[j - 1]
    for j in range(j0 - 1, -1, -1):
        lam[j] = lam[j + 1] + t[j]
    return GridSeq(lam, Grid.VERTEX, tau.topology, base)


@dataclass(frozen=True)
class FocalSetData:
    lam: GridSeq
    eta: GridSeq
    mu: GridSeq
    Q: GridSeq
    O: GridSeq
    lines: list
    gauge_anchor: tuple
    at_infinity_O: list
    at_infinity_Q: list


def focal_data(f: FramedPolygon, df: DarbouxField, fr: FrenetData,
               gauge: tuple[int, float] | None = None,
               agreement_tol: float = 1e-9) -> FocalSetData:
    """Gauge field, parallel normal vectors and the focal lines.

    ``gauge`` anchors the lambda anti-difference (defaults to value 0 at
    the first admissible vertex).  Per side the focal line joins the
    support-line intersection O with the point Q where the parallel
    normal vectors through the two end vertices meet.
    """
    p = f.polygon.points
    n = len(p)
    closed = f.closed
    xi = df.xi.values
    sigma = df.sigma

    if gauge is None:
        gauge = (0 if closed else fr.tau.base, 0.0)
    lam = lambda_from_tau(fr.tau, gauge[0], gauge[1])

    # eta(i) = phi''(i) + lambda(i) xi(i) on the gauge window
    eta_vals = []
    for i in lam.slots:
        pp = p[(i + 1) % n] - 2 * p[i % n] + p[(i - 1) % n]
        eta_vals.append(pp + lam.at(int(i)) * xi[i % n])
    eta_vals = np.asarray(eta_vals)
    eta = GridSeq(eta_vals, Grid.VERTEX, lam.topology, lam.base)

    # mu per side, from both end expansions
    mu_vals = []
    mu_slots = fr.tau.slots
    for k in mu_slots:
        s = sigma.at(int(k))
        m_a = fr.rho1.at(int(k) + 1) + s * lam.at(int(k) + 1) if not closed else \
            fr.rho1.values[(k + 1) % n] + s * lam.values[(k + 1) % n]
        m_b = fr.rho2.at(int(k)) + s * lam.at(int(k)) if not closed else \
            fr.rho2.values[k % n] + s * lam.values[k % n]
        gap = abs(m_a - m_b)
        if gap > agreement_tol * max(1.0, abs(m_a)):
            raise GeometryError(f"side {int(k)}: the two mu evaluations disagree by {gap:.3e}")
        mu_vals.append(0.5 * (m_a + m_b))
    mu_vals = np.asarray(mu_vals)
    mu = GridSeq(mu_vals, Grid.SIDE, fr.tau.topology, fr.tau.base)

    O_all, inf_O = osculating_points(f, df)
    scale = f.polygon.diameter()

    q_pts = np.full((len(mu_slots), 3), np.nan)
    inf_Q = []
    lines = []
    for j, k in enumerate(mu_slots):
        k = int(k)
        m = mu_vals[j]
        e_near = eta.at(k) if not closed else eta.values[k % n]
        e_far = eta.at(k + 1) if not closed else eta.values[(k + 1) % n]
        if m == 0.0 or not np.isfinite(1.0 / m):
            inf_Q.append(k)
            o_here = O_all.at(k) if k not in inf_O else None
            if o_here is not None:
                d = e_near / np.linalg.norm(e_near)
                lines.append((np.asarray(o_here), d))
            else:
                lines.append(None)
            continue
        q1 = p[k % n] + e_near / m
        q2 = p[(k + 1) % n] + e_far / m
        gapq = np.linalg.norm(q1 - q2)
        ref = max(np.linalg.norm(q1 - p[k % n]), scale)
        if gapq > agreement_tol * ref:
            raise GeometryError(f"side {k}: the two Q evaluations disagree by {gapq:.3e}")
        q_pts[j] = 0.5 * (q1 + q2)
        if k in inf_O:
            lines.append((q_pts[j], xi[k % n] / np.linalg.norm(xi[k % n])))
        else:
            o_here = np.asarray(O_all.at(k))
            d = q_pts[j] - o_here
            nd = np.linalg.norm(d)
            if nd == 0.0:
                # O and Q coincide; the line direction degenerates to eta
                d = e_near
                nd = np.linalg.norm(d)
            lines.append((o_here, d / nd))

    Q = GridSeq(q_pts, Grid.SIDE, fr.tau.topology, fr.tau.base, finite=not inf_Q)
    return FocalSetData(lam, eta, mu, Q, O_all, lines, gauge, inf_O, inf_Q)


def focal_set_mesh(fd: FocalSetData, extent: float | None = None) -> Mesh:
    """Mesh of the focal set: one planar face per interior vertex.

    Each face lies in that vertex's affine normal plane, bounded by the
    two adjacent focal lines; each line is sampled between its O and Q
    anchor points extended by ``extent`` on both ends.
    """
    usable = [(int(k), ln) for k, ln in zip(fd.mu.slots, fd.lines) if ln is not None]
    if extent is None:
        anchors = [ln[0] for _, ln in usable]
        span = np.ptp(np.asarray(anchors), axis=0) if anchors else np.ones(3)
        extent = 2.0 * max(float(np.linalg.norm(span)), 1.0)

    by_slot = dict(usable)
    verts: list = []
    faces = []
    lines_idx = []
    closed = fd.mu.topology is Topology.CLOSED
    n = len(fd.mu.values) if closed else None

    def line_points(k):
        origin, d = by_slot[k]
        j = list(fd.mu.slots).index(k)
        q = fd.Q.values[j]
        if np.all(np.isfinite(q)):
            t_q = float(np.dot(q - origin, d))
        else:
            t_q = 0.0
        lo, hi = min(0.0, t_q) - extent, max(0.0, t_q) + extent
        return origin + lo * d, origin + hi * d

    slots = sorted(by_slot)
    for k in slots:
        a, b = line_points(k)
        base_idx = len(verts)
        verts.extend([a, b])
        lines_idx.append([base_idx, base_idx + 1])

    pos = {k: 2 * j for j, k in enumerate(slots)}
    for k in slots:
        k_next = (k + 1) % n if closed else k + 1
        if k_next in by_slot:
            i0, i1 = pos[k], pos[k_next]
            faces.append([i0, i0 + 1, i1 + 1, i1])
    return Mesh(np.asarray(verts), faces, lines_idx)


class FocalKind(enum.Enum):
    SINGLE_LINE = "single_line"
    GENERAL = "general"


@dataclass(frozen=True)
class FocalClass:
    kind: FocalKind
    sigma_spread: float
    mu_spread: float
    line: tuple | None = None


def _rel_spread(x: np.ndarray) -> float:
    med = float(np.median(np.abs(x)))
    if med == 0.0:
        return 0.0 if np.allclose(x, 0.0) else np.inf
    return float((x.max() - x.min()) / med)


def classify_focal(df: DarbouxField, fd: FocalSetData,
                   tol: float = 1e-6) -> FocalClass:
    """Single-line focal set iff both sigma and mu have constant sign pattern."""
    mu_window = fd.mu.values
    if fd.mu.topology is Topology.CLOSED:
        sg = df.sigma.values
    else:
        sg = np.array([df.sigma.at(int(k)) for k in fd.mu.slots])
    s_spread = _rel_spread(sg)
    m_spread = _rel_spread(mu_window)
    if s_spread <= tol and m_spread <= tol:
        finite = [ln for ln in fd.lines if ln is not None]
        origin = np.mean([ln[0] for ln in finite], axis=0)
        d = np.mean([ln[1] * np.sign(np.dot(ln[1], finite[0][1])) for ln in finite], axis=0)
        d /= np.linalg.norm(d)
        return FocalClass(FocalKind.SINGLE_LINE, s_spread, m_spread, (origin, d))
    return FocalClass(FocalKind.GENERAL, s_spread, m_spread)


@dataclass(frozen=True)
class PlanarReduction:
    equal_area: bool
    area_constant: float
    area_spread: float
    rho: GridSeq
    evolute: np.ndarray
    frame: tuple


def planar_reduction(p: Polygon3, normal, tol: float = 1e-9) -> PlanarReduction:
    """Equal-area check, affine curvature and evolute of a planar polygon.

    The polygon must lie in a plane with the given normal.  Curvature
    solves  phi'''(k) = -rho(k) * phi'(k)  per side in plane coordinates;
    the evolute vertices are  phi(k) + phi''(k)/rho(k)  mapped back to
    3-space.
    """
    nrm = np.asarray(normal, dtype=float)
    nrm = nrm / np.linalg.norm(nrm)
    pts = p.points
    c0 = pts.mean(axis=0)
    offsets = (pts - c0) @ nrm
    if np.max(np.abs(offsets)) > tol * max(p.diameter(), 1.0):
        raise GeometryError("polygon is not planar to tolerance")

    # in-plane orthonormal frame
    u = np.eye(3)[int(np.argmin(np.abs(nrm)))]
    u = u - np.dot(u, nrm) * nrm
    u /= np.linalg.norm(u)
    v = np.cross(nrm, u)
    xy = np.stack([(pts - c0) @ u, (pts - c0) @ v], axis=1)

    closed = p.closed
    n = len(xy)
    if closed:
        e = np.roll(xy, -1, axis=0) - xy
        areas = det2(np.roll(e, 1, axis=0), e)
    else:
        e = xy[1:] - xy[:-1]
        areas = det2(e[:-1], e[1:])
    a_hat = float(np.median(areas))
    spread = float(np.max(np.abs(areas - a_hat)) / abs(a_hat)) if a_hat != 0 else np.inf
    equal_area = spread <= 1e-8

    d3, slots = _third_diffs(xy, closed)
    rho = np.empty(len(slots))
    q_pts = []
    for j, k in enumerate(slots):
        edge = xy[(k + 1) % n] - xy[k % n]
        rho[j] = -float(np.dot(d3[j], edge) / np.dot(edge, edge))
        pp = xy[(k + 1) % n] - 2 * xy[k % n] + xy[(k - 1) % n]
        if rho[j] != 0.0:
            ev = xy[k % n] + pp / rho[j]
            q_pts.append(c0 + ev[0] * u + ev[1] * v)
    topo = p.vertices.topology
    rho_seq = GridSeq(rho, Grid.SIDE, topo, 0 if closed else int(slots[0]))
    return PlanarReduction(equal_area, a_hat, spread, rho_seq,
                           np.asarray(q_pts), (c0, u, v, nrm))


@dataclass(frozen=True)
class MuPrimeReport:
    residual_rho1: np.ndarray
    residual_rho2: np.ndarray
    mu_prime: np.ndarray

    @property
    def max_residual(self) -> float:
        vals = np.concatenate([self.residual_rho1, self.residual_rho2])
        return float(vals.max()) if vals.size else 0.0


def mu_prime_check(fr: FrenetData, fd: FocalSetData, sigma: GridSeq) -> MuPrimeReport:
    """Check mu'(i) = rho1'(i+1/2) - sigma tau(i+1/2), and the rho2 twin.

    mu' at a vertex is the difference of mu over its two adjacent sides.
    The identity assumes sigma is constant along the polygon (silhouette
    or cone framing); for sigma = -1 it reads mu' = rho' + tau.
    """
    closed = fr.topology is Topology.CLOSED
    mu = fd.mu
    tau = fr.tau
    r1 = fr.rho1
    r2 = fr.rho2
    res1 = []
    res2 = []
    mp_list = []
    if closed:
        n = len(mu.values)
        sg = sigma.values
        for i in range(n):
            mp = mu.values[i] - mu.values[(i - 1) % n]
            e1 = abs(mp - (r1.values[(i + 1) % n] - r1.values[i]
                           - sg[i] * tau.values[i]))
            e2 = abs(mp - (r2.values[i] - r2.values[(i - 1) % n]
                           - sg[(i - 1) % n] * tau.values[(i - 1) % n]))
            res1.append(e1)
            res2.append(e2)
            mp_list.append(mp)
    else:
        lo = mu.base + 1
        hi = mu.base + len(mu.values)
        for i in range(lo, hi):
            mp = mu.at(i) - mu.at(i - 1)
            e1 = abs(mp - (r1.at(i + 1) - r1.at(i) - sigma.at(i) * tau.at(i)))
            e2 = abs(mp - (r2.at(i) - r2.at(i - 1) - sigma.at(i - 1) * tau.at(i - 1)))
            res1.append(e1)
            res2.append(e2)
            mp_list.append(mp)
    return MuPrimeReport(np.asarray(res1), np.asarray(res2), np.asarray(mp_list))
