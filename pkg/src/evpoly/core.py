"""Geometric primitives and half-integer grid sequence calculus.

Index conventions (0-based everywhere):

* A polygon has vertices ``0 .. N-1``.
* Side ``k`` joins vertices ``k`` and ``k+1`` (``(k+1) % N`` when closed).
  A quantity living "between" vertices is stored on the side grid at the
  integer slot of its left vertex.
* Differencing moves a sequence to the opposite grid.  For open sequences
  the result is one entry shorter and its ``base`` index records which
  polygon slot its first entry belongs to, so windows of derived
  quantities (third differences, Frenet coefficients, ...) stay aligned
  without padding.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid",
    "Topology",
    "GridSeq",
    "Polygon3",
    "GeometryError",
    "DegenerateVertexError",
    "det2",
    "det3",
    "forward_diff",
    "second_diff",
    "third_diff",
]


class GeometryError(ValueError):
    """Base class for geometric/numeric failures in this package."""


class DegenerateVertexError(GeometryError):
    """Consecutive polygon vertices coincide."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"vertices {index} and {index + 1} coincide")


class Grid(enum.Enum):
    VERTEX = "vertex"
    SIDE = "side"

    def other(self) -> "Grid":
        return Grid.SIDE if self is Grid.VERTEX else Grid.VERTEX


class Topology(enum.Enum):
    OPEN = "open"
    CLOSED = "closed"


def _as_array(values) -> np.ndarray:
    a = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(a)):
        raise GeometryError("non-finite value in sequence")
    return a


@dataclass(frozen=True)
class GridSeq:
    """Immutable sequence of scalars or small vectors on a half-integer grid.

    ``values`` has shape ``(n,)`` for scalars or ``(n, d)`` for points in
    d-space.  ``base`` is the polygon slot of entry 0 (always 0 for closed
    sequences).
    """

    values: np.ndarray
    grid: Grid
    topology: Topology = Topology.OPEN
    base: int = 0
    finite: bool = True

    def __post_init__(self):
        if self.finite:
            a = _as_array(self.values)
        else:
            # NaN rows mark points at infinity (e.g. parallel support lines)
            a = np.asarray(self.values, dtype=float)
        a.flags.writeable = False
        object.__setattr__(self, "values", a)
        if self.topology is Topology.CLOSED and self.base != 0:
            raise GeometryError("closed sequences must have base 0")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def slots(self) -> np.ndarray:
        """Polygon slots of each entry."""
        return self.base + np.arange(len(self.values))

    def at(self, slot: int) -> np.ndarray | float:
        """Value at a given polygon slot (mod N when closed)."""
        if self.topology is Topology.CLOSED:
            return self.values[slot % len(self.values)]
        j = slot - self.base
        if not 0 <= j < len(self.values):
            raise IndexError(f"slot {slot} outside [{self.base}, {self.base + len(self.values)})")
        return self.values[j]

    def with_values(self, values) -> "GridSeq":
        return GridSeq(values, self.grid, self.topology, self.base)


def det3(u, v, w) -> float | np.ndarray:
    """Signed volume of the parallelepiped spanned by three 3-vectors.

    Accepts stacked arrays of shape (..., 3) and broadcasts.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    r = (u[..., 0] * (v[..., 1] * w[..., 2] - v[..., 2] * w[..., 1])
         - u[..., 1] * (v[..., 0] * w[..., 2] - v[..., 2] * w[..., 0])
         + u[..., 2] * (v[..., 0] * w[..., 1] - v[..., 1] * w[..., 0]))
    return float(r) if r.ndim == 0 else r


def det2(u, v) -> float | np.ndarray:
    """Signed area of the parallelogram spanned by two 2-vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    r = u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
    return float(r) if r.ndim == 0 else r


def forward_diff(s: GridSeq) -> GridSeq:
    """First difference; output lives on the opposite grid.

    Open input of length n yields n-1 entries; closed yields n (wrapping).
    A vertex-grid difference lands on the side to its right (same base);
    a side-grid difference lands on the vertex between the two sides
    (base shifts by one).
    """
    a = s.values
    if len(a) < 2:
        raise GeometryError("need at least 2 entries to difference")
    if s.topology is Topology.CLOSED:
        d = np.roll(a, -1, axis=0) - a
        if s.grid is Grid.SIDE:
            d = a - np.roll(a, 1, axis=0)
        return GridSeq(d, s.grid.other(), s.topology, 0)
    d = a[1:] - a[:-1]
    base = s.base if s.grid is Grid.VERTEX else s.base + 1
    return GridSeq(d, s.grid.other(), s.topology, base)


def second_diff(s: GridSeq) -> GridSeq:
    """Difference applied twice; returns to the same grid."""
    if len(s.values) < 3:
        raise GeometryError("need at least 3 entries for a second difference")
    return forward_diff(forward_diff(s))


def third_diff(s: GridSeq) -> GridSeq:
    if len(s.values) < 4:
        raise GeometryError("need at least 4 entries for a third difference")
    return forward_diff(second_diff(s))


@dataclass(frozen=True)
class Polygon3:
    """Ordered vertices in 3-space on the vertex grid."""

    vertices: GridSeq

    def __post_init__(self):
        v = self.vertices
        if v.grid is not Grid.VERTEX:
            raise GeometryError("polygon vertices must live on the vertex grid")
        a = v.values
        if a.ndim != 2 or a.shape[1] != 3:
            raise GeometryError("polygon vertices must be 3-vectors")
        d = np.roll(a, -1, axis=0) - a if v.topology is Topology.CLOSED else a[1:] - a[:-1]
        norms = np.linalg.norm(d, axis=1)
        bad = np.nonzero(norms == 0.0)[0]
        if bad.size:
            raise DegenerateVertexError(int(bad[0]))

    @classmethod
    def from_points(cls, points, closed: bool = False) -> "Polygon3":
        topo = Topology.CLOSED if closed else Topology.OPEN
        return cls(GridSeq(points, Grid.VERTEX, topo))

    @property
    def points(self) -> np.ndarray:
        return self.vertices.values

    @property
    def topology(self) -> Topology:
        return self.vertices.topology

    @property
    def closed(self) -> bool:
        return self.vertices.topology is Topology.CLOSED

    def __len__(self) -> int:
        return len(self.vertices)

    def sides(self) -> GridSeq:
        """Edge vectors on the side grid."""
        return forward_diff(self.vertices)

    def diameter(self) -> float:
        p = self.points
        return float(np.linalg.norm(p.max(axis=0) - p.min(axis=0)))
