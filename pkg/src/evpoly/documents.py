"""Reading and writing polygon documents.

The interchange format is a single JSON object: kind ("polygon3",
"polygon2", "framed3"), closed flag, vertex list, optional per-vertex
directions (framed3), grid ("vertex" or "side") and a free-form metadata
map.  Floats are serialized with shortest round-trip repr, so write then
read reproduces coordinates bit-exactly.  Bare CSV vertex lists (one
vertex per line) are also accepted on input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import GeometryError, Polygon3
from .darboux import FramedPolygon

__all__ = ["PolygonDocument", "DocumentError", "read_document", "write_document"]

KINDS = ("polygon3", "polygon2", "framed3")
ARITY = {"polygon3": 3, "polygon2": 2, "framed3": 3}


class DocumentError(GeometryError):
    """Malformed polygon document."""


@dataclass
class PolygonDocument:
    kind: str
    closed: bool
    vertices: np.ndarray
    directions: np.ndarray | None = None
    grid: str = "vertex"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DocumentError(f"unknown kind {self.kind!r}")
        self.vertices = np.asarray(self.vertices, dtype=float)
        if self.vertices.ndim != 2 or len(self.vertices) == 0:
            raise DocumentError("vertices must be a nonempty list of coordinates")
        if self.vertices.shape[1] != ARITY[self.kind]:
            raise DocumentError(
                f"{self.kind} needs {ARITY[self.kind]}-vectors, "
                f"got arity {self.vertices.shape[1]}")
        if self.kind == "framed3":
            if self.directions is None:
                raise DocumentError("framed3 document needs directions")
            self.directions = np.asarray(self.directions, dtype=float)
            if self.directions.shape != self.vertices.shape:
                raise DocumentError("directions must match vertices in shape")
        elif self.directions is not None:
            raise DocumentError(f"{self.kind} does not carry directions")
        if self.grid not in ("vertex", "side"):
            raise DocumentError(f"unknown grid {self.grid!r}")
        if not np.all(np.isfinite(self.vertices)):
            raise DocumentError("non-finite vertex coordinate")

    def to_polygon(self) -> Polygon3:
        if self.kind == "polygon2":
            raise DocumentError("document holds a planar polygon, not a space polygon")
        return Polygon3.from_points(self.vertices, closed=self.closed)

    def to_framed(self) -> FramedPolygon:
        if self.kind != "framed3":
            raise DocumentError("document carries no frame directions")
        return FramedPolygon.build(self.vertices, self.directions, closed=self.closed)

    @classmethod
    def from_polygon(cls, p: Polygon3, metadata=None) -> "PolygonDocument":
        return cls("polygon3", p.closed, p.points, metadata=dict(metadata or {}))

    @classmethod
    def from_framed(cls, f: FramedPolygon, metadata=None) -> "PolygonDocument":
        return cls("framed3", f.closed, f.polygon.points,
                   f.directions.values, metadata=dict(metadata or {}))


def write_document(doc: PolygonDocument, path) -> None:
    payload = {
        "kind": doc.kind,
        "closed": doc.closed,
        "grid": doc.grid,
        "vertices": doc.vertices.tolist(),
        "metadata": doc.metadata,
    }
    if doc.directions is not None:
        payload["directions"] = doc.directions.tolist()
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def _read_csv(text: str) -> PolygonDocument:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(x) for x in line.replace(",", " ").split()])
        except ValueError as exc:
            raise DocumentError(f"line {lineno}: not a coordinate row") from exc
    if not rows:
        raise DocumentError("empty vertex list")
    arity = len(rows[0])
    if any(len(r) != arity for r in rows):
        raise DocumentError("inconsistent coordinate arity")
    if arity == 2:
        return PolygonDocument("polygon2", False, np.asarray(rows))
    if arity == 3:
        return PolygonDocument("polygon3", False, np.asarray(rows))
    raise DocumentError(f"unsupported coordinate arity {arity}")


def read_document(path) -> PolygonDocument:
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if not stripped:
        raise DocumentError("empty document")
    if stripped[0] != "{":
        return _read_csv(text)
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise DocumentError("document must be a JSON object")
    try:
        return PolygonDocument(
            kind=payload["kind"],
            closed=bool(payload.get("closed", False)),
            vertices=payload["vertices"],
            directions=payload.get("directions"),
            grid=payload.get("grid", "vertex"),
            metadata=payload.get("metadata", {}),
        )
    except KeyError as exc:
        raise DocumentError(f"missing field {exc.args[0]!r}") from exc
