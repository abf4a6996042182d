"""Minimal polygonal mesh container with OBJ export.

Holds the ruled surfaces produced by the Darboux and focal-set
constructions.  Faces are planar index loops; standalone lines (OBJ
``l`` records) carry degenerate geometry such as a single focal line.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import GeometryError

__all__ = ["Mesh"]


@dataclass
class Mesh:
    vertices: np.ndarray
    faces: list
    lines: list = field(default_factory=list)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        n = len(self.vertices)
        for face in self.faces:
            if len(face) < 3:
                raise GeometryError("mesh face needs at least 3 vertices")
            if any(not 0 <= i < n for i in face):
                raise GeometryError("face index out of range")
        for line in self.lines:
            if any(not 0 <= i < n for i in line):
                raise GeometryError("line index out of range")

    def face_planarity(self) -> np.ndarray:
        """Max distance of each face's vertices from its best-fit plane."""
        out = np.zeros(len(self.faces))
        for j, face in enumerate(self.faces):
            pts = self.vertices[list(face)]
            c = pts.mean(axis=0)
            q = pts - c
            _, s, _ = np.linalg.svd(q, full_matrices=False)
            out[j] = s[-1] if len(s) == 3 else 0.0
        return out

    def write_obj(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("# evpoly mesh\n")
            for v in self.vertices:
                fh.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
            for face in self.faces:
                fh.write("f " + " ".join(str(i + 1) for i in face) + "\n")
            for line in self.lines:
                fh.write("l " + " ".join(str(i + 1) for i in line) + "\n")
