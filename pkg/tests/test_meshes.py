import numpy as np
import pytest

from evpoly.core import GeometryError
from evpoly.meshes import Mesh


def test_obj_export(tmp_path):
    mesh = Mesh(np.array([[0., 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]),
                faces=[[0, 1, 2, 3]], lines=[[0, 2]])
    path = tmp_path / "m.obj"
    mesh.write_obj(path)
    lines = path.read_text().splitlines()
    assert lines[1] == "v 0 0 0"
    assert "f 1 2 3 4" in lines
    assert "l 1 3" in lines


def test_obj_roundtrip_precision(tmp_path):
    v = np.array([[np.pi, np.e, 1 / 3]])
    mesh = Mesh(v, faces=[], lines=[])
    path = tmp_path / "m.obj"
    mesh.write_obj(path)
    rec = [float(x) for x in path.read_text().splitlines()[1].split()[1:]]
    assert np.array_equal(np.array(rec), v[0])


def test_face_planarity():
    flat = Mesh(np.array([[0., 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]),
                faces=[[0, 1, 2, 3]])
    assert flat.face_planarity()[0] == pytest.approx(0.0, abs=1e-14)
    bent = Mesh(np.array([[0., 0, 0], [1, 0, 0], [1, 1, 0.5], [0, 1, 0]]),
                faces=[[0, 1, 2, 3]])
    assert bent.face_planarity()[0] > 0.1


def test_index_validation():
    with pytest.raises(GeometryError):
        Mesh(np.zeros((2, 3)), faces=[[0, 1, 5]])
    with pytest.raises(GeometryError):
        Mesh(np.zeros((3, 3)), faces=[[0, 1]])
