"""Triangle meshes: ASCII OBJ/PLY loading, validation, normals, icosphere."""

from dataclasses import dataclass, field

import numpy as np

from .errors import MeshValidationError, TopologyError


@dataclass
class TriangleMesh:
    """Indexed triangle mesh with optional per-vertex normals."""

    vertices: np.ndarray
    triangles: np.ndarray
    vertex_normals: np.ndarray = field(default=None)

    def __post_init__(self):
        self.vertices = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        self.triangles = np.atleast_2d(np.asarray(self.triangles, dtype=int))
        if self.vertices.shape[1] != 3:
            raise MeshValidationError("vertices must be 3-vectors")
        if len(self.triangles) and self.triangles.shape[1] != 3:
            raise MeshValidationError("triangles must be vertex index triples")
        if len(self.triangles):
            if self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices):
                raise MeshValidationError("triangle vertex index out of range")
        areas = self.face_areas()
        if np.any(areas <= 0.0):
            raise MeshValidationError(
                f"{int(np.count_nonzero(areas <= 0))} degenerate triangle(s)"
            )

    def face_normals_scaled(self):
        """Face normals scaled by twice the face area (cross products)."""
        v = self.vertices
        t = self.triangles
        return np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])

    def face_areas(self):
        return 0.5 * np.linalg.norm(self.face_normals_scaled(), axis=1)

    def require_closed(self):
        """Raise TopologyError unless every edge is shared by exactly 2 faces."""
        edges = {}
        for tri in self.triangles:
            for a in range(3):
                key = tuple(sorted((int(tri[a]), int(tri[(a + 1) % 3]))))
                edges[key] = edges.get(key, 0) + 1
        bad = [e for e, c in edges.items() if c != 2]
        if bad:
            raise TopologyError(
                f"mesh is not closed: {len(bad)} edge(s) not shared by exactly "
                f"two triangles (e.g. {bad[0]})"
            )

    def normals(self):
        """Per-vertex unit normals, area-weighted if not supplied."""
        if self.vertex_normals is not None:
            n = np.asarray(self.vertex_normals, dtype=float)
            return n / np.linalg.norm(n, axis=1, keepdims=True)
        n = np.zeros_like(self.vertices)
        fn = self.face_normals_scaled()  # area weighting comes for free
        for k in range(3):
            np.add.at(n, self.triangles[:, k], fn)
        norms = np.linalg.norm(n, axis=1, keepdims=True)
        if np.any(norms == 0):
            raise MeshValidationError("vertex with zero accumulated normal")
        return n / norms


def load_mesh(path):
    """Load an ASCII OBJ or PLY triangle mesh by file extension."""
    path = str(path)
    if path.lower().endswith(".obj"):
        return load_obj(path)
    if path.lower().endswith(".ply"):
        return load_ply(path)
    raise MeshValidationError(f"unsupported mesh format: {path}")


def load_obj(path):
    vertices, normals, faces = [], [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                vertices.append([float(x) for x in parts[1:4]])
            elif parts[0] == "vn":
                normals.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = [int(p.split("/")[0]) - 1 for p in parts[1:]]
                if len(idx) != 3:
                    raise MeshValidationError("only triangle faces are supported")
                faces.append(idx)
    vn = np.asarray(normals) if len(normals) == len(vertices) and normals else None
    return TriangleMesh(np.asarray(vertices), np.asarray(faces, dtype=int),
                        vertex_normals=vn)


def load_ply(path):
    with open(path) as fh:
        line = fh.readline().strip()
        if line != "ply":
            raise MeshValidationError("not a PLY file")
        n_vert = n_face = 0
        vertex_props = []
        current = None
        while True:
            line = fh.readline()
            if not line:
                raise MeshValidationError("unexpected end of PLY header")
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "format" and parts[1] != "ascii":
                raise MeshValidationError("only ASCII PLY is supported")
            if parts[0] == "element":
                current = parts[1]
                if current == "vertex":
                    n_vert = int(parts[2])
                elif current == "face":
                    n_face = int(parts[2])
            elif parts[0] == "property" and current == "vertex":
                vertex_props.append(parts[-1])
            elif parts[0] == "end_header":
                break
        rows = [fh.readline().split() for _ in range(n_vert)]
        data = np.asarray(rows, dtype=float)
        cols = {name: k for k, name in enumerate(vertex_props)}
        vertices = data[:, [cols["x"], cols["y"], cols["z"]]]
        vn = None
        if all(c in cols for c in ("nx", "ny", "nz")):
            vn = data[:, [cols["nx"], cols["ny"], cols["nz"]]]
        faces = []
        for _ in range(n_face):
            parts = fh.readline().split()
            if int(parts[0]) != 3:
                raise MeshValidationError("only triangle faces are supported")
            faces.append([int(p) for p in parts[1:4]])
    return TriangleMesh(vertices, np.asarray(faces, dtype=int), vertex_normals=vn)


def save_obj(mesh, path):
    with open(path, "w") as fh:
        for v in mesh.vertices:
            fh.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in mesh.triangles:
            fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")


def icosphere(subdivisions=2, radius=1.0):
    """Subdivided icosahedron projected onto a sphere (closed, outward)."""
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=float)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=int)
    for _ in range(subdivisions):
        cache = {}
        new_faces = []
        verts_list = list(verts)

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = verts_list[a] + verts_list[b]
                m /= np.linalg.norm(m)
                cache[key] = len(verts_list)
                verts_list.append(m)
            return cache[key]

        for f in faces:
            a, b, c = (int(x) for x in f)
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        verts = np.asarray(verts_list)
        faces = np.asarray(new_faces, dtype=int)
    return TriangleMesh(radius * verts, faces)
