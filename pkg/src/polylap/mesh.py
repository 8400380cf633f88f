"""Cotangent Laplacians of planar triangulations.

A triangulated planar region gets the classic cotangent-weight Laplacian:
the weight of an interior edge is the sum of the cotangents of the two
angles facing it, and of the single facing angle for a boundary edge.  Two
conventions are supported: FULL uses that sum as is (matching the cyclic
polygon matrices of :mod:`polylap.cyclic` when the mesh triangulates a
cyclic polygon), HALF halves it (matching the Dirichlet energy
``1/2 * integral |grad f|^2`` of piecewise-linear interpolation).

A corollary drives several cross checks here: every diagonal of a polygon
inscribed in a circle has total weight zero, because the two angles facing
an inscribed chord sum to pi.  Hence the Laplace matrix of a cyclic
polygon does not depend on which triangulation produced it.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .cyclic import ArcProfile, LaplaceMatrix, _readonly
from .errors import DegenerateFace, EdgeNotFound, LengthMismatch

# Triangle corner angles this close to 0 or pi mean a numerically collapsed
# face; refuse to build weights from them.
DEGENERATE_ANGLE = 1e-12


class WeightConvention(enum.Enum):
    """Edge-weight scaling of the mesh Laplacian."""

    FULL = "full"
    HALF = "half"


class TriMesh:
    """Planar triangle mesh given by vertex coordinates and face triples.

    Parameters
    ----------
    vertices : (V, 2) array_like
        Vertex coordinates.
    faces : (F, 3) array_like of int
        Counterclockwise vertex index triples.

    Raises
    ------
    ValueError
        Malformed arrays, out-of-range or repeated indices, or an edge
        shared by more than two faces.
    """

    def __init__(self, vertices, faces):
        self.vertices = np.asarray(vertices, dtype=float)
        self.faces = np.asarray(faces, dtype=int)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2:
            raise ValueError("vertices must be a (V, 2) array")
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise ValueError("faces must be an (F, 3) array")
        if self.faces.size and (
            self.faces.min() < 0 or self.faces.max() >= len(self.vertices)
        ):
            raise ValueError("face index out of range")
        for tri in self.faces:
            if len(set(tri)) != 3:
                raise ValueError(f"degenerate face {tri.tolist()}")
        self.vertices.flags.writeable = False
        self.faces.flags.writeable = False
        # edge -> list of (face index, opposite vertex); sorted vertex pair key
        edges: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for fi, (i, j, k) in enumerate(self.faces):
            for u, v, w in ((i, j, k), (j, k, i), (k, i, j)):
                key = (u, v) if u < v else (v, u)
                edges.setdefault(key, []).append((fi, w))
        for key, inc in edges.items():
            if len(inc) > 2:
                raise ValueError(f"edge {key} shared by {len(inc)} faces")
        self._edges = edges

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def edges(self):
        """Sorted-pair edge keys, in deterministic order."""
        return sorted(self._edges)

    def edge_faces(self, i: int, j: int):
        """The (face, opposite vertex) pairs incident to edge {i, j}."""
        key = (i, j) if i < j else (j, i)
        try:
            return list(self._edges[key])
        except KeyError:
            raise EdgeNotFound(f"no edge between vertices {i} and {j}") from None


class PLFunction:
    """Piecewise-linear function: one value per mesh vertex."""

    def __init__(self, values):
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1:
            raise LengthMismatch("vertex values must be a flat sequence")
        self.values = _readonly(vals)

    def __len__(self):
        return len(self.values)


def cyclic_vertices(p: ArcProfile, radius: float = 1.0) -> np.ndarray:
    """Vertices of the inscribed polygon on a circle about the origin.

    Vertex 0 sits at polar angle 0; vertex k at twice the partial sum of
    the half-angles before it (arc k subtends the central angle
    2*theta_k).  Returned as an (n, 2) array.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    phi = 2.0 * np.concatenate(([0.0], np.cumsum(p.theta[:-1])))
    return radius * np.column_stack((np.cos(phi), np.sin(phi)))


def fan_triangulation(n: int, apex: int = 0) -> np.ndarray:
    """Faces of the fan triangulation of an n-gon from the given apex."""
    if not 0 <= apex < n:
        raise ValueError(f"apex {apex} out of range for n={n}")
    faces = []
    for s in range(1, n - 1):
        faces.append((apex, (apex + s) % n, (apex + s + 1) % n))
    return np.asarray(faces, dtype=int)


def corner_angles(mesh: TriMesh, face: int) -> np.ndarray:
    """Interior angles of one face, in its vertex order.

    Each angle comes from atan2 of cross and dot products of the edge
    vectors, which stays accurate for needle triangles where an
    arccos-of-normalised-dot formulation loses digits.
    """
    i, j, k = mesh.faces[face]
    pts = mesh.vertices
    out = np.empty(3)
    for slot, (c, u, v) in enumerate(((i, j, k), (j, k, i), (k, i, j))):
        e1 = pts[u] - pts[c]
        e2 = pts[v] - pts[c]
        ang = math.atan2(abs(e1[0] * e2[1] - e1[1] * e2[0]), float(e1 @ e2))
        if ang < DEGENERATE_ANGLE or ang > math.pi - DEGENERATE_ANGLE:
            raise DegenerateFace(f"face {face} has corner angle {ang:g}")
        out[slot] = ang
    return out


def cot_weight(mesh: TriMesh, i: int, j: int, convention=WeightConvention.FULL):
    """Cotangent weight of edge {i, j}.

    Sum of the cotangents of the angles opposite the edge in its one or two
    incident faces; halved under the HALF convention.
    """
    acc = 0.0
    for fi, w in mesh.edge_faces(i, j):
        angles = corner_angles(mesh, fi)
        slot = int(np.flatnonzero(mesh.faces[fi] == w)[0])
        ang = angles[slot]
        acc += math.cos(ang) / math.sin(ang)
    if convention is WeightConvention.HALF:
        acc *= 0.5
    return acc


def assemble_mesh_laplacian(mesh: TriMesh, convention=WeightConvention.FULL):
    """Cotangent Laplace matrix of the mesh under the given convention.

    Off-diagonal entry (i, j) is minus the edge weight; the diagonal makes
    rows sum to zero.  Dense output: the meshes here are small.
    """
    n = mesh.n_vertices
    m = np.zeros((n, n))
    # accumulate per-face so each corner angle is computed once
    half = convention is WeightConvention.HALF
    for fi in range(len(mesh.faces)):
        angles = corner_angles(mesh, fi)
        tri = mesh.faces[fi]
        for slot in range(3):
            w = math.cos(angles[slot]) / math.sin(angles[slot])
            if half:
                w *= 0.5
            i, j = tri[(slot + 1) % 3], tri[(slot + 2) % 3]
            m[i, j] -= w
            m[j, i] -= w
            m[i, i] += w
            m[j, j] += w
    return LaplaceMatrix(entries=_readonly(m))


def dirichlet_energy(mesh: TriMesh, f: PLFunction, convention=WeightConvention.HALF) -> float:
    """Half the quadratic form of the mesh Laplacian at a vertex function.

    Under the HALF convention 0.5 * f'Lf equals the Dirichlet integral
    ``1/2 * integral |grad f|^2`` of the piecewise-linear interpolant,
    which :func:`quadrature_energy` evaluates independently.
    """
    if len(f.values) != mesh.n_vertices:
        raise LengthMismatch(
            f"mesh has {mesh.n_vertices} vertices, function has {len(f.values)} values"
        )
    L = assemble_mesh_laplacian(mesh, convention)
    return 0.5 * float(f.values @ L.entries @ f.values)


def quadrature_energy(mesh: TriMesh, f: PLFunction) -> float:
    """Dirichlet integral of the piecewise-linear interpolant of f.

    Computed face by face from the constant per-face gradient and the face
    area — no cotangent weights involved, so it serves as the independent
    oracle for :func:`dirichlet_energy`.
    """
    if len(f.values) != mesh.n_vertices:
        raise LengthMismatch(
            f"mesh has {mesh.n_vertices} vertices, function has {len(f.values)} values"
        )
    vals = f.values
    acc = 0.0
    for i, j, k in mesh.faces:
        p0, p1, p2 = mesh.vertices[i], mesh.vertices[j], mesh.vertices[k]
        e1 = p1 - p0
        e2 = p2 - p0
        det = float(e1[0] * e2[1] - e1[1] * e2[0])
        area = 0.5 * abs(det)
        if area <= 0.0:
            raise DegenerateFace(f"face ({i}, {j}, {k}) has zero area")
        d1 = vals[j] - vals[i]
        d2 = vals[k] - vals[i]
        # gradient of the linear interpolant solves [e1; e2] g = [d1; d2]
        gx = (d1 * e2[1] - d2 * e1[1]) / det
        gy = (d2 * e1[0] - d1 * e2[0]) / det
        acc += 0.5 * (gx * gx + gy * gy) * area
    return acc
