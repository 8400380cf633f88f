"""Shared samplers and batteries used by both property and acceptance tests."""

import numpy as np

from polylap import extremum, mesh, spectrum
from polylap.cyclic import cot_vector, make_arc_profile


def interior_profiles(n, count, seed, floor=0.05):
    """Random half-angle profiles bounded away from the simplex boundary.

    Dirichlet(1) over the slack above `floor`.  Oracle-driven tests need
    the floor: finite differences, interpolated determinants and the
    cancellation-prone symmetric-function identities all lose more digits
    than their stated tolerances on near-degenerate profiles.
    """
    rng = np.random.default_rng(seed)
    return floor + (np.pi - n * floor) * rng.dirichlet(np.ones(n), size=count)


def batch_spectra(thetas):
    """Eigenvalues (rows ascending) of the cyclic Laplacians of `thetas`."""
    return spectrum._batch_eigenvalues(extremum._cyclic_batch(np.asarray(thetas)))


def random_delaunay_mesh(rng, max_pts=40):
    from scipy.spatial import Delaunay

    npts = int(rng.integers(4, max_pts))
    pts = rng.random((npts, 2))
    return mesh.TriMesh(pts, Delaunay(pts).simplices)


def fan_battery(count, seed, floor=0.05):
    """Assemble every fan triangulation of `count` random cyclic polygons.

    Returns (worst entry difference between any two apex choices,
    worst off-cycle weight magnitude, worst fan-vs-direct-assembly entry
    difference).
    """
    from polylap.cyclic import assemble_cyclic

    rng = np.random.default_rng(seed)
    worst_pair = worst_off = worst_direct = 0.0
    for _ in range(count):
        n = int(rng.integers(4, 11))
        p = make_arc_profile(interior_profiles(n, 1, int(rng.integers(1 << 30)), floor)[0])
        verts = mesh.cyclic_vertices(p)
        idx = np.arange(n)
        cycle = np.zeros((n, n), dtype=bool)
        cycle[idx, (idx + 1) % n] = cycle[(idx + 1) % n, idx] = True
        np.fill_diagonal(cycle, True)
        first = None
        for apex in range(n):
            tm = mesh.TriMesh(verts, mesh.fan_triangulation(n, apex=apex))
            e = np.asarray(mesh.assemble_mesh_laplacian(tm, mesh.WeightConvention.FULL).entries)
            if first is None:
                first = e
            else:
                worst_pair = max(worst_pair, float(np.abs(e - first).max()))
            worst_off = max(worst_off, float(np.abs(e[~cycle]).max()))
        direct = np.asarray(assemble_cyclic(cot_vector(p)).entries)
        worst_direct = max(worst_direct, float(np.abs(first - direct).max()))
    return worst_pair, worst_off, worst_direct


def gradient_fd_worst(obj, count, seed, floor=0.05, h=1e-6):
    """Worst relative gap between analytic and central-difference gradients."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for j in range(count):
        if obj is extremum.Objective.G_QUAD:
            n = 4
        else:
            lo = 3 if obj is extremum.Objective.SUM_COT else 4
            n = lo + j % (11 - lo)
        row = interior_profiles(n, 1, int(rng.integers(1 << 30)), floor)[0]
        g = extremum.gradient(obj, make_arc_profile(row))
        for i in range(n):
            e = np.zeros(n)
            e[i] = h
            fd = (extremum._eval_raw(obj, row + e) - extremum._eval_raw(obj, row - e)) / (2 * h)
            worst = max(worst, abs(g[i] - fd) / max(1.0, abs(fd)))
    return worst
