"""Eigenvalues of Laplace matrices and determinant-based cross checks.

The eigensolver is a classical cyclic Jacobi iteration compiled with numba;
for the small dense symmetric matrices this package produces (n rarely
above a few hundred) it is both faster to dispatch than LAPACK and fully
deterministic across runs.  A batch entry point diagonalises a stack of
equal-sized matrices in one compiled call, which is what makes the
100k-sample verification sweeps cheap.

The determinant route is independent of the eigensolver: the product of
the non-trivial eigenvalues equals n times the determinant of the matrix
with one row and column deleted, and that determinant satisfies a
three-term (continuant) recurrence in the cotangents.  Agreement of the
two routes is one of the package's standing cross checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .cyclic import CotVector, LaplaceMatrix, _readonly
from .errors import NoConvergence, NotSymmetric

MAX_SWEEPS = 50

# A sweep stops when the off-diagonal Frobenius mass falls below this
# fraction of the total Frobenius norm (which is rotation invariant, so it
# is computed once).
OFF_TOL = 1e-13


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a Laplace matrix, sorted ascending.

    ``values[0]`` is the kernel eigenvalue; it is reported as computed
    (order 1e-15, possibly negative), never clamped to zero.
    """

    values: np.ndarray

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def nontrivial(self) -> np.ndarray:
        """All eigenvalues above the kernel one."""
        return self.values[1:]


@njit(cache=True)
def _offdiag_sq(m):
    n = m.shape[0]
    acc = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            acc += m[i, j] * m[i, j]
    return 2.0 * acc


@njit(cache=True)
def _jacobi(m, max_sweeps):
    """Diagonalise symmetric m in place; return (sorted eigenvalues, ok)."""
    n = m.shape[0]
    total_sq = 0.0
    for i in range(n):
        for j in range(n):
            total_sq += m[i, j] * m[i, j]
    thresh_sq = (OFF_TOL * OFF_TOL) * total_sq

    ok = _offdiag_sq(m) <= thresh_sq
    for _ in range(max_sweeps):
        if ok:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if apq == 0.0:
                    continue
                tau = (m[q, q] - m[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                elif tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rho = s / (1.0 + c)
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp = m[k, p]
                    akq = m[k, q]
                    m[k, p] = akp - s * (akq + rho * akp)
                    m[p, k] = m[k, p]
                    m[k, q] = akq + s * (akp - rho * akq)
                    m[q, k] = m[k, q]
                m[p, p] -= t * apq
                m[q, q] += t * apq
                m[p, q] = 0.0
                m[q, p] = 0.0
        ok = _offdiag_sq(m) <= thresh_sq

    diag = np.empty(n)
    for i in range(n):
        diag[i] = m[i, i]
    return np.sort(diag), ok


@njit(cache=True)
def _jacobi_batch(ms, max_sweeps):
    b = ms.shape[0]
    n = ms.shape[1]
    out = np.empty((b, n))
    ok = np.empty(b, dtype=np.bool_)
    for i in range(b):
        vals, good = _jacobi(ms[i], max_sweeps)
        out[i] = vals
        ok[i] = good
    return out, ok


def eigenvalues(L) -> Spectrum:
    """Full spectrum of a LaplaceMatrix (or raw symmetric ndarray).

    Raises
    ------
    NotSymmetric
        Input asymmetric beyond 1e-12 relative to its largest entry.
    NoConvergence
        The Jacobi iteration failed to converge in 50 sweeps (does not
        happen for symmetric input; a safety net, not a tuning knob).
    """
    m = np.array(getattr(L, "entries", L), dtype=float)
    scale = float(np.abs(m).max()) if m.size else 0.0
    if float(np.abs(m - m.T).max()) > 1e-12 * max(1.0, scale):
        raise NotSymmetric("matrix is not symmetric within 1e-12")
    vals, ok = _jacobi(m, MAX_SWEEPS)
    if not ok:
        raise NoConvergence(f"Jacobi sweep limit {MAX_SWEEPS} exhausted")
    return Spectrum(values=_readonly(vals))


def _batch_eigenvalues(ms: np.ndarray) -> np.ndarray:
    """Spectra of a (B, n, n) stack of symmetric matrices, rows ascending.

    Internal fast path: no per-matrix symmetry check, raises NoConvergence
    if any matrix in the stack fails.
    """
    ms = np.ascontiguousarray(ms, dtype=float)
    vals, ok = _jacobi_batch(ms, MAX_SWEEPS)
    if not ok.all():
        bad = int(np.flatnonzero(~ok)[0])
        raise NoConvergence(f"Jacobi failed on batch element {bad}")
    return vals


def sum_nontrivial(s: Spectrum) -> float:
    """Sum of the non-kernel eigenvalues (equals the matrix trace)."""
    return float(s.values[1:].sum())


def product_nontrivial(s: Spectrum) -> float:
    """Product of the non-kernel eigenvalues.

    Beyond n = 30 the product is accumulated in log space so that large
    spectra do not overflow intermediate partial products.
    """
    lam = s.values[1:]
    if s.n <= 30 or bool((lam <= 0.0).any()):
        return float(np.prod(lam))
    return float(math.exp(np.log(lam).sum()))


def continuant_det(a: CotVector) -> float:
    """Determinant of the cyclic Laplace matrix with row/column 0 deleted.

    The reduced matrix is tridiagonal, so its determinant follows the
    continuant recurrence d_k = (a_{k-1} + a_k) d_{k-1} - a_{k-1}^2 d_{k-2}
    seeded with d = 1 (and 0 before that).  The result equals the
    elementary symmetric polynomial of order n-1 in the cotangents, which
    the tests exploit as an independent check.
    """
    v = a.a
    d_prev2 = 0.0
    d_prev = 1.0
    for k in range(1, a.n):
        d = (v[k - 1] + v[k]) * d_prev - v[k - 1] * v[k - 1] * d_prev2
        d_prev2 = d_prev
        d_prev = d
    return d_prev


def matrix_tree_product(a: CotVector) -> float:
    """n times the reduced determinant: the weighted spanning-tree count.

    For the cycle graph this equals the product of the non-kernel
    eigenvalues, giving an eigensolver-free route to that product.
    """
    return a.n * continuant_det(a)
