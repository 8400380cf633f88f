"""Arc-angle profiles of cyclic polygons and their cotangent Laplacians.

A cyclic n-gon inscribed in the unit circle is described by the half-angles
``theta_1, ..., theta_n`` of its n circumcircle arcs: arc i has central angle
``2*theta_i``, and the half-angles sum to pi.  Every quantity of interest is
a function of the cotangents ``a_i = cot(theta_i)``: the Laplace matrix of
the polygon is the cycle-graph matrix with edge weights ``a_i``, independent
of how the polygon is triangulated.

This module holds the domain types (ArcProfile, CotVector, LaplaceMatrix,
CharPolyCoeffs), the closed-form characteristic polynomials for n = 3 and
n = 4, and the closed form for the largest triangle eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    IdentityViolation,
    IndexOutOfRange,
    NegativeDiscriminant,
    NonPositiveAngle,
    SumMismatch,
    TooFewArcs,
)

# Half-angles closer to 0 than this produce cotangents ~1e12 and are
# rejected outright; the domain is open so such inputs are user error.
ANGLE_FLOOR = 1e-12

# |sum(theta) - pi| tolerance.  Loose enough to admit angles that were
# specified in degrees and converted.
SUM_TOL = 1e-9

# Residual tolerance for the cotangent identities used as preconditions of
# the closed-form characteristic polynomials (looser than the 1e-9 the
# invariant tests use, for the same degrees-conversion reason).
IDENTITY_TOL = 1e-6


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.asarray(arr, dtype=float).copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class ArcProfile:
    """Validated point of the open simplex {theta_i > 0, sum = pi}.

    Attributes
    ----------
    theta : ndarray
        The n arc half-angles in radians, stored exactly as given.
    """

    theta: np.ndarray

    @property
    def n(self) -> int:
        return len(self.theta)


@dataclass(frozen=True)
class CotVector:
    """Cotangents ``a_i = cot(theta_i)`` of an arc profile.

    At most one entry is non-positive, and every pairwise sum ``a_i + a_j``
    is positive; both follow from the arc half-angles summing to pi.
    """

    a: np.ndarray

    def __post_init__(self):
        a = _readonly(self.a)
        object.__setattr__(self, "a", a)
        if int(np.sum(a <= 0.0)) > 1:
            raise ValueError("more than one non-positive cotangent")
        two_smallest = np.partition(a, 1)[:2]
        if two_smallest.sum() <= 0.0:
            raise ValueError("a pairwise cotangent sum is non-positive")

    @property
    def n(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class LaplaceMatrix:
    """Dense symmetric positive-semidefinite matrix with zero row sums."""

    entries: np.ndarray

    def __post_init__(self):
        m = _readonly(self.entries)
        object.__setattr__(self, "entries", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("Laplace matrix must be square")
        scale = float(np.abs(m).max()) if m.size else 0.0
        if float(np.abs(m - m.T).max()) > 1e-12 * max(1.0, scale):
            raise ValueError("Laplace matrix must be symmetric")
        if float(np.abs(m.sum(axis=1)).max()) > 1e-10 * max(1.0, scale):
            raise ValueError("Laplace matrix rows must sum to zero")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.entries))


@dataclass(frozen=True)
class CharPolyCoeffs:
    """Coefficients of det(L - xI), highest power first.

    The constant coefficient is always 0: the constant vector is in the
    kernel of any Laplace matrix.
    """

    degree: int
    coeffs: np.ndarray = field(repr=False)

    def __call__(self, x: float) -> float:
        """Evaluate the polynomial at x (Horner)."""
        acc = 0.0
        for c in self.coeffs:
            acc = acc * x + c
        return acc


def make_arc_profile(theta) -> ArcProfile:
    """Validate raw half-angles and wrap them in an ArcProfile.

    Parameters
    ----------
    theta : sequence of float
        Proposed arc half-angles in radians.

    Raises
    ------
    TooFewArcs
        Fewer than three angles.
    NonPositiveAngle
        Any angle outside (0, pi), including angles below the 1e-12 floor.
    SumMismatch
        The angles do not sum to pi within 1e-9.
    """
    arr = np.asarray(theta, dtype=float)
    if arr.ndim != 1 or arr.size < 3:
        raise TooFewArcs(f"need at least 3 arcs, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise NonPositiveAngle("angles must be finite")
    if float(arr.min()) < ANGLE_FLOOR:
        raise NonPositiveAngle(
            f"arc half-angles must exceed {ANGLE_FLOOR:g} rad, got {arr.min():g}"
        )
    if float(arr.max()) >= math.pi:
        raise NonPositiveAngle(f"arc half-angles must be below pi, got {arr.max():g}")
    residual = math.fsum(arr) - math.pi
    if abs(residual) > SUM_TOL:
        raise SumMismatch(f"half-angles sum to pi{residual:+g}, tolerance {SUM_TOL:g}")
    return ArcProfile(theta=_readonly(arr))


def regular_profile(n: int) -> ArcProfile:
    """Profile of the regular n-gon: all half-angles equal to pi/n."""
    if n < 3:
        raise TooFewArcs(f"need at least 3 arcs, got {n}")
    return ArcProfile(theta=_readonly(np.full(n, math.pi / n)))


def cot_vector(p: ArcProfile) -> CotVector:
    """Cotangents of the profile's half-angles.

    Computed as cos/sin rather than 1/tan: tan blows up at pi/2 where the
    cotangent is simply 0.
    """
    return CotVector(a=_readonly(np.cos(p.theta) / np.sin(p.theta)))


def elementary_symmetric(a: CotVector, k: int) -> float:
    """Elementary symmetric polynomial e_k of the cotangent entries.

    Uses the one-pass prefix recurrence (O(n*k)); with at most one negative
    entry the partial sums involve no systematic cancellation.
    """
    if k < 0 or k > a.n:
        raise IndexOutOfRange(f"order {k} not in [0, {a.n}]")
    return _esym(a.a, k)


def _esym(values: np.ndarray, k: int) -> float:
    # e[j] holds e_j of the prefix processed so far
    e = np.zeros(k + 1)
    e[0] = 1.0
    for x in values:
        top = min(k, len(values))
        for j in range(top, 0, -1):
            e[j] += x * e[j - 1]
    return float(e[k])


def dcot(theta: float) -> float:
    """Derivative of cot at theta, written as -(1 + cot^2 theta)."""
    c = math.cos(theta) / math.sin(theta)
    return -(1.0 + c * c)


def assemble_cyclic(a: CotVector) -> LaplaceMatrix:
    """Laplace matrix of the cyclic polygon with cotangent vector ``a``.

    With 0-based storage, row i has diagonal ``a[i-1] + a[i]`` (indices mod
    n) and off-diagonal entries ``-a[i]`` at column i+1 mod n (symmetric
    partner at the transposed position); everything else is 0.  This is the
    cycle-graph Laplacian with edge i--(i+1) weighted by ``a[i]``.
    """
    n = a.n
    v = a.a
    m = np.zeros((n, n))
    idx = np.arange(n)
    m[idx, idx] = np.roll(v, 1) + v
    m[idx, (idx + 1) % n] = -v
    m[(idx + 1) % n, idx] = -v
    return LaplaceMatrix(entries=_readonly(m))


def charpoly3(a: CotVector) -> CharPolyCoeffs:
    """Characteristic polynomial of the triangle Laplace matrix.

    The closed form is ``-x^3 + 2 e1 x^2 - 3x``; it relies on the triangle
    identity e2(a) = 1, which is checked first.
    """
    if a.n != 3:
        raise IndexOutOfRange(f"triangle charpoly needs n=3, got {a.n}")
    e2 = _esym(a.a, 2)
    if abs(e2 - 1.0) > IDENTITY_TOL:
        raise IdentityViolation(
            f"e2(a) = {e2!r} differs from 1 by more than {IDENTITY_TOL:g}; "
            "input is not a Euclidean triangle"
        )
    e1 = float(a.a.sum())
    return CharPolyCoeffs(degree=3, coeffs=_readonly([-1.0, 2.0 * e1, -3.0, 0.0]))


def charpoly4(a: CotVector) -> CharPolyCoeffs:
    """Characteristic polynomial of the cyclic-quadrilateral Laplace matrix.

    Closed form ``x^4 - 2 e1 x^3 + q x^2 - 4 e1 x`` with
    ``q = 3(a1 a2 + a2 a3 + a3 a4 + a4 a1) + 4(a1 a3 + a2 a4)``;
    relies on the quadrilateral identity e3(a) = e1(a).
    """
    if a.n != 4:
        raise IndexOutOfRange(f"quadrilateral charpoly needs n=4, got {a.n}")
    e1 = float(a.a.sum())
    e3 = _esym(a.a, 3)
    if abs(e3 - e1) > IDENTITY_TOL * (1.0 + abs(e1)):
        raise IdentityViolation(
            f"e3(a) = {e3!r} differs from e1(a) = {e1!r}; "
            "input is not a cyclic quadrilateral"
        )
    a1, a2, a3, a4 = a.a
    q = 3.0 * (a1 * a2 + a2 * a3 + a3 * a4 + a4 * a1) + 4.0 * (a1 * a3 + a2 * a4)
    return CharPolyCoeffs(
        degree=4, coeffs=_readonly([1.0, -2.0 * e1, q, -4.0 * e1, 0.0])
    )


def lambda2_closed_form(a: CotVector) -> float:
    """Largest triangle eigenvalue, ``e1 + sqrt(e1^2 - 3)``.

    The smaller positive eigenvalue is recoverable as 3 divided by the
    returned value, since the two multiply to 3.
    """
    if a.n != 3:
        raise IndexOutOfRange(f"closed form needs n=3, got {a.n}")
    e1 = float(a.a.sum())
    disc = e1 * e1 - 3.0
    if disc < -1e-12:
        raise NegativeDiscriminant(
            f"e1^2 - 3 = {disc!r} < 0: triangle minimum property breached"
        )
    return e1 + math.sqrt(max(disc, 0.0))
