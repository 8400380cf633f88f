"""Extremum verification for spectral functionals on the arc-angle simplex.

The domain is the open simplex of arc half-angle profiles (theta_i > 0,
sum = pi).  Four functionals are supported: the cotangent sum e_1 (half the
eigenvalue sum), the quadratic quadrilateral coefficient, the top
elementary symmetric polynomial e_{n-1} (1/n of the eigenvalue product),
and the first non-trivial eigenvalue.  The regular polygon is the unique
interior critical point of the first three, a minimum, and the maximizer
of the fourth; the machinery here checks that numerically from three
directions:

* closed-form gradients and the Lagrange-multiplier residual at a point,
* projected-gradient descent with multistart, which should land on the
  regular profile,
* large randomized sampling sweeps against the known bounds, plus probes
  along rays toward the simplex boundary where the functionals blow up.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass

import numpy as np
from numba import njit

from .cyclic import ArcProfile, _readonly, make_arc_profile, regular_profile
from .errors import (
    ArityMismatch,
    InvalidTarget,
    StartNotInterior,
    TooFewArcs,
    UnknownTheorem,
    Unsupported,
)
from .spectrum import _batch_eigenvalues, eigenvalues

# Interior floor for the optimizer: iterates keep every half-angle above
# this, and starts at or below it are rejected.
FLOOR = 1e-8

# Sampling floor: random profiles keep every half-angle above this so that
# cotangents stay below ~1e4 and batch statistics stay well conditioned.
SAMPLE_FLOOR = 1e-4

# Rows drawn per RNG stream.  Sampling results are reproducible for a given
# seed because stream c is always default_rng([seed, c]) over a fixed-size
# chunk, so the output is independent of how draws are split across
# workers or calls.
CHUNK = 4096


class Objective(enum.Enum):
    """Functionals on the arc-angle simplex."""

    SUM_COT = "sumcot"
    G_QUAD = "gquad"
    E_SYM = "esym"
    LAMBDA1 = "lambda1"


@dataclass(frozen=True)
class OptimizationReport:
    """Outcome of one descent run.

    ``converged`` means the reduced gradient actually dropped below the
    requested tolerance; a run stopped by the iteration cap or by hitting
    the floating-point resolution of the objective reports ``False`` and
    still carries its final iterate.  ``lagrange_multiplier`` is the common
    value the partials approach at a constrained critical point.
    """

    start: ArcProfile
    final: ArcProfile
    objective_value: float
    iterations: int
    reduced_gradient_norm: float
    lagrange_multiplier: float
    converged: bool


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one randomized bound check.

    ``gap`` is the margin by which the extremal sample respects the bound
    (non-negative means the bound held with room to spare); ``violations``
    counts samples beyond the bound by more than 1e-9.
    """

    theorem: str
    n: int
    samples: int
    seed: int
    violations: int
    extremal: float
    bound: float
    gap: float
    side: str

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _cot(theta):
    return np.cos(theta) / np.sin(theta)


@njit(cache=True)
def _esym_nb(values, k):
    # compiled twin of the prefix recurrence in cyclic.elementary_symmetric
    # (tests assert the two agree); here it sits on the descent hot path
    e = np.zeros(k + 1)
    e[0] = 1.0
    for i in range(values.shape[0]):
        x = values[i]
        for j in range(k, 0, -1):
            e[j] += x * e[j - 1]
    return e[k]


@njit(cache=True)
def _esym_drop_one_nb(values, k):
    """e_k of ``values`` with entry i deleted, for every i at once.

    Prefix/suffix split: e_k(all but i) is the convolution of the
    elementary symmetric rows of values[:i] and values[i+1:].  No
    subtractions, so no cancellation even with huge cotangents.
    """
    n = values.shape[0]
    pre = np.zeros((n + 1, k + 1))
    suf = np.zeros((n + 1, k + 1))
    for i in range(n + 1):
        pre[i, 0] = 1.0
        suf[i, 0] = 1.0
    for i in range(1, n + 1):
        x = values[i - 1]
        for j in range(k, 0, -1):
            pre[i, j] = pre[i - 1, j] + x * pre[i - 1, j - 1]
    for i in range(n - 1, -1, -1):
        x = values[i]
        for j in range(k, 0, -1):
            suf[i, j] = suf[i + 1, j] + x * suf[i + 1, j - 1]
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        for j in range(k + 1):
            acc += pre[i, j] * suf[i + 1, k - j]
        out[i] = acc
    return out


def _eval_raw(obj: Objective, theta: np.ndarray) -> float:
    a = _cot(theta)
    n = len(a)
    if obj is Objective.SUM_COT:
        return float(a.sum())
    if obj is Objective.G_QUAD:
        return float(3.0 * (a @ np.roll(a, 1)) + 4.0 * (a[0] * a[2] + a[1] * a[3]))
    if obj is Objective.E_SYM:
        return float(_esym_nb(a, n - 1))
    # LAMBDA1: smallest nonzero eigenvalue of the cyclic Laplace matrix
    m = np.zeros((n, n))
    idx = np.arange(n)
    m[idx, idx] = np.roll(a, 1) + a
    m[idx, (idx + 1) % n] = -a
    m[(idx + 1) % n, idx] = -a
    return float(eigenvalues(m).values[1])


def _grad_raw(obj: Objective, theta: np.ndarray) -> np.ndarray:
    a = _cot(theta)
    dcot = -(1.0 + a * a)
    if obj is Objective.SUM_COT:
        return dcot
    if obj is Objective.G_QUAD:
        outer = 3.0 * (np.roll(a, 1) + np.roll(a, -1)) + 4.0 * np.roll(a, 2)
        return outer * dcot
    # E_SYM
    return dcot * _esym_drop_one_nb(a, len(a) - 2)


def _check_arity(obj: Objective, n: int):
    if obj is Objective.G_QUAD and n != 4:
        raise ArityMismatch(f"{obj.value} is defined for n=4 only, got n={n}")


def evaluate(obj: Objective, p: ArcProfile) -> float:
    """Value of the functional at a profile."""
    _check_arity(obj, p.n)
    return _eval_raw(obj, p.theta)


def gradient(obj: Objective, p: ArcProfile) -> np.ndarray:
    """Unconstrained partials with respect to each half-angle.

    Closed forms via the chain rule through cot (whose derivative is
    -(1 + cot^2)); the eigenvalue functional has no closed-form gradient
    here and raises Unsupported.
    """
    _check_arity(obj, p.n)
    if obj is Objective.LAMBDA1:
        raise Unsupported("lambda1 is evaluate-only: no gradient")
    return _readonly(_grad_raw(obj, p.theta))


def lagrange_residual(obj: Objective, p: ArcProfile) -> tuple[float, float]:
    """(residual, y): distance from criticality on the constrained simplex.

    At an interior critical point all partials share one value y (the
    multiplier of the sum constraint); the residual is the largest
    deviation of any partial from their mean.  Zero to rounding at the
    regular profile.
    """
    g = gradient(obj, p)
    y = float(g.mean())
    return float(np.abs(g - y).max()), y


def minimize(
    obj: Objective,
    start: ArcProfile,
    gtol: float = 1e-9,
    max_iterations: int = 100_000,
) -> OptimizationReport:
    """Projected-gradient descent over the simplex from a given start.

    The last half-angle is eliminated (theta_n = pi - sum of the rest), and
    steepest descent with Armijo backtracking (halving, slope factor 1e-4,
    step doubling after each accepted step) runs on the free coordinates.
    Steps are capped so every half-angle stays above 1e-8.

    Near the minimum the objective goes flat in floating point long before
    the reduced gradient reaches ``gtol``: value changes shrink below the
    rounding jitter of evaluating it.  A step whose value change is within
    a few ulp is therefore accepted iff it strictly shrinks the 2-norm of
    the reduced gradient (a small enough descent step always does; the
    max-norm is not monotone along descent directions).  Every accepted
    step then strictly decreases the value or the gradient 2-norm, so the
    run either certifies convergence (max-norm below ``gtol``), exhausts
    ``max_iterations``, or stops at the rounding floor with
    ``converged=False``.

    Raises
    ------
    StartNotInterior
        A start half-angle is at or below the 1e-8 interior floor.
    Unsupported
        The objective has no gradient (lambda1).
    ArityMismatch
        Objective arity does not match the profile.
    """
    _check_arity(obj, start.n)
    if obj is Objective.LAMBDA1:
        raise Unsupported("lambda1 is evaluate-only: cannot run descent on it")
    if float(start.theta.min()) <= FLOOR:
        raise StartNotInterior(
            f"start half-angle {start.theta.min():g} at or below {FLOOR:g}"
        )

    theta = np.array(start.theta)
    n = len(theta)
    f_cur = _eval_raw(obj, theta)
    g = _grad_raw(obj, theta)
    r = g[:-1] - g[-1]
    grad_norm = float(np.abs(r).max())
    gn_two = float(r @ r)
    alpha = 1e-3
    iterations = 0
    converged = grad_norm < gtol
    direction = np.empty(n)

    while not converged and iterations < max_iterations:
        iterations += 1
        direction[:-1] = -r
        direction[-1] = r.sum()
        # largest step keeping the iterate strictly inside the simplex
        shrinking = direction < 0.0
        if shrinking.any():
            cap = float(((theta[shrinking] - FLOOR) / -direction[shrinking]).min())
        else:
            cap = math.inf
        if cap <= 0.0:
            break  # pinned against the floor, cannot move
        step = min(alpha, cap)
        slope = gn_two

        accepted = False
        # evaluating f carries rounding jitter of a few ulp; an Armijo
        # decrease below that band proves nothing, so such steps are
        # judged by the gradient 2-norm instead (the max-norm is not
        # monotone along descent steps, the 2-norm is)
        f_tol = 8.0 * np.finfo(float).eps * max(1.0, abs(f_cur))
        for _ in range(60):
            cand = theta + step * direction
            cand[-1] = math.pi - cand[:-1].sum()
            f_new = _eval_raw(obj, cand)
            needed = 1e-4 * step * slope
            sufficient = needed > f_tol and f_new <= f_cur - needed
            if sufficient or f_new <= f_cur + f_tol:
                g_new = _grad_raw(obj, cand)
                r_new = g_new[:-1] - g_new[-1]
                two_new = float(r_new @ r_new)
                if sufficient or two_new < gn_two:
                    theta, f_cur = cand, f_new
                    g, r, gn_two = g_new, r_new, two_new
                    grad_norm = float(np.abs(r).max())
                    alpha = 2.0 * step
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            break  # neither value nor gradient can improve: rounding floor
        converged = grad_norm < gtol

    final = make_arc_profile(theta)
    return OptimizationReport(
        start=start,
        final=final,
        objective_value=f_cur,
        iterations=iterations,
        reduced_gradient_norm=grad_norm,
        lagrange_multiplier=float(g.mean()),
        converged=converged,
    )


def boundary_probe(obj: Objective, n: int, target, steps: int = 20) -> np.ndarray:
    """Functional values along a ray from the regular profile to the boundary.

    ``target`` is a closed-simplex point with ``target[0] == 0`` (the
    degenerating arc) and the remaining entries non-negative, summing to
    pi.  Step k evaluates at ``target + 2**-k * (regular - target)``, so
    k = 0 is the regular n-gon and successive points halve the distance to
    the boundary.  For the coordinate functionals the values blow up like
    2**k.

    Raises
    ------
    InvalidTarget
        Malformed target: wrong length, first entry nonzero, negative
        entries, or sum away from pi by more than 1e-6 (loose enough for
        hand-typed decimal angles).
    """
    b = np.asarray(target, dtype=float)
    if b.ndim != 1 or b.size != n:
        raise InvalidTarget(f"target must have exactly n={n} entries")
    if n < 3:
        raise TooFewArcs(f"need at least 3 arcs, got {n}")
    if b[0] != 0.0:
        raise InvalidTarget("target[0] must be exactly 0 (the degenerating arc)")
    if b.min() < 0.0:
        raise InvalidTarget("target entries must be non-negative")
    if abs(math.fsum(b) - math.pi) > 1e-6:
        raise InvalidTarget("target must sum to pi within 1e-6")
    if not 1 <= steps <= 60:
        raise ValueError("steps must be between 1 and 60")
    _check_arity(obj, n)

    p0 = regular_profile(n).theta
    values = np.empty(steps)
    for k in range(steps):
        x = b + 0.5**k * (p0 - b)
        values[k] = _eval_raw(obj, x)
    return _readonly(values)


def sample_profiles(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Uniform random arc profiles, one per row.

    Dirichlet(1, ..., 1) draws scaled to sum pi; rows with a half-angle
    below 1e-4 are discarded and redrawn.  Chunked seeding makes the result
    depend only on (n, count, seed).
    """
    if n < 3:
        raise TooFewArcs(f"need at least 3 arcs, got {n}")
    rows = []
    have = 0
    chunk_idx = 0
    alpha = np.ones(n)
    while have < count:
        rng = np.random.default_rng([seed, chunk_idx])
        draw = rng.dirichlet(alpha, CHUNK) * math.pi
        good = draw[draw.min(axis=1) >= SAMPLE_FLOOR]
        rows.append(good)
        have += len(good)
        chunk_idx += 1
    return _readonly(np.concatenate(rows)[:count])


def _cyclic_batch(thetas: np.ndarray) -> np.ndarray:
    """Stack of cyclic Laplace matrices for (B, n) half-angle rows."""
    a = _cot(thetas)
    b, n = a.shape
    m = np.zeros((b, n, n))
    idx = np.arange(n)
    m[:, idx, idx] = np.roll(a, 1, axis=1) + a
    m[:, idx, (idx + 1) % n] = -a
    m[:, (idx + 1) % n, idx] = -a
    return m


def _stat_lambda1(vals):
    return vals[:, 1]


def _stat_lambda2(vals):
    return vals[:, 2]


def _stat_sum(vals):
    return vals[:, 1:].sum(axis=1)


def _stat_pairsum(vals):
    lam = vals[:, 1:]
    s = lam.sum(axis=1)
    return 0.5 * (s * s - (lam * lam).sum(axis=1))


def _stat_product(vals):
    return np.prod(vals[:, 1:], axis=1)


def _bound_t3_sum(n):
    return 2.0 * n / math.tan(math.pi / n)


def _bound_t3_product(n):
    return n * n * (1.0 / math.tan(math.pi / n)) ** (n - 1)


# theorem id -> (fixed n or None, statistic over sorted spectra, side, bound(n))
THEOREMS = {
    "T1-lambda1-max": (3, _stat_lambda1, "max", lambda n: math.sqrt(3.0)),
    "T1-lambda2-min": (3, _stat_lambda2, "min", lambda n: math.sqrt(3.0)),
    "T1-sum-min": (3, _stat_sum, "min", lambda n: 2.0 * math.sqrt(3.0)),
    "T2-lambda1-max": (4, _stat_lambda1, "max", lambda n: 2.0),
    "T2-sum-min": (4, _stat_sum, "min", lambda n: 8.0),
    "T2-pairsum-min": (4, _stat_pairsum, "min", lambda n: 20.0),
    "T2-product-min": (4, _stat_product, "min", lambda n: 16.0),
    "T3-sum-min": (None, _stat_sum, "min", _bound_t3_sum),
    "T3-product-min": (None, _stat_product, "min", _bound_t3_product),
}

# Beyond-the-bound slack that counts as a genuine violation rather than
# eigensolver rounding.
VIOLATION_TOL = 1e-9

_PARAMETERIZED = re.compile(r"^(?P<id>[\w-]+)\((?P<n>\d+)\)$")


def verify_sampling(
    theorem: str, samples: int = 100_000, seed: int = 0, n: int | None = None
) -> VerificationReport:
    """Randomized check of one spectral bound.

    Draws ``samples`` random profiles, computes their spectra in compiled
    batches, and compares the theorem's statistic against its bound.  A
    sample counts as a violation only when it is beyond the bound by
    more than 1e-9.  General-size theorems take their polygon size either
    as the ``n`` argument or inline, e.g. ``"T3-sum-min(7)"``.

    Raises
    ------
    UnknownTheorem
        Unrecognized theorem id (see THEOREMS for the registry).
    ArityMismatch
        ``n`` conflicts with a fixed-size theorem, or a general-size
        theorem was given no size at all.
    """
    m = _PARAMETERIZED.match(theorem)
    if m:
        inline_n = int(m.group("n"))
        if n is not None and n != inline_n:
            raise ArityMismatch(f"{theorem} conflicts with n={n}")
        theorem, n = m.group("id"), inline_n
    try:
        fixed_n, stat, side, bound_fn = THEOREMS[theorem]
    except KeyError:
        raise UnknownTheorem(
            f"unknown theorem {theorem!r}; known: {', '.join(sorted(THEOREMS))}"
        ) from None
    if fixed_n is not None:
        if n is not None and n != fixed_n:
            raise ArityMismatch(f"{theorem} is fixed at n={fixed_n}, got n={n}")
        n = fixed_n
    elif n is None:
        raise ArityMismatch(f"{theorem} needs an explicit size, e.g. {theorem}(5)")
    elif n < 3:
        raise TooFewArcs(f"need at least 3 arcs, got {n}")
    if samples < 1:
        raise ValueError("samples must be positive")

    bound = float(bound_fn(n))
    violations = 0
    extremal = -math.inf if side == "max" else math.inf

    done = 0
    chunk_idx = 0
    alpha = np.ones(n)
    while done < samples:
        rng = np.random.default_rng([seed, chunk_idx])
        chunk_idx += 1
        draw = rng.dirichlet(alpha, CHUNK) * math.pi
        draw = draw[draw.min(axis=1) >= SAMPLE_FLOOR]
        if done + len(draw) > samples:
            draw = draw[: samples - done]
        done += len(draw)
        vals = _batch_eigenvalues(_cyclic_batch(draw))
        statv = stat(vals)
        if side == "max":
            violations += int((statv > bound + VIOLATION_TOL).sum())
            extremal = max(extremal, float(statv.max()))
        else:
            violations += int((statv < bound - VIOLATION_TOL).sum())
            extremal = min(extremal, float(statv.min()))

    gap = bound - extremal if side == "max" else extremal - bound
    return VerificationReport(
        theorem=theorem if fixed_n is not None else f"{theorem}({n})",
        n=n,
        samples=samples,
        seed=seed,
        violations=violations,
        extremal=extremal,
        bound=bound,
        gap=gap,
        side=side,
    )
