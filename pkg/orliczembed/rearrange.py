"""
Decreasing rearrangements, max-over-partition functionals and the Orlicz
functions constructed from weight vectors.

Constructions build the inverse of the conjugate, N^{*-1}, as a concave
piecewise-affine function through grid points, read off N* by swapping the
axes and conjugate exactly to get N.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .config import log
from .errors import DomainError, InvariantError, PreconditionError
from .orlicz import (
    CHECK_TOL,
    Exponents,
    PiecewiseAffine,
    Power,
    WeightVector,
    check_regularity,
    compose_power,
    conjugate_exponent,
    power_conjugate_inverse_constant,
)


class Rearrangement:
    """Values sorted nonincreasing with prefix sums (prefix_sums[k] = sum of the top k+1)."""

    def __init__(self, values, prefix_sums):
        self.values = values
        self.prefix_sums = prefix_sums

    def __len__(self):
        return len(self.values)

    def top(self, count):
        """Sum of the ``count`` largest values."""
        if count <= 0:
            return 0.0
        return float(self.prefix_sums[min(count, len(self)) - 1])

    def is_concave(self):
        return bool(np.all(np.diff(self.values) <= 0))


def rearrange(values):
    """Decreasing rearrangement of ``values`` with prefix sums."""
    arr = np.asarray(values, dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        raise DomainError("Rearrangement needs finite values")
    ordered = np.sort(arr)[::-1]
    return Rearrangement(ordered, np.cumsum(ordered))


class AllocationProblem:
    """
    Maximize sum_i weights[i] * gain[l_i] over sum_i l_i = budget, 0 <= l_i <= cap.

    ``gain`` is the table gain(0..cap) of a concave nondecreasing function.
    """

    def __init__(self, weights, gain, budget, cap):
        weights = np.asarray(weights, dtype=float).ravel()
        gain = np.asarray(gain, dtype=float).ravel()
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise DomainError("Allocation weights must be finite and nonnegative")
        if len(gain) != cap + 1:
            raise DomainError(f"Gain table needs cap + 1 = {cap + 1} entries")
        if gain[0] != 0:
            raise DomainError("gain(0) must be 0")
        marginals = np.diff(gain)
        slack = CHECK_TOL * np.maximum(1.0, np.abs(marginals))
        if np.any(marginals < -slack):
            raise DomainError("Gain must be nondecreasing")
        if np.any(np.diff(marginals) > slack[1:]):
            raise DomainError("Gain must be concave (nonincreasing marginals)")
        if not 0 <= budget <= len(weights) * cap:
            raise DomainError(f"Infeasible budget {budget} for {len(weights)} slots of cap {cap}")
        self.weights = weights
        self.gain = gain
        self.budget = budget
        self.cap = cap

    @classmethod
    def from_function(cls, weights, gain, budget, cap):
        return cls(weights, np.array([gain(k) for k in range(cap + 1)]), budget, cap)

    def objective(self, levels):
        return math.fsum(w * self.gain[k] for w, k in zip(self.weights, levels))


class Allocation:
    def __init__(self, levels, objective):
        self.levels = tuple(levels)
        self.objective = objective

    def __repr__(self):
        return f"Allocation(levels={self.levels}, objective={self.objective})"


def allocate_greedy(prob):
    """
    Optimal allocation by repeatedly taking the largest marginal gain.

    Ties go to the lowest slot index.
    """
    marginals = np.diff(prob.gain)
    levels = [0] * len(prob.weights)
    heap = []
    if prob.cap > 0:
        heap = [(-w * marginals[0], i) for i, w in enumerate(prob.weights)]
        heapq.heapify(heap)
    for _ in range(prob.budget):
        _, i = heapq.heappop(heap)
        levels[i] += 1
        if levels[i] < prob.cap:
            heapq.heappush(heap, (-prob.weights[i] * marginals[levels[i]], i))
    return Allocation(tuple(levels), prob.objective(levels))


def brute_force_allocation(prob):
    """Exhaustive search over all feasible allocations (small instances only)."""
    best = None
    n = len(prob.weights)
    for levels in itertools.product(range(prob.cap + 1), repeat=n):
        if sum(levels) != prob.budget:
            continue
        value = prob.objective(levels)
        if best is None or value > best.objective:
            best = Allocation(tuple(levels), value)
    return best


def _y_problem(x, y, m):
    x = np.asarray(x, dtype=float).ravel()
    if len(y) != m:
        raise DomainError(f"len(y) = {len(y)} differs from m = {m}")
    if m < len(x):
        raise DomainError(f"Need m >= n, got m={m}, n={len(x)}")
    weights = np.sort(np.abs(x))[::-1]
    gain = np.concatenate(([0.0], np.cumsum(y.array)))
    return AllocationProblem(weights, gain, m, m)


def norm_y(x, y, m):
    """max over k_1+...+k_n = m of sum_i (sum_{j<=k_i} y_j) |x_i|."""
    return allocate_greedy(_y_problem(x, y, m)).objective


def norm_y_brute(x, y, m):
    return brute_force_allocation(_y_problem(x, y, m)).objective


def orlicz_from_star_inverse(us, ws):
    """
    N from the grid values of N^{*-1}: N^{*-1}(us[k]) = ws[k], affine in between.

    Past the last grid point N* continues with its last slope. Once ws stops
    increasing, N^{*-1} is flat there and N* is +inf beyond.
    """
    us = np.asarray(us, dtype=float)
    ws = np.asarray(ws, dtype=float)
    if us[0] != 0 or ws[0] != 0:
        raise InvariantError("N^{*-1} must start at (0, 0)")
    steps = np.diff(ws)
    if np.any(steps < 0):
        raise InvariantError("N^{*-1} grid values must be nondecreasing")
    increments = steps / np.diff(us)
    if np.any(np.diff(increments) > CHECK_TOL * np.maximum(1.0, increments[:-1])):
        raise InvariantError("N^{*-1} grid values are not concave")
    rising = int(np.count_nonzero(steps > 1e-14 * ws[-1]))
    if rising == 0:
        raise DomainError("N^{*-1} vanishes identically")
    if rising < len(steps):
        log(f"N^(*-1) flat after {rising} of {len(steps)} grid steps", "warning")
        star = PiecewiseAffine.from_points(ws[: rising + 1], us[: rising + 1], math.inf)
    else:
        last = (us[-1] - us[-2]) / (ws[-1] - ws[-2])
        star = PiecewiseAffine.from_points(ws, us, last)
    return star.conjugate()


def orlicz_from_prefix(values, total, normalize=True):
    """
    N with N^{*-1}(l/total) = prefix_sums[l] / total (or prefix_sums[l] when not
    ``normalize``), affine between grid points.
    """
    if len(values) != total:
        raise DomainError(f"Expected {total} values, got {len(values)}")
    if not values.is_concave() or (len(values) and values.values[-1] < 0):
        raise InvariantError("Prefix sums must come from nonnegative sorted values")
    scale = 1.0 / total if normalize else 1.0
    us = np.arange(total + 1) / total
    ws = np.concatenate(([0.0], values.prefix_sums)) * scale
    return orlicz_from_star_inverse(us, ws)


def star_inverse_grid(M, n):
    """M^{*-1}(j/n) for j = 0..n."""
    return np.asarray(M.conjugate().inverse(np.arange(n + 1) / n), dtype=float)


def lemma24_values(a, M):
    """Rearrangement of the n^2 numbers a_i * n * (M^{*-1}(j/n) - M^{*-1}((j-1)/n))."""
    a.require_positive()
    n = len(a)
    increments = n * np.diff(star_inverse_grid(M, n))
    return rearrange(np.outer(a.array, increments))


def construct_N_lemma24(a, M):
    """N with N^{*-1}(l/n^2) = (1/n^2) * sum of the l largest s(k)."""
    n = len(a)
    return orlicz_from_prefix(lemma24_values(a, M), n * n)


def lemma25_profile(a, r):
    """
    C_r [ (1/n) sum_{i<=l} a_i + (l/n)^{1/r*} ((1/n) sum_{i>l} a_i^r)^{1/r} ], l = 0..n.
    """
    arr = a.array
    n = len(arr)
    u = np.arange(n + 1) / n
    head = np.concatenate(([0.0], np.cumsum(arr))) / n
    powers = arr**r
    tail = (math.fsum(powers) - np.concatenate(([0.0], np.cumsum(powers)))) / n
    tail = np.maximum(tail, 0.0)
    rs = conjugate_exponent(r)
    return power_conjugate_inverse_constant(r) * (head + u ** (1.0 / rs) * tail ** (1.0 / r))


def construct_N_lemma25(a, e):
    """
    N-bar: N^{*-1} of the fine-grid construction for M = t^r, kept at l/n and
    affine in between. Its grid values sit between profile/8 and the profile.
    """
    a.require_positive()
    n = len(a)
    fine = lemma24_values(a, Power(e.r))
    ws = np.array([fine.top(ell * n) for ell in range(n + 1)]) / (n * n)
    return orlicz_from_star_inverse(np.arange(n + 1) / n, ws)


@dataclass
class GridCheck:
    """Two-sided comparison of grid values against a profile."""

    ratios: np.ndarray
    lower: float
    upper: float

    @property
    def passed(self):
        if len(self.ratios) == 0:
            return True
        return bool(
            self.ratios.min() >= self.lower * (1 - CHECK_TOL)
            and self.ratios.max() <= self.upper * (1 + CHECK_TOL)
        )

    def to_dict(self):
        return {
            "min_ratio": float(self.ratios.min()) if len(self.ratios) else None,
            "max_ratio": float(self.ratios.max()) if len(self.ratios) else None,
            "lower": self.lower,
            "upper": self.upper,
            "pass": self.passed,
        }


def check_lemma25_grid(a, r):
    """
    Grid inequalities of the fine-grid construction N for M = t^r.

    "coarse": profile(l) / N^{*-1}(l/n) in [1, 8] for l = 1..n.
    "fine": C_r (1/n)(l/n)^{1/r*}(sum_{i<=l} a_i^r)^{1/r} / N^{*-1}(l/n^2) in [1, 2]
    for l = 1..n; "fine_beyond" holds the same ratios for l = n+1..n^2.
    """
    n = len(a)
    N = construct_N_lemma24(a, Power(r))
    star_inv = N.conjugate()
    coarse_u = np.arange(1, n + 1) / n
    coarse = lemma25_profile(a, r)[1:] / np.asarray(star_inv.inverse(coarse_u))

    ell = np.arange(1, n * n + 1)
    head = np.cumsum(a.array**r)
    head = head[np.minimum(ell, n) - 1]
    rs = conjugate_exponent(r)
    bound = power_conjugate_inverse_constant(r) / n * (ell / n) ** (1 / rs) * head ** (1 / r)
    fine = bound / np.asarray(star_inv.inverse(ell / (n * n)))
    checks = {
        "coarse": GridCheck(coarse, 1.0, 8.0),
        "fine": GridCheck(fine[:n], 1.0, 2.0),
        "fine_beyond": GridCheck(fine[n:], 1.0, 2.0),
    }
    if not checks["fine_beyond"].passed:
        log(f"Fine-grid bound fails beyond l = n = {n} (not covered by the argument)",
            "warning")
    return checks


def lemma26_profile(a, e):
    """
    C_r [ (l/n)^{1/p*} ((1/n) sum_{i<=l} a_i^p)^{1/p}
          + (l/n)^{1/r*} ((1/n) sum_{i>l} a_i^r)^{1/r} ], l = 0..n.
    """
    arr = a.array
    n = len(arr)
    u = np.arange(n + 1) / n
    head = np.concatenate(([0.0], np.cumsum(arr**e.p))) / n
    powers = arr**e.r
    tail = np.maximum((math.fsum(powers) - np.concatenate(([0.0], np.cumsum(powers)))) / n, 0)
    first = u ** (1.0 / e.p_star) * head ** (1.0 / e.p)
    return e.c_r * (first + u ** (1.0 / e.r_star) * tail ** (1.0 / e.r))


def lemma26_composite(a, e):
    """M(t^p) with M the N-bar construction for (a_i^p) and exponent r/p."""
    if not 1 <= e.p < e.r:
        raise DomainError(f"Need 1 <= p < r, got p={e.p}, r={e.r}")
    a.require_positive()
    if e.p == 1:
        return construct_N_lemma25(a, e)
    inner = construct_N_lemma25(WeightVector(tuple(a.array**e.p)), Exponents(1.0, e.r / e.p))
    return compose_power(inner, e.p)


def construct_N_lemma26(a, e):
    """N whose N^{*-1} agrees with that of M(t^p) at l/n and is affine in between."""
    composite = lemma26_composite(a, e)
    if e.p == 1:
        return composite
    n = len(a)
    us = np.arange(n + 1) / n
    ws = np.asarray(composite.conjugate().inverse(us), dtype=float)
    return orlicz_from_star_inverse(us, ws)


def proposition_outer(y, p):
    """
    Outer function M_y of the matrix space, with
    M_y^{*-1}(l/n) ~ (1/n) sum_{i<=l} y_i + (l/n)^{1/p*} ((1/n) sum_{i>l} y_i^p)^{1/p}.
    """
    return construct_N_lemma25(y, Exponents(1.0, p))


def y_from_M(M, n):
    """y_l = n (M^{*-1}(l/n) - M^{*-1}((l-1)/n)), so M^{*-1}(l/n) = (1/n) sum_{i<=l} y_i."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    y = n * np.diff(star_inverse_grid(M, n))
    if np.any(y <= 0):
        log(f"Degenerate weights from {M.kind}: {np.count_nonzero(y <= 0)} zero entries",
            "warning")
    return WeightVector(tuple(np.maximum(y, 0.0)))


ORDERINGS = {
    # name: (regularity exponent, chain exponent)
    "stated": lambda e: (e.p, e.r),
    "proof": lambda e: (e.r, e.p),
}


@dataclass
class ChainReport:
    ordering: str
    n: int
    regularity_exponent: float
    chain_exponent: float
    ratios: np.ndarray

    @property
    def max_ratio(self):
        return float(self.ratios.max())

    @property
    def passed(self):
        return bool(
            self.ratios.min() >= 1 - CHECK_TOL and self.ratios.max() <= 3 * (1 + CHECK_TOL)
        )

    def to_dict(self):
        return {
            "ordering": self.ordering,
            "n": self.n,
            "regularity_exponent": self.regularity_exponent,
            "chain_exponent": self.chain_exponent,
            "max_ratio": self.max_ratio,
            "pass": self.passed,
        }


def verify_My_equiv_M(M, e, n, ordering="stated"):
    """
    Ratios (1/n sum_{i<=l} y_i + (l/n)^{1/c*}(1/n sum_{i>l} y_i^c)^{1/c}) / M^{*-1}(l/n)
    for y = y_from_M(M, n), with the chain exponent c fixed by ``ordering``.

    Raises:
        PreconditionError: M(t)/t^q is not nonincreasing for the regularity exponent q.
    """
    if ordering not in ORDERINGS:
        raise DomainError(f"Unknown ordering {ordering!r}")
    reg_exp, chain_exp = ORDERINGS[ordering](e)
    report = check_regularity(M, reg_exp, "decreasing")
    if not report:
        raise PreconditionError(
            f"M(t)/t^{reg_exp} is not decreasing between t={report.violation[0]:.6g} "
            f"and t={report.violation[1]:.6g}",
            report.violation,
        )
    y = y_from_M(M, n).array
    base = star_inverse_grid(M, n)[1:]
    ell = np.arange(1, n + 1)
    head = np.cumsum(y) / n
    powers = y**chain_exp
    tail = np.maximum((math.fsum(powers) - np.cumsum(powers)) / n, 0.0)
    cs = conjugate_exponent(chain_exp)
    middle = head + (ell / n) ** (1.0 / cs) * tail ** (1.0 / chain_exp)
    return ChainReport(ordering, n, reg_exp, chain_exp, middle / base)


def compare_orderings(M, e, n):
    """Run every ordering; orderings whose precondition fails map to None."""
    results = {}
    for name in ORDERINGS:
        try:
            results[name] = verify_My_equiv_M(M, e, n, name)
        except PreconditionError as exc:
            log(f"Ordering {name}: {exc}", "debug")
            results[name] = None
    return results
