"""
Orlicz functions, their conjugates and inverses, and Luxemburg norms.

Two exact representations are supported: the power family c*t^p and convex
piecewise-affine functions given by breakpoints plus a terminal slope. A
terminal slope of ``inf`` means the function is finite only up to its last
breakpoint (+inf beyond), which is what conjugates of functions with a finite
terminal slope look like. ``ComposedPower`` represents M(t^p) for a
piecewise-affine M.
"""

from __future__ import annotations

import json
import math
from functools import cached_property
from pathlib import Path

import numpy as np

from .config import log
from .errors import DomainError, InvariantError, OrliczRangeError

__all__ = [
    "REL_TOL",
    "MAX_ITER",
    "CHECK_TOL",
    "Exponents",
    "WeightVector",
    "OrliczFunction",
    "Power",
    "PiecewiseAffine",
    "ComposedPower",
    "RegularityReport",
    "conjugate_exponent",
    "power_conjugate_inverse_constant",
    "normalized_power_conjugate",
    "compose_power",
    "evaluate",
    "inverse",
    "conjugate",
    "luxemburg_norm",
    "luxemburg_norms",
    "check_regularity",
    "equivalence_constants",
    "function_from_dict",
    "function_from_string",
]

# Bisection: relative tolerance and hard iteration cap
REL_TOL = 1e-10
MAX_ITER = 200

# Relative slack for every inequality check in the toolkit
CHECK_TOL = 1e-9

# Breakpoints closer than this (relative) are merged
_MERGE_TOL = 1e-12


def conjugate_exponent(q):
    """Return q* with 1/q + 1/q* = 1 (inf for q = 1)."""
    if q < 1:
        raise DomainError(f"Exponent must be >= 1, got {q}")
    if q == 1:
        return math.inf
    if math.isinf(q):
        return 1.0
    return q / (q - 1.0)


def power_conjugate_inverse_constant(r):
    """
    C_r = r^(1/r) * (r*)^(1/r*).

    The raw Legendre conjugate of t^r inverts to C_r * t^(1/r*), so C_r is the
    constant every formula built on M^{*-1} for M = t^r carries.
    """
    if r == 1:
        return 1.0
    rs = conjugate_exponent(r)
    return r ** (1.0 / r) * rs ** (1.0 / rs)


def _as_nonneg(values, what="argument"):
    arr = np.asarray(values, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError(f"Negative or NaN {what}: {values!r}")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def _bisect(hi_side, lo, hi, rel_tol=REL_TOL):
    """Vectorized bisection; ``hi_side(mid)`` tells where the root is not."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(MAX_ITER):
        if np.all(hi - lo <= rel_tol * hi):
            break
        mid = 0.5 * (lo + hi)
        on_hi = hi_side(mid)
        hi = np.where(on_hi, mid, hi)
        lo = np.where(on_hi, lo, mid)
    return hi


class Exponents:
    """Exponent pair (p, r) with conjugates and the constant C_r."""

    def __init__(self, p, r):
        if not (math.isfinite(p) and math.isfinite(r)):
            raise DomainError("Exponents must be finite")
        if p < 1 or r <= 1:
            raise DomainError(f"Need p >= 1 and r > 1, got p={p}, r={r}")
        self.p = float(p)
        self.r = float(r)

    def __repr__(self):
        return f"Exponents(p={self.p}, r={self.r})"

    def __eq__(self, other):
        return isinstance(other, Exponents) and (self.p, self.r) == (other.p, other.r)

    def __hash__(self):
        return hash((self.p, self.r))

    @property
    def p_star(self):
        return conjugate_exponent(self.p)

    @property
    def r_star(self):
        return conjugate_exponent(self.r)

    @property
    def c_r(self):
        return power_conjugate_inverse_constant(self.r)

    def require_ordered(self, strict_two=True):
        """Require 1 < p < r (< 2 when ``strict_two``), as for the embedding results."""
        upper = 2.0 if strict_two else math.inf
        if not (1 < self.p < self.r < upper):
            raise DomainError(f"Need 1 < p < r < {upper}, got p={self.p}, r={self.r}")
        return self


class WeightVector:
    """
    Finite nonincreasing sequence (a, x, y, z weights).

    Zero entries are accepted, since y_from_M yields (n, 0, ..., 0) for
    M(t) = t. Every construction that divides by or raises a weight calls
    ``require_positive()`` first.
    """

    def __init__(self, entries):
        arr = np.asarray(entries, dtype=float).ravel()
        if not np.all(np.isfinite(arr)):
            raise DomainError("Weight vector entries must be finite")
        if np.any(arr < 0):
            raise DomainError("Weight vector entries must be nonnegative")
        slack = _MERGE_TOL * np.maximum(1.0, arr[:-1])
        if np.any(arr[1:] > arr[:-1] + slack):
            raise DomainError("Weight vector must be nonincreasing")
        self.entries = tuple(float(v) for v in arr)

    def __repr__(self):
        return f"WeightVector({self.entries})"

    def __eq__(self, other):
        return isinstance(other, WeightVector) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    @classmethod
    def sorted_from(cls, values):
        """Absolute values sorted nonincreasing."""
        arr = np.sort(np.abs(np.asarray(values, dtype=float)).ravel())[::-1]
        return cls(tuple(arr))

    @classmethod
    def generated(cls, n, exponent):
        """The weights (n/i)^(1/exponent), i = 1..n."""
        if n < 1:
            raise DomainError(f"n must be >= 1, got {n}")
        i = np.arange(1, n + 1, dtype=float)
        return cls(tuple((n / i) ** (1.0 / exponent)))

    def __len__(self):
        return len(self.entries)

    @property
    def array(self):
        return np.asarray(self.entries, dtype=float)

    @property
    def is_positive(self):
        return len(self.entries) > 0 and self.entries[-1] > 0

    def require_positive(self):
        if not self.is_positive:
            raise DomainError("Weight vector must be strictly positive")
        return self


class OrliczFunction:
    """Common interface of every representation (vectorized over arguments)."""

    kind = "abstract"

    def _key(self):
        return ()

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def __repr__(self):
        return f"{type(self).__name__}{self._key()}"

    def __call__(self, t):
        raise NotImplementedError

    def inverse(self, v, strict=False):
        raise NotImplementedError

    def conjugate(self):
        raise NotImplementedError

    @property
    def domain_end(self):
        """Largest t with f(t) finite."""
        return math.inf

    @property
    def is_strict(self):
        """True when f(t) > 0 for all t > 0 and f is finite everywhere."""
        return True

    def breakpoint_args(self):
        return np.empty(0)

    def closed_form_norms(self, rows):
        """Luxemburg norms without bisection, when a closed form exists."""
        return None

    def to_dict(self):
        raise DomainError(f"{type(self).__name__} has no JSON form")


class Power(OrliczFunction):
    """coef * t^p, p >= 1."""

    kind = "power"

    def __init__(self, p, coef=1.0):
        if not math.isfinite(p) or p < 1:
            raise DomainError(f"Power exponent must be finite and >= 1, got {p}")
        if not (math.isfinite(coef) and coef > 0):
            raise DomainError(f"Power coefficient must be positive, got {coef}")
        self.p = float(p)
        self.coef = float(coef)

    def _key(self):
        return (self.p, self.coef)

    def __call__(self, t):
        arr = _as_nonneg(t)
        return _out(self.coef * arr**self.p, t)

    def inverse(self, v, strict=False):
        arr = _as_nonneg(v, "value")
        return _out((arr / self.coef) ** (1.0 / self.p), v)

    def conjugate(self):
        if self.p == 1:
            # indicator of [0, coef]
            return PiecewiseAffine(((0.0, 0.0), (self.coef, 0.0)), math.inf)
        q = conjugate_exponent(self.p)
        coef = (self.p - 1.0) * self.coef ** (1.0 - q) * self.p ** (-q)
        return Power(q, coef)

    def closed_form_norms(self, rows):
        sums = np.sum(np.abs(rows) ** self.p, axis=1)
        return self.coef ** (1.0 / self.p) * sums ** (1.0 / self.p)

    def to_dict(self):
        data = {"kind": "power", "p": self.p}
        if self.coef != 1.0:
            data["coef"] = self.coef
        return data


def normalized_power_conjugate(r):
    """
    Normalized conjugate (1/r)^(1/r) (1/r*)^(1/r*) s^(r*) of t^r.

    Kept for comparison only. Its inverse is not C_r s^(1/r*); the raw
    ``Power(r).conjugate()`` is the one every construction uses.
    """
    rs = conjugate_exponent(r)
    if math.isinf(rs):
        raise DomainError("Normalized conjugate needs r > 1")
    return Power(rs, (1.0 / r) ** (1.0 / r) * (1.0 / rs) ** (1.0 / rs))


class PiecewiseAffine(OrliczFunction):
    """
    Convex piecewise-affine function through ``breakpoints`` (t_0 = 0, v_0 = 0),
    extended beyond the last breakpoint with ``terminal_slope`` (inf: +inf there).
    """

    kind = "pwa"

    def __init__(self, breakpoints, terminal_slope):
        pts = np.asarray(breakpoints, dtype=float).reshape(-1, 2)
        if len(pts) == 0 or pts[0, 0] != 0 or pts[0, 1] != 0:
            raise DomainError("First breakpoint must be (0, 0)")
        if not np.all(np.isfinite(pts)):
            raise DomainError("Breakpoints must be finite")
        ts, vs = pts[:, 0], pts[:, 1]
        if np.any(np.diff(ts) <= 0):
            raise DomainError("Breakpoint abscissae must be strictly increasing")
        if np.any(vs < 0):
            raise DomainError("Breakpoint values must be nonnegative")
        slope = float(terminal_slope)
        if math.isnan(slope) or slope <= 0:
            raise DomainError(f"Terminal slope must be positive, got {slope}")
        if math.isinf(slope) and len(pts) < 2:
            raise DomainError("A bounded domain needs a second breakpoint")
        slopes = np.diff(vs) / np.diff(ts)
        all_slopes = slopes if math.isinf(slope) else np.append(slopes, slope)
        if len(all_slopes) and all_slopes[0] < 0:
            raise DomainError("Orlicz function must be nondecreasing")
        slack = CHECK_TOL * np.maximum(1.0, np.abs(all_slopes[:-1]))
        if np.any(np.diff(all_slopes) < -slack):
            raise DomainError("Slopes must be nondecreasing (convexity)")
        self.breakpoints = tuple((float(t), float(v)) for t, v in pts)
        self.terminal_slope = slope

    def _key(self):
        return (self.breakpoints, self.terminal_slope)

    @classmethod
    def from_points(cls, ts, vs, terminal_slope):
        """Build a canonical function: duplicate and collinear breakpoints merged."""
        ts = np.asarray(ts, dtype=float)
        vs = np.asarray(vs, dtype=float)
        keep_t, keep_v = [0.0], [0.0]
        for t, v in zip(ts[1:], vs[1:]):
            if t - keep_t[-1] <= _MERGE_TOL * max(1.0, abs(t)):
                continue
            keep_t.append(float(t))
            keep_v.append(max(float(v), 0.0))
        # drop interior points lying on a straight line
        i = 1
        while i < len(keep_t) - 1:
            left = (keep_v[i] - keep_v[i - 1]) / (keep_t[i] - keep_t[i - 1])
            right = (keep_v[i + 1] - keep_v[i]) / (keep_t[i + 1] - keep_t[i])
            if abs(right - left) <= _MERGE_TOL * max(1.0, abs(left)):
                del keep_t[i], keep_v[i]
            else:
                i += 1
        if math.isfinite(terminal_slope) and len(keep_t) > 1:
            last = (keep_v[-1] - keep_v[-2]) / (keep_t[-1] - keep_t[-2])
            if abs(terminal_slope - last) <= _MERGE_TOL * max(1.0, abs(last)):
                keep_t.pop()
                keep_v.pop()
        return cls(tuple(zip(keep_t, keep_v)), float(terminal_slope))

    @classmethod
    def interpolating(cls, f, grid, terminal_slope=None):
        """Piecewise-affine interpolant of ``f`` on ``grid`` (0 is prepended)."""
        grid = np.unique(np.concatenate(([0.0], np.asarray(grid, dtype=float))))
        values = np.asarray(f(grid), dtype=float)
        if terminal_slope is None:
            terminal_slope = (values[-1] - values[-2]) / (grid[-1] - grid[-2])
        return cls.from_points(grid, values, terminal_slope)

    @cached_property
    def ts(self):
        return np.array([t for t, _ in self.breakpoints])

    @cached_property
    def vs(self):
        return np.array([v for _, v in self.breakpoints])

    @cached_property
    def slopes(self):
        return np.diff(self.vs) / np.diff(self.ts)

    @property
    def bounded(self):
        return math.isinf(self.terminal_slope)

    @property
    def domain_end(self):
        return self.ts[-1] if self.bounded else math.inf

    @property
    def is_strict(self):
        if self.bounded:
            return False
        return self.vs[1] > 0 if len(self.vs) > 1 else True

    def breakpoint_args(self):
        return self.ts[1:]

    def __call__(self, t):
        arr = _as_nonneg(t)
        ts, vs = self.ts, self.vs
        inside = np.interp(arr, ts, vs)
        beyond = arr > ts[-1]
        if np.any(beyond):
            if self.bounded:
                extended = np.full_like(inside, math.inf)
            else:
                extended = vs[-1] + self.terminal_slope * (arr - ts[-1])
            inside = np.where(beyond, extended, inside)
        return _out(inside, t)

    def inverse(self, v, strict=False):
        """
        Generalized inverse sup{t : f(t) <= v}; 0 for v = 0.

        Past the finite range of a bounded function the domain end is returned,
        or ``OrliczRangeError`` is raised when ``strict``.
        """
        arr = _as_nonneg(v, "value")
        ts, vs = self.ts, self.vs
        j0 = int(np.flatnonzero(vs <= 0)[-1])
        out = np.interp(arr, vs[j0:], ts[j0:])
        out = np.where(arr <= 0, 0.0, out)
        beyond = arr > vs[-1]
        if np.any(beyond):
            if self.bounded:
                if strict:
                    raise OrliczRangeError(
                        f"Value beyond the range [0, {vs[-1]}] of a bounded function"
                    )
                out = np.where(beyond, ts[-1], out)
            else:
                out = np.where(beyond, ts[-1] + (arr - vs[-1]) / self.terminal_slope, out)
        return _out(out, v)

    def conjugate(self):
        """Exact Legendre conjugate: slopes become breakpoints and vice versa."""
        ts, vs = self.ts, self.vs
        xs = np.concatenate(([0.0], self.slopes))
        if not self.bounded:
            xs = np.append(xs, self.terminal_slope)
        # the sup of x*t - f(t) is attained at a breakpoint for x in the domain
        values = np.max(np.outer(xs, ts) - vs, axis=1)
        new_terminal = math.inf if not self.bounded else float(ts[-1])
        return PiecewiseAffine.from_points(xs, values, new_terminal)

    def to_dict(self):
        return {
            "kind": "pwa",
            "breakpoints": [[t, v] for t, v in self.breakpoints],
            "terminal_slope": None if self.bounded else self.terminal_slope,
        }


class ComposedPower(OrliczFunction):
    """N(t) = outer(t^p) for a piecewise-affine ``outer`` and p > 1."""

    kind = "composed"

    def __init__(self, outer, p):
        if not isinstance(outer, PiecewiseAffine):
            raise DomainError("ComposedPower needs a piecewise-affine outer function")
        if not (math.isfinite(p) and p > 1):
            raise DomainError(f"Composition exponent must be > 1, got {p}")
        self.outer = outer
        self.p = float(p)

    def _key(self):
        return (self.outer, self.p)

    def __call__(self, t):
        arr = _as_nonneg(t)
        return _out(self.outer(arr**self.p), t)

    def inverse(self, v, strict=False):
        return _out(np.asarray(self.outer.inverse(v, strict)) ** (1.0 / self.p), v)

    def conjugate(self):
        return _ComposedConjugate(self)

    @property
    def domain_end(self):
        return self.outer.domain_end ** (1.0 / self.p)

    @property
    def is_strict(self):
        return self.outer.is_strict

    def breakpoint_args(self):
        return self.outer.breakpoint_args() ** (1.0 / self.p)

    def closed_form_norms(self, rows):
        # ||x||_{M(t^p)} = || |x|^p ||_M^(1/p)
        return luxemburg_norms(self.outer, np.abs(rows) ** self.p) ** (1.0 / self.p)

    def conjugate_values(self, s):
        """Exact sup_t (s t - outer(t^p)), maximized segment by segment."""
        s = np.atleast_1d(_as_nonneg(s)).astype(float)
        u, v = self.outer.ts, self.outer.vs
        taus = u ** (1.0 / self.p)
        sigmas = list(self.outer.slopes)
        lows = list(taus[:-1])
        highs = list(taus[1:])
        if not self.outer.bounded:
            sigmas.append(self.outer.terminal_slope)
            lows.append(taus[-1])
            highs.append(math.inf)
        candidates = [np.broadcast_to(tau, s.shape) for tau in taus]
        for sigma, low, high in zip(sigmas, lows, highs):
            if sigma > 0:
                stationary = (s / (self.p * sigma)) ** (1.0 / (self.p - 1.0))
                candidates.append(np.clip(stationary, low, high))
        cand = np.stack(candidates, axis=1)
        return np.max(s[:, None] * cand - self(cand), axis=1)

    def to_dict(self):
        return {"kind": "composed", "p": self.p, "outer": self.outer.to_dict()}


class _ComposedConjugate(OrliczFunction):
    """Conjugate of a ComposedPower; exact values, inverse by bisection."""

    kind = "composed-conjugate"

    def __init__(self, base):
        self.base = base

    def _key(self):
        return (self.base,)

    def __call__(self, t):
        arr = _as_nonneg(t)
        vals = self.base.conjugate_values(arr.ravel()).reshape(arr.shape)
        return _out(vals, t)

    def inverse(self, v, strict=False):
        arr = np.atleast_1d(_as_nonneg(v, "value")).astype(float)
        flat = arr.ravel()
        hi = np.ones_like(flat)
        for _ in range(MAX_ITER):
            short = self.base.conjugate_values(hi) < flat
            if not np.any(short):
                break
            hi = np.where(short, 2.0 * hi, hi)
        else:
            raise InvariantError("Conjugate inverse bracket did not close")
        lo = np.zeros_like(flat)
        root = _bisect(lambda mid: self.base.conjugate_values(mid) > flat, lo, hi, 1e-13)
        root = np.where(flat <= 0, 0.0, root)
        return _out(root.reshape(arr.shape), v)

    def conjugate(self):
        return self.base


def compose_power(M, p):
    """Return M(t^p) in the most exact representation available."""
    if p == 1:
        return M
    if isinstance(M, Power):
        return Power(M.p * p, M.coef)
    if isinstance(M, PiecewiseAffine):
        return ComposedPower(M, p)
    raise DomainError(f"Cannot compose {type(M).__name__} with t^{p}")


# --- functional interface ---


def evaluate(f, t):
    """f(t) for t >= 0 (scalar or array)."""
    return f(t)


def inverse(f, v, strict=False):
    """Generalized inverse of f at v >= 0."""
    return f.inverse(v, strict)


def conjugate(f):
    """Legendre conjugate M*(x) = sup_t (x t - M(t))."""
    return f.conjugate()


def luxemburg_norms(f, rows):
    """
    Luxemburg norms of every row of ``rows``.

    Bisection on rho over [|x|_inf / f^{-1}(1), |x|_inf / f^{-1}(1/n)], run for all
    rows at once.
    """
    rows = np.abs(np.asarray(rows, dtype=float))
    if rows.ndim == 1:
        rows = rows[None, :]
    if not np.all(np.isfinite(rows)):
        raise DomainError("Luxemburg norm needs finite entries")
    n = rows.shape[1]
    out = np.zeros(rows.shape[0])
    if n == 0:
        return out
    closed = f.closed_form_norms(rows)
    if closed is not None:
        return np.asarray(closed, dtype=float)
    sup = rows.max(axis=1)
    live = sup > 0
    if not np.any(live):
        return out
    x, s = rows[live], sup[live]
    lo = s / f.inverse(1.0)
    hi = s / f.inverse(1.0 / n)

    def feasible(rho):
        return np.sum(f(x / rho[:, None]), axis=1) <= 1.0

    at_lo = feasible(lo)
    out[live] = np.where(at_lo, lo, _bisect(feasible, lo, hi))
    return out


def luxemburg_norm(f, x):
    """inf{rho > 0 : sum_i f(|x_i|/rho) <= 1}; 0 for the zero vector."""
    return float(luxemburg_norms(f, np.asarray(x, dtype=float).reshape(1, -1))[0])


class RegularityReport:
    """Outcome of a regularity check, truthy when it holds."""

    def __init__(self, ok, violation=None):
        self.ok = ok
        self.violation = violation

    def __bool__(self):
        return self.ok


def check_regularity(f, p, direction="decreasing", points=1000,
                     span=(1e-6, 1e6)):
    """
    Check that f(t)/t^p is monotone in ``direction`` (constant counts as both).

    Args:
        f: Orlicz function.
        p: Exponent >= 1.
        direction: "decreasing" (nonincreasing) or "increasing" (nondecreasing).
        points: Size of the geometric grid over ``span``.

    Returns:
        RegularityReport with the first violating pair (t1, t2), if any.
    """
    if p < 1:
        raise DomainError(f"Regularity exponent must be >= 1, got {p}")
    if direction not in ("decreasing", "increasing"):
        raise DomainError(f"Unknown direction {direction!r}")
    grid = np.geomspace(span[0], span[1], points)
    extra = f.breakpoint_args()
    grid = np.unique(np.concatenate((grid, extra[(extra >= span[0]) & (extra <= span[1])])))
    grid = grid[grid <= f.domain_end]
    if len(grid) < 2:
        return RegularityReport(True)
    ratio = np.asarray(f(grid)) / grid**p
    step = np.diff(ratio)
    slack = CHECK_TOL * np.maximum(np.abs(ratio[:-1]), np.abs(ratio[1:]))
    bad = step > slack if direction == "decreasing" else step < -slack
    if not np.any(bad):
        return RegularityReport(True)
    k = int(np.argmax(bad))
    return RegularityReport(False, (float(grid[k]), float(grid[k + 1])))


def equivalence_constants(f, g, grid):
    """(min, max) over ``grid`` of f^{-1}(t) / g^{-1}(t)."""
    grid = np.asarray(grid, dtype=float).ravel()
    if len(grid) == 0:
        raise DomainError("Equivalence grid is empty")
    if np.any(grid <= 0):
        raise DomainError("Equivalence grid must be positive")
    ratio = np.asarray(f.inverse(grid)) / np.asarray(g.inverse(grid))
    return float(ratio.min()), float(ratio.max())


# --- serialization ---


def function_from_dict(data, strict=True):
    """Parse the JSON form; ``strict`` rejects functions that vanish or blow up."""
    kind = data.get("kind")
    if kind == "power":
        f = Power(float(data["p"]), float(data.get("coef", 1.0)))
    elif kind == "pwa":
        slope = data.get("terminal_slope")
        f = PiecewiseAffine(
            tuple(tuple(pt) for pt in data["breakpoints"]),
            math.inf if slope is None else float(slope),
        )
    elif kind == "composed":
        f = ComposedPower(function_from_dict(data["outer"], strict), float(data["p"]))
    else:
        raise DomainError(f"Unknown Orlicz function kind {kind!r}")
    if strict and not f.is_strict:
        raise DomainError("Orlicz function must be positive for t > 0 and finite")
    return f


def function_from_string(text):
    """
    Parse "power:P", "power:P:COEF", inline JSON or a path to a JSON file.
    """
    text = text.strip()
    if text.startswith("power:"):
        parts = text.split(":")[1:]
        try:
            values = [float(part) for part in parts]
        except ValueError as exc:
            raise DomainError(f"Bad power spec {text!r}") from exc
        if len(values) not in (1, 2):
            raise DomainError(f"Bad power spec {text!r}")
        return Power(*values)
    if text.startswith("{"):
        return function_from_dict(json.loads(text))
    path = Path(text)
    if path.exists():
        with open(path, "r") as f:
            return function_from_dict(json.load(f))
    raise DomainError(f"Cannot parse Orlicz function {text!r}")


def describe(f):
    """JSON-friendly description, falling back to the kind name."""
    try:
        return f.to_dict()
    except DomainError:
        log(f"No JSON form for {f.kind}", "debug")
        return {"kind": f.kind}
