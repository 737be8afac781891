"""
Permutation averages: exact enumeration over S_n (or products of S_n) and
Monte Carlo estimates with a normal-approximation confidence interval.

Both modes split the work into fixed-size blocks. Block partial sums are merged
once, in block order, so a run is reproducible for a fixed seed and block size
whatever the thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from .config import config, log
from .errors import DomainError, ResourceError
from .orlicz import WeightVector, luxemburg_norms
from .sampling import (
    STREAM_PERMUTATIONS,
    block_generator,
    block_ranges,
    permutation_table,
    run_blocks,
    sample_permutations,
)

Z95 = float(stats.norm.ppf(0.975))


class Mode(str, Enum):
    EXACT = "exact"
    MONTE_CARLO = "monte_carlo"
    AUTO = "auto"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {"mc": cls.MONTE_CARLO, "hybrid": cls.MONTE_CARLO}
        try:
            return aliases.get(value) or cls(value)
        except ValueError as exc:
            raise DomainError(f"Unknown mode {value!r}") from exc


@dataclass(frozen=True)
class AverageEstimate:
    value: float
    mode: str
    samples: int
    ci95_halfwidth: float
    seed: int

    def __post_init__(self):
        if self.ci95_halfwidth < 0:
            raise DomainError("Confidence half-width must be nonnegative")
        if self.mode == Mode.EXACT.value and self.ci95_halfwidth != 0:
            raise DomainError("Exact averages carry no confidence interval")

    def root(self, p):
        """Estimate of value^(1/p), interval by the delta method."""
        value = self.value ** (1.0 / p)
        width = 0.0
        if self.ci95_halfwidth and self.value > 0:
            width = self.ci95_halfwidth * value / (p * self.value)
        return AverageEstimate(value, self.mode, self.samples, width, self.seed)

    def to_dict(self):
        return {
            "value": self.value,
            "mode": self.mode,
            "samples": self.samples,
            "ci95": self.ci95_halfwidth,
            "seed": self.seed,
        }


class TensorB:
    """Nonnegative n x n x n array B(i, k, l)."""

    def __init__(self, entries):
        arr = np.asarray(entries, dtype=float)
        if arr.ndim != 3 or len(set(arr.shape)) != 1:
            raise DomainError(f"TensorB must be n x n x n, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise DomainError("TensorB entries must be finite and nonnegative")
        self.entries = arr

    @property
    def n(self):
        return self.entries.shape[0]


def resolve_mode(mode, n, cap_key, samples=None):
    """
    Pick (mode, samples) for a run; ``auto`` is exact under the cap, else Monte
    Carlo with at least the configured sample count.
    """
    mode = Mode.parse(mode)
    cap = config.caps[cap_key]
    if mode is Mode.AUTO:
        if n <= cap:
            return Mode.EXACT, 0
        return Mode.MONTE_CARLO, max(config.mc_samples, samples or 0)
    if mode is Mode.EXACT and n > cap:
        raise ResourceError(
            f"Exact {cap_key} enumeration capped at n <= {cap}, got n={n} "
            f"(raise it with ORLICZ_EMBED_CAPS; results may take long)"
        )
    if mode is Mode.MONTE_CARLO:
        samples = samples or config.mc_samples
        if samples < 1:
            raise DomainError(f"Sample count must be >= 1, got {samples}")
    return mode, samples or 0


def _block_stats(values):
    values = np.asarray(values, dtype=float)
    return len(values), math.fsum(values), math.fsum(values * values)


def permutation_average(integrand, n, factors=1, mode="auto", cap_key="single",
                        samples=None, seed=None, threads=None, stream=STREAM_PERMUTATIONS):
    """
    Average of ``integrand`` over ``factors`` independent uniform permutations of S_n.

    Args:
        integrand: Maps a list of ``factors`` permutation blocks (rows are
            permutations of range(n)) and a generator (None when exact) to values.
        n: Permutation size.
        factors: Number of independent permutations.
        mode: exact, monte_carlo (alias mc) or auto.
        cap_key: Which enumeration cap applies.

    Returns:
        AverageEstimate
    """
    mode, samples = resolve_mode(mode, n, cap_key, samples)
    seed = config.seed if seed is None else seed
    threads = config.threads if threads is None else threads
    block_size = config.block_size

    if mode is Mode.EXACT:
        table = permutation_table(n)
        m = len(table)
        total = m**factors
        ranges = block_ranges(total, block_size)

        def work(block):
            start, stop = ranges[block]
            idx = np.arange(start, stop, dtype=np.int64)
            # first factor is the most significant digit: lexicographic over the tuple
            perms = [table[(idx // m ** (factors - 1 - k)) % m] for k in range(factors)]
            return _block_stats(integrand(perms, None))

        parts = run_blocks(work, len(ranges), threads)
        value = math.fsum(part[1] for part in parts) / total
        log(f"Exact average over {total} permutation tuples (n={n})", "debug")
        return AverageEstimate(max(value, 0.0), Mode.EXACT.value, total, 0.0, seed)

    ranges = block_ranges(samples, block_size)

    def sample_work(block):
        start, stop = ranges[block]
        rng = block_generator(seed, stream, block)
        perms = [sample_permutations(rng, stop - start, n) for _ in range(factors)]
        return _block_stats(integrand(perms, rng))

    parts = run_blocks(sample_work, len(ranges), threads)
    count = sum(part[0] for part in parts)
    total = math.fsum(part[1] for part in parts)
    squares = math.fsum(part[2] for part in parts)
    mean = total / count
    width = 0.0
    if count > 1:
        variance = max((squares - count * mean * mean) / (count - 1), 0.0)
        width = Z95 * math.sqrt(variance / count)
    log(f"Monte Carlo average: {count} samples, mean {mean:.6g} +/- {width:.3g}", "debug")
    return AverageEstimate(max(mean, 0.0), Mode.MONTE_CARLO.value, count, width, seed)


def _vector(x, n=None, name="x"):
    arr = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    if n is not None and len(arr) != n:
        raise DomainError(f"len({name}) = {len(arr)}, expected {n}")
    return arr


def ave_moment(x, a, f, power=1.0, mode="auto", **kwargs):
    """Ave_pi ||(x_i a_pi(i))_i||_f ^ power."""
    weights = a.array
    x = np.abs(_vector(x, len(weights)))

    def integrand(perms, rng):
        norms = luxemburg_norms(f, x[None, :] * weights[perms[0]])
        return norms if power == 1 else norms**power

    return permutation_average(integrand, len(weights), 1, mode, "single", **kwargs)


def ave_single(x, a, f, mode="auto", **kwargs):
    """Ave_pi ||(x_i a_pi(i))_i||_f."""
    return ave_moment(x, a, f, 1.0, mode, **kwargs)


def double_max_weights(M, n):
    """d_j = n (M^{*-1}(j/n) - M^{*-1}((j-1)/n)), j = 1..n."""
    grid = np.asarray(M.conjugate().inverse(np.arange(n + 1) / n), dtype=float)
    d = n * np.diff(grid)
    if np.any(d <= 0):
        log(f"Degenerate {M.kind} function: conjugate inverse has flat increments", "warning")
    return d


def ave_double_max(x, M, mode="auto", **kwargs):
    """Ave_pi max_i |x_i| d_pi(i) with the weights of ``double_max_weights``."""
    x = np.abs(_vector(x))
    d = double_max_weights(M, len(x))

    def integrand(perms, rng):
        return np.max(x[None, :] * d[perms[0]], axis=1)

    return permutation_average(integrand, len(x), 1, mode, "single", **kwargs)


def double_max_constants(n):
    """(lower, upper) constants of the double-max sandwich; lower is None for n <= 3."""
    if n <= 3:
        return None, 2.0
    return 0.5 * (0.5 - 1.0 / (n - 1)), 2.0


def ave_triple_max(B, mode="auto", **kwargs):
    """Ave_{pi,sigma} max_i B(i, pi(i), sigma(i))."""
    entries = B.entries
    n = B.n
    rows = np.arange(n)[None, :]

    def integrand(perms, rng):
        return np.max(entries[rows, perms[0], perms[1]], axis=1)

    return permutation_average(integrand, n, 2, mode, "double", **kwargs)


def triple_max_bounds(B):
    """Lower and upper bounds (1/(16 n^2)) S and (4/n^2) S, S = sum of the n^2 largest entries."""
    n = B.n
    top = math.fsum(np.sort(B.entries.ravel())[::-1][: n * n])
    return top / (16 * n * n), 4 * top / (n * n)


def ave_lp_generator(x, e, mode="auto", **kwargs):
    """Ave_pi (sum_i |x_i a_pi(i)|^2)^(1/2) with a_i = (n/i)^(1/p)."""
    x = np.abs(_vector(x))
    a = WeightVector.generated(len(x), e.p).array

    def integrand(perms, rng):
        return np.sqrt(np.sum((x[None, :] * a[perms[0]]) ** 2, axis=1))

    return permutation_average(integrand, len(x), 1, mode, "single", **kwargs)


def ave_matrix_triple(a, x, y, z, mode="auto", **kwargs):
    """Ave_{pi,sigma,eta} (sum_{i,j} |a_ij x_pi(i) y_sigma(j) z_eta(j)|^2)^(1/2)."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"Matrix must be square, got shape {a.shape}")
    n = a.shape[0]
    squares = a * a
    x2, y2, z2 = (_vector(v, n, name) ** 2 for v, name in ((x, "x"), (y, "y"), (z, "z")))

    def integrand(perms, rng):
        columns = x2[perms[0]] @ squares
        return np.sqrt(np.sum(columns * y2[perms[1]] * z2[perms[2]], axis=1))

    return permutation_average(integrand, n, 3, mode, "triple", **kwargs)
