"""
The linear map Psi_n from n x n matrices into a finite L1 space and its distortion.

A row of Psi_n is indexed by (pi, sigma, eta, eps, delta) and has entries
x_pi(i) y_sigma(j) z_eta(j) eps_i delta_j in column (i, j). Rows are only
materialized for small n; otherwise ``PsiEvaluator`` regenerates them from
permutation indices and averages over the signs exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import pandas as pd
from scipy import stats

from .config import config, log
from .errors import DomainError, ResourceError
from .orlicz import Exponents, WeightVector, luxemburg_norms
from .permavg import AverageEstimate, Mode, permutation_average
from .rearrange import proposition_outer
from .sampling import STREAM_MATRICES, block_generator, permutation_table, sign_table

# Sign-table products per chunk when averaging over signs
_CHAOS_CHUNK = 1 << 20


class MatrixSpaceNorm:
    """|| ( ||(a_ij)_i||_r )_j ||_outer on n x n matrices."""

    def __init__(self, outer, inner_exponent, n):
        self.outer = outer
        self.inner_exponent = inner_exponent
        self.n = n

    def norms(self, matrices):
        """Norms of a stack of matrices with shape (k, n, n)."""
        batch = np.asarray(matrices, dtype=float)
        if batch.ndim != 3 or batch.shape[1:] != (self.n, self.n):
            raise DomainError(
                f"Expected matrices of shape ({self.n}, {self.n}), got {batch.shape[1:]}"
            )
        r = self.inner_exponent
        columns = np.sum(np.abs(batch) ** r, axis=1) ** (1.0 / r)
        return luxemburg_norms(self.outer, columns)

    def __call__(self, a):
        return matrix_norm(a, self)


def matrix_norm(a, norm):
    """Inner r-norm over i for every column j, then the outer Luxemburg norm."""
    a = np.asarray(a, dtype=float)
    if a.shape != (norm.n, norm.n):
        raise DomainError(f"Matrix shape {a.shape} does not match n = {norm.n}")
    return float(norm.norms(a[None])[0])


def _psi_weights(n, e, y):
    if len(y) != n:
        raise DomainError(f"len(y) = {len(y)}, expected n = {n}")
    x = WeightVector.generated(n, e.r).array
    z = WeightVector.generated(n, e.p).array
    return x, y.array, z


class EmbeddingMatrix:
    """Materialized Psi_n: rows in lexicographic (pi, sigma, eta, eps, delta) order."""

    def __init__(self, n, exponents, x, y, z, rows):
        self.n = n
        self.exponents = exponents
        self.x = x
        self.y = y
        self.z = z
        self.rows = rows

    @property
    def row_count(self):
        return self.rows.shape[0]

    def image(self, a):
        return self.rows @ np.asarray(a, dtype=float).ravel()

    def to_frame(self):
        columns = [f"a{i + 1}{j + 1}" for i in range(self.n) for j in range(self.n)]
        return pd.DataFrame(self.rows, columns=columns)


def build_psi(n, e, y):
    """Materialize all (n!)^3 4^n rows of Psi_n."""
    e.require_ordered()
    y.require_positive()
    cap = config.caps["psi"]
    if n > cap:
        raise ResourceError(f"Materialized psi capped at n <= {cap}, got n={n}")
    x, yv, z = _psi_weights(n, e, y)
    table = permutation_table(n)
    signs = sign_table(n)
    xs = x[table]
    yz = yv[table][:, None, :] * z[table][None, :, :]
    base = xs[:, None, None, :, None] * yz[None, :, :, None, :]
    flips = signs[:, None, :, None] * signs[None, :, None, :]
    rows = base[:, :, :, None, None, :, :] * flips[None, None, None]
    rows = rows.reshape(-1, n * n)
    log(f"Materialized psi for n={n}: {rows.shape[0]} rows", "debug")
    return EmbeddingMatrix(n, e, x, yv, z, rows)


def chaos_average(weights):
    """
    Ave_{eps,delta} |sum_ij w_ij eps_i delta_j| for a stack of (k, n, n) matrices,
    by exact enumeration of the signs.
    """
    weights = np.asarray(weights, dtype=float)
    n = weights.shape[-1]
    half = sign_table(n, half=True)
    per_row = len(half) ** 2
    step = max(1, _CHAOS_CHUNK // per_row)
    out = np.empty(weights.shape[0])
    for start in range(0, weights.shape[0], step):
        chunk = weights[start:start + step]
        partial = np.einsum("si,kij->ksj", half, chunk)
        values = np.einsum("ksj,tj->kst", partial, half)
        out[start:start + step] = np.abs(values).mean(axis=(1, 2))
    return out


def chaos_constant(w):
    """Ave_{eps,delta} |eps^T W delta| / ||W||_F for one coefficient matrix."""
    w = np.asarray(w, dtype=float)
    frob = float(np.linalg.norm(w))
    if frob == 0:
        return 1.0
    return float(chaos_average(w[None])[0]) / frob


class PsiEvaluator:
    """Streaming Psi_n: rows regenerated from permutation indices, never stored."""

    def __init__(self, n, exponents, y):
        self.n = n
        self.exponents = exponents
        self.y = y

    def weights(self, a, perms):
        """Coefficient matrices a_ij x_pi(i) y_sigma(j) z_eta(j), one per permutation triple."""
        x, y, z = _psi_weights(self.n, self.exponents, self.y)
        a = np.asarray(a, dtype=float)
        pi, sigma, eta = perms
        return a[None] * x[pi][:, :, None] * (y[sigma] * z[eta])[:, None, :]

    def integrand(self, a):
        exact_signs = self.n <= config.caps["signs"]

        def values(perms, rng):
            w = self.weights(a, perms)
            if exact_signs or rng is None:
                return chaos_average(w)
            eps = rng.choice((-1.0, 1.0), size=w.shape[:2])
            delta = rng.choice((-1.0, 1.0), size=(w.shape[0], w.shape[2]))
            return np.abs(np.einsum("ki,kij,kj->k", eps, w, delta))

        return values


def l1_image_norm(psi, a, mode="auto", samples=None, seed=None, threads=None):
    """
    Uniform average of |<row, a>| over the rows of Psi_n.

    Materialized matrices are averaged directly; a ``PsiEvaluator`` enumerates
    permutation triples exactly or samples them (signs stay exact for small n).
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (psi.n, psi.n):
        raise DomainError(f"Matrix shape {a.shape} does not match n = {psi.n}")
    if isinstance(psi, EmbeddingMatrix):
        value = float(np.mean(np.abs(psi.image(a))))
        return AverageEstimate(value, Mode.EXACT.value, psi.row_count, 0.0,
                               config.seed if seed is None else seed)
    return permutation_average(psi.integrand(a), psi.n, 3, mode, "triple",
                               samples=samples, seed=seed, threads=threads)


@dataclass
class DistortionReport:
    n: int
    sample_count: int
    min_ratio: float
    max_ratio: float
    distortion: float
    seed: int
    mode: str
    perm_samples: int
    exponents: Exponents
    lower_bound: Optional[float] = None
    label: str = "empirical distortion over sampled directions"
    samples: List[dict] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.distortion < 1 - 1e-12:
            raise DomainError(f"Distortion must be >= 1, got {self.distortion}")

    def to_dict(self):
        return {
            "n": self.n,
            "p": self.exponents.p,
            "r": self.exponents.r,
            "sample_count": self.sample_count,
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "distortion": self.distortion,
            "seed": self.seed,
            "mode": self.mode,
            "perm_samples": self.perm_samples,
            "lower_bound": self.lower_bound,
            "label": self.label,
        }

    def to_frame(self):
        columns = ["sample_index", "matrix_norm", "l1_norm", "ratio"]
        return pd.DataFrame(self.samples, columns=columns)


def random_matrices(n, count, seed):
    """Standard normal n x n matrices from the matrix stream of ``seed``."""
    return block_generator(seed, STREAM_MATRICES).standard_normal((count, n, n))


def measure_distortion(n, e, y, samples=None, seed=None, mode="auto", perm_samples=None,
                       threads=None, outer=None, matrices=None):
    """
    Empirical distortion of Psi_n on random directions.

    Matrices are normalized to unit matrix-space norm; the same permutation sample
    set serves every matrix, so the estimate is the distortion of a fixed
    embedding. ``outer`` defaults to M_y.
    """
    e.require_ordered()
    samples = config.distortion_samples if samples is None else samples
    seed = config.seed if seed is None else seed
    if matrices is None and samples < 100:
        raise DomainError(f"Distortion needs at least 100 samples, got {samples}")
    outer = proposition_outer(y, e.p) if outer is None else outer
    norm = MatrixSpaceNorm(outer, e.r, n)
    if matrices is None:
        matrices = random_matrices(n, samples, seed)
    matrices = np.asarray(matrices, dtype=float)
    sizes = norm.norms(matrices)
    if np.any(sizes <= 0):
        raise DomainError("Zero matrix has no direction")
    matrices = matrices / sizes[:, None, None]

    mode = Mode.parse(mode)
    if mode is Mode.AUTO:
        mode = Mode.EXACT if n <= config.caps["psi"] else Mode.MONTE_CARLO
    perm_samples = perm_samples or config.perm_samples
    evaluator = PsiEvaluator(n, e, y)
    images = [
        l1_image_norm(evaluator, a, mode, samples=perm_samples, seed=seed, threads=threads)
        for a in matrices
    ]
    ratios = np.array([est.value for est in images])
    rows = [
        {"sample_index": k, "matrix_norm": 1.0, "l1_norm": float(v), "ratio": float(v)}
        for k, v in enumerate(ratios)
    ]
    lo, hi = float(ratios.min()), float(ratios.max())
    used = images[0].samples
    log(f"Distortion n={n}: ratios in [{lo:.6g}, {hi:.6g}], distortion {hi / lo:.6g}")
    return DistortionReport(n, len(ratios), lo, hi, hi / lo, seed, images[0].mode, used, e,
                            lower_bound_report(n, e), samples=rows)


def lower_bound_report(n, e):
    """(5 sqrt 2)^{-1} n^{1/p - 1/r}, for 1 <= p <= r <= 2."""
    if not 1 <= e.p <= e.r <= 2:
        raise DomainError(f"Need 1 <= p <= r <= 2, got p={e.p}, r={e.r}")
    return n ** (1.0 / e.p - 1.0 / e.r) / (5.0 * math.sqrt(2.0))


def distortion_growth(reports):
    """Slope of log(distortion) against log(n)."""
    if len(reports) < 2:
        raise DomainError("Need at least two reports to fit a slope")
    fit = stats.linregress(np.log([r.n for r in reports]), np.log([r.distortion for r in reports]))
    return float(fit.slope)


def corollary_weights(M, n):
    """y_j = 1 / M^{-1}(j/n)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    inv = np.asarray(M.inverse(np.arange(1, n + 1) / n), dtype=float)
    return WeightVector(tuple(1.0 / inv))


def corollary_bounds(M, p, n):
    """
    Prefix and tail comparisons for y = corollary_weights(M, n), l = 1..n:

        prefix: (1/n) sum_{i<=l} y_i                        vs (l/n) / M^{-1}(l/n)
        tail:   (l/n)^{1/p*} ((1/n) sum_{i>l} y_i^p)^{1/p} vs (l/n) / M^{-1}(l/n)

    Returns the ratio arrays and their maxima.
    """
    y = corollary_weights(M, n).array
    ell = np.arange(1, n + 1)
    target = ell / n * y
    prefix = np.cumsum(y) / n
    powers = y**p
    tail = np.maximum((math.fsum(powers) - np.cumsum(powers)) / n, 0.0)
    ps = p / (p - 1.0) if p > 1 else math.inf
    tail_term = (ell / n) ** (1.0 / ps) * tail ** (1.0 / p)
    prefix_ratio = prefix / target
    tail_ratio = tail_term / target
    return {
        "n": n,
        "prefix_ratio": prefix_ratio,
        "tail_ratio": tail_ratio,
        "prefix_constant": float(prefix_ratio.max()),
        "tail_constant": float(tail_ratio.max()),
    }
