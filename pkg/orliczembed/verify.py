"""
Invariant suites behind ``orliczembed verify``.

Each suite runs fixed or seeded random instances of one inequality. Only the
constants stated numerically are asserted; every other constant is reported as
an empirical value, with a stability flag where the claim is uniformity in n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import config, log
from .embedding import (
    MatrixSpaceNorm,
    chaos_constant,
    corollary_bounds,
    distortion_growth,
    matrix_norm,
    measure_distortion,
    random_matrices,
)
from .errors import UsageError
from .orlicz import (
    CHECK_TOL,
    Exponents,
    PiecewiseAffine,
    Power,
    WeightVector,
    check_regularity,
    describe,
    luxemburg_norm,
)
from .permavg import (
    TensorB,
    ave_double_max,
    ave_lp_generator,
    ave_matrix_triple,
    ave_moment,
    ave_single,
    ave_triple_max,
    double_max_constants,
)
from .rearrange import (
    check_lemma25_grid,
    compare_orderings,
    construct_N_lemma24,
    construct_N_lemma25,
    construct_N_lemma26,
    lemma25_profile,
    lemma26_profile,
    norm_y,
    norm_y_brute,
    orlicz_from_prefix,
    orlicz_from_star_inverse,
    proposition_outer,
    rearrange,
    y_from_M,
)
from .sampling import instance_generator

# Permutation samples per matrix for the hybrid distortion runs
PROP31_PERM_SAMPLES = 500_000

# Largest n for the triple-average band (exact under the default caps)
TRIPLE_BAND_MAX_N = 4


class SuiteSettings:
    """Per-run overrides; None falls back to the suite default or the config."""

    def __init__(self, n=None, p=None, r=None, seed=0, samples=None, mode="auto",
                 threads=None, grid=None, instances=None, M=None):
        self.n = n
        self.p = p
        self.r = r
        self.seed = seed
        self.samples = samples
        self.mode = mode
        self.threads = threads
        self.grid = grid
        self.instances = instances
        self.M = M

    def sizes(self, default):
        return list(self.n) if self.n else list(default)

    def count(self, default=None):
        if self.instances:
            return self.instances
        return default if default is not None else config.instances

    def average_kwargs(self):
        return {"samples": self.samples, "seed": self.seed, "threads": self.threads}

    def params(self, **extra):
        params = {"seed": self.seed, "mode": self.mode, "conjugate": "raw"}
        if self.M is not None:
            params["M"] = describe(self.M)
        params.update(extra)
        return params


@dataclass
class SuiteResult:
    lemma: str
    params: dict
    passed: bool
    empirical_constants: dict
    stated_constants: dict
    worst_case_instance: Optional[dict] = None
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "lemma": self.lemma,
            "params": self.params,
            "pass": self.passed,
            "empirical_constants": self.empirical_constants,
            "paper_constants": self.stated_constants,
            "worst_case_instance": self.worst_case_instance,
            "details": self.details,
        }


class Sandwich:
    """
    Running range of ratios checked against optional lower/upper bounds.

    Keeps the instance closest to (or furthest past) a bound; without bounds,
    the instance with the largest ratio.
    """

    def __init__(self, lower=None, upper=None):
        self.lower = lower
        self.upper = upper
        self.low = math.inf
        self.high = -math.inf
        self.count = 0
        self.worst = None
        self._worst_gap = -math.inf

    def _gap(self, ratio):
        if not math.isfinite(ratio):
            return math.inf
        gaps = []
        if self.lower is not None:
            gaps.append((self.lower - ratio) / self.lower)
        if self.upper is not None:
            gaps.append((ratio - self.upper) / self.upper)
        return max(gaps) if gaps else ratio

    def add(self, ratio, instance):
        ratio = float(ratio)
        self.count += 1
        self.low = min(self.low, ratio)
        self.high = max(self.high, ratio)
        gap = self._gap(ratio)
        if gap > self._worst_gap:
            self._worst_gap = gap
            self.worst = dict(instance, ratio=ratio)

    @property
    def asserted(self):
        return self.lower is not None or self.upper is not None

    @property
    def passed(self):
        if not self.asserted:
            return True
        return self.count > 0 and self._worst_gap <= CHECK_TOL

    def constants(self):
        return {"min_ratio": self.low, "max_ratio": self.high, "instances": self.count}

    def bounds(self):
        return {"lower": self.lower, "upper": self.upper}


def _result(lemma, params, checks, details=None, extra_pass=True):
    """Combine named sandwiches; the worst instance is taken from failing or asserted checks."""
    asserted = [c for c in checks.values() if c.asserted and c.worst is not None]
    pool = [c for c in asserted if not c.passed] or asserted or list(checks.values())
    worst = max(pool, key=lambda c: c._worst_gap).worst if pool else None
    passed = all(c.passed for c in checks.values()) and extra_pass
    return SuiteResult(
        lemma,
        params,
        passed,
        {name: c.constants() for name, c in checks.items()},
        {name: c.bounds() for name, c in checks.items() if c.asserted},
        worst,
        details or {},
    )


def _weights(rng, n):
    return WeightVector.sorted_from(rng.uniform(0.1, 10.0, n))


def random_pwa(rng, pieces=5):
    """Random strictly convex piecewise-affine Orlicz function."""
    ts = np.concatenate(([0.0], np.cumsum(rng.uniform(0.1, 2.0, pieces))))
    slopes = np.sort(rng.uniform(0.1, 5.0, pieces))
    vs = np.concatenate(([0.0], np.cumsum(slopes * np.diff(ts))))
    terminal = float(slopes[-1] + rng.uniform(0.1, 2.0))
    return PiecewiseAffine(tuple((float(t), float(v)) for t, v in zip(ts, vs)), terminal)


def _stable(bands, tolerance):
    """True when max/min of the band widths (hi/lo) stays within 1 + tolerance."""
    widths = [hi / lo for lo, hi in bands if lo > 0]
    if len(widths) < 2:
        return True
    return max(widths) / min(widths) <= 1 + tolerance


# --- suites ---


def suite_eq1(s):
    """t <= M^{-1}(t) M^{*-1}(t) <= 2t on a geometric grid."""
    points = s.grid or config.grid_points
    grid = np.geomspace(1e-3, 1e3, points)
    rng = instance_generator(s.seed, "eq1")
    if s.M is not None:
        functions = [s.M]
    else:
        functions = [Power(float(p)) for p in np.linspace(1.0, 4.0, 10)]
        functions += [random_pwa(rng) for _ in range(10)]
    check = Sandwich(1.0, 2.0)
    for f in functions:
        star = f.conjugate()
        ratio = np.asarray(f.inverse(grid)) * np.asarray(star.inverse(grid)) / grid
        for k in (int(np.argmin(ratio)), int(np.argmax(ratio))):
            check.add(ratio[k], {"M": describe(f), "t": float(grid[k])})
    return _result("eq1", s.params(grid=points, functions=len(functions)), {"duality": check})


def suite_l21(s):
    """(1/2)|x|_y <= |x|_M <= 2|x|_y, and greedy norm_y equals brute force."""
    rng = instance_generator(s.seed, "l21")
    sizes = s.sizes((3, 4))
    check = Sandwich(0.5, 2.0)
    mismatches = []
    for n in sizes:
        for m in (n, 2 * n):
            for _ in range(s.count()):
                y = _weights(rng, m)
                x = rng.standard_normal(n)
                greedy = norm_y(x, y, m)
                brute = norm_y_brute(x, y, m)
                instance = {"n": n, "m": m, "x": x.tolist(), "y": list(y.entries)}
                if not math.isclose(greedy, brute, rel_tol=1e-12, abs_tol=1e-12):
                    mismatches.append(dict(instance, greedy=greedy, brute=brute))
                M = orlicz_from_prefix(rearrange(y.array), m, normalize=False)
                check.add(luxemburg_norm(M, x) / greedy, instance)
    if mismatches:
        log(f"Greedy norm_y differs from brute force on {len(mismatches)} instances", "error")
    result = _result("l21", s.params(n=sizes), {"sandwich": check},
                     {"greedy_mismatches": len(mismatches)}, extra_pass=not mismatches)
    if mismatches:
        result.worst_case_instance = mismatches[0]
    return result


def suite_l22(s):
    """Double permutation-max sandwich with constants (1/2 (1/2 - 1/(n-1)), 2)."""
    M = s.M or Power(2.0)
    rng = instance_generator(s.seed, "l22")
    sizes = s.sizes((5, 6, 7))
    checks = {}
    skipped = []
    for n in sizes:
        lower, upper = double_max_constants(n)
        if lower is None:
            log(f"Lemma constant nonpositive for n={n}: lower bound skipped", "warning")
            skipped.append(n)
        check = checks[str(n)] = Sandwich(lower, upper)
        for _ in range(s.count()):
            x = rng.standard_normal(n)
            value = ave_double_max(x, M, s.mode, **s.average_kwargs()).value
            check.add(value / luxemburg_norm(M, x), {"n": n, "x": x.tolist()})
    details = {"lower_skipped": skipped, "note": "constant nonpositive" if skipped else None}
    return _result("l22", s.params(n=sizes, M=describe(M)), checks, details)


def suite_l23(s):
    """Triple max average against the top n^2 entries, constants (1/(16 n^2), 4/n^2)."""
    rng = instance_generator(s.seed, "l23")
    sizes = s.sizes((2, 3, 4))
    checks = {}
    for n in sizes:
        check = checks[str(n)] = Sandwich(1.0 / (16 * n * n), 4.0 / (n * n))
        for _ in range(s.count()):
            entries = rng.exponential(1.0, (n, n, n))
            top = rearrange(entries).top(n * n)
            value = ave_triple_max(TensorB(entries), s.mode, **s.average_kwargs()).value
            check.add(value / top, {"n": n, "B": entries.tolist()})
    return _result("l23", s.params(n=sizes), checks)


def suite_l24(s):
    """c |x|_N <= Ave_pi |(x_i a_pi(i))|_M <= 2 |x|_N; upper asserted, c reported."""
    M = s.M or Power(2.0)
    rng = instance_generator(s.seed, "l24")
    sizes = s.sizes((4, 5, 6))
    checks = {}
    for n in sizes:
        check = checks[str(n)] = Sandwich(None, 2.0)
        for _ in range(s.count(20)):
            a = _weights(rng, n)
            x = rng.standard_normal(n)
            N = construct_N_lemma24(a, M)
            value = ave_single(x, a, M, s.mode, **s.average_kwargs()).value
            check.add(value / luxemburg_norm(N, x), {"n": n, "a": list(a.entries), "x": x.tolist()})
    details = {"c": {name: c.low for name, c in checks.items()}}
    return _result("l24", s.params(n=sizes, M=describe(M)), checks, details)


def admissible_coarse_functions(a, e):
    """
    Orlicz functions N-bar that are affine between the points l/n and satisfy
    N-bar^{*-1}(l/n) <= profile(l) <= 8 N-bar^{*-1}(l/n).

    The grid values of ``construct_N_lemma25`` are rescaled to the smallest and
    largest factors that keep them inside that band, plus their geometric mean.
    """
    n = len(a)
    us = np.arange(n + 1) / n
    base = construct_N_lemma25(a, e)
    ws = np.asarray(base.conjugate().inverse(us), dtype=float)
    profile = lemma25_profile(a, e.r)
    ratio = profile[1:] / ws[1:]
    low, high = ratio.max() / 8.0, ratio.min()
    functions = {"base": base}
    for name, factor in (("low", low), ("mid", math.sqrt(low * high)), ("high", high)):
        functions[name] = orlicz_from_star_inverse(us, factor * ws)
    return functions


def probe_n0(r, sizes=(2, 3, 4, 6, 8, 12, 16), instances=10, seed=0):
    """
    Smallest scanned n from which on |x|_{N-bar} / |x|_N stays within
    [1/(32 4^{r*}), 48 4^{r*} + 16] for N the fine-grid construction and every
    admissible coarse N-bar.
    """
    e = Exponents(1.0, r)
    lower = 1.0 / (32 * 4**e.r_star)
    upper = 48 * 4**e.r_star + 16
    rng = instance_generator(seed, f"n0:{r}")
    within = {}
    ranges = {}
    for n in sizes:
        ratios = []
        for _ in range(instances):
            a = _weights(rng, n)
            x = rng.standard_normal(n)
            fine = luxemburg_norm(construct_N_lemma24(a, Power(r)), x)
            for Nbar in admissible_coarse_functions(a, e).values():
                ratios.append(luxemburg_norm(Nbar, x) / fine)
        ranges[str(n)] = (min(ratios), max(ratios))
        within[n] = (
            lower * (1 - CHECK_TOL) <= min(ratios) and max(ratios) <= upper * (1 + CHECK_TOL)
        )
    n0 = None
    for n in reversed(sizes):
        if not within[n]:
            break
        n0 = n
    return {"r": r, "lower": lower, "upper": upper, "ranges": ranges, "n0": n0}


def suite_l25(s):
    """Grid inequalities with constants 8 and 2, plus the empirical norm sandwich."""
    rng = instance_generator(s.seed, "l25")
    rs = [s.r] if s.r else [1.5, 1.8]
    sizes = s.sizes((4, 8, 16))
    checks = {"coarse": Sandwich(1.0, 8.0), "fine": Sandwich(1.0, 2.0)}
    beyond = Sandwich()
    for r in rs:
        for n in sizes:
            for _ in range(s.count(20)):
                a = _weights(rng, n)
                grid = check_lemma25_grid(a, r)
                instance = {"r": r, "n": n, "a": list(a.entries)}
                for name, check in checks.items():
                    check.add(grid[name].ratios.min(), instance)
                    check.add(grid[name].ratios.max(), instance)
                if len(grid["fine_beyond"].ratios):
                    beyond.add(grid["fine_beyond"].ratios.max(), instance)

    sandwich = {}
    stability = {}
    for r in rs:
        e = Exponents(1.0, r)
        bands = []
        for n in (6, 8):
            check = Sandwich()
            for _ in range(s.count(20)):
                a = _weights(rng, n)
                x = rng.standard_normal(n)
                value = ave_single(x, a, Power(r), s.mode, **s.average_kwargs()).value
                check.add(value / luxemburg_norm(construct_N_lemma25(a, e), x),
                          {"r": r, "n": n, "a": list(a.entries), "x": x.tolist()})
            sandwich[f"r={r},n={n}"] = {"a_r": check.low, "b_r": check.high}
            bands.append((check.low, check.high))
        (lo6, hi6), (lo8, hi8) = bands
        stability[str(r)] = bool(abs(lo8 / lo6 - 1) < 0.25 and abs(hi8 / hi6 - 1) < 0.25)

    details = {
        "fine_beyond": beyond.constants(),
        "norm_sandwich": sandwich,
        "stable": stability,
        "n0_probe": [probe_n0(r, seed=s.seed) for r in rs],
    }
    return _result("l25", s.params(n=sizes, r=rs), checks, details)


def suite_l26(s):
    """Lower 1/2 side of the grid sandwich asserted; upper candidates and (alpha, beta) reported."""
    e = Exponents(s.p or 1.5, s.r or 1.8)
    rng = instance_generator(s.seed, "l26")
    sizes = s.sizes((4, 6, 8))
    check = Sandwich(0.5, None)
    norms = Sandwich()
    candidates = {"statement": 2 ** (-1 / e.p) * 8, "proof": 2 ** (-1 / e.p)}
    for n in sizes:
        u = np.arange(1, n + 1) / n
        for _ in range(s.count(20)):
            a = _weights(rng, n)
            x = rng.standard_normal(n)
            N = construct_N_lemma26(a, e)
            ratios = lemma26_profile(a, e)[1:] / np.asarray(N.conjugate().inverse(u))
            instance = {"n": n, "a": list(a.entries)}
            check.add(ratios.min(), instance)
            check.add(ratios.max(), instance)
            mean = ave_moment(x, a, Power(e.r), e.p, s.mode, **s.average_kwargs()).root(e.p)
            norms.add(mean.value / luxemburg_norm(N, x), dict(instance, x=x.tolist()))
    details = {
        "upper_candidates": {
            name: {"constant": c, "holds": bool(check.high <= c * (1 + CHECK_TOL))}
            for name, c in candidates.items()
        },
        "alpha": norms.low,
        "beta": norms.high,
    }
    return _result("l26", s.params(n=sizes, p=e.p, r=e.r), {"grid": check}, details)


def suite_genlp(s):
    """Ave_pi (sum |x_i a_pi(i)|^2)^(1/2) / |x|_p with a_i = (n/i)^(1/p): band stable in n."""
    rng = instance_generator(s.seed, "genlp")
    ps = [s.p] if s.p else [1.2, 1.5]
    sizes = s.sizes((4, 6, 8))
    checks = {}
    stable = {}
    for p in ps:
        e = Exponents(p, 2.0)
        bands = []
        for n in sizes:
            check = checks[f"p={p},n={n}"] = Sandwich()
            for _ in range(s.count()):
                x = rng.standard_normal(n)
                value = ave_lp_generator(x, e, s.mode, **s.average_kwargs()).value
                check.add(value / np.linalg.norm(x, p), {"p": p, "n": n, "x": x.tolist()})
            bands.append((check.low, check.high))
        stable[str(p)] = _stable(bands, 0.3)
    return _result("genlp", s.params(n=sizes, p=ps), checks, {"stable": stable})


def triple_average_ratio(a, e, y, outer=None, mode="auto", **kwargs):
    """
    Ave_{pi,sigma,eta} (sum_ij |a_ij x_pi(i) y_sigma(j) z_eta(j)|^2)^(1/2) divided by
    ||(||a_.j||_r)_j||_{M_y}, with x_i = (n/i)^(1/r) and z_j = (n/j)^(1/p).
    """
    n = len(y)
    outer = proposition_outer(y, e.p) if outer is None else outer
    x = WeightVector.generated(n, e.r)
    z = WeightVector.generated(n, e.p)
    value = ave_matrix_triple(a, x.array, y.array, z.array, mode, **kwargs).value
    return value / matrix_norm(a, MatrixSpaceNorm(outer, e.r, n))


def suite_prop31(s):
    """
    Ratio band of l1_image_norm / matrix_norm, exact for small n and hybrid beyond,
    plus the band of the triple permutation average against the matrix norm.
    """
    M = s.M or Power(1.3)
    e = Exponents(s.p or 1.1, s.r or 1.5).require_ordered()
    sizes = s.sizes((2, 3, 4, 5))
    count = s.count(10)
    triple_count = s.count(50)
    perm_samples = s.samples or PROP31_PERM_SAMPLES
    checks = {}
    bands = {}
    reports = []
    for n in sizes:
        y = y_from_M(M, n)
        report = measure_distortion(n, e, y, seed=s.seed, mode=s.mode, perm_samples=perm_samples,
                                    threads=s.threads, matrices=random_matrices(n, count, s.seed))
        reports.append(report)
        check = checks[str(n)] = Sandwich()
        for row in report.samples:
            check.add(row["ratio"], {"n": n, "sample_index": row["sample_index"]})
        bands[str(n)] = {"min": report.min_ratio, "max": report.max_ratio, "mode": report.mode,
                         "perm_samples": report.perm_samples}
        if n <= TRIPLE_BAND_MAX_N:
            outer = proposition_outer(y, e.p)
            triple = checks[f"triple:{n}"] = Sandwich()
            for k, a in enumerate(random_matrices(n, triple_count, s.seed + 1)):
                ratio = triple_average_ratio(a, e, y, outer, s.mode, **s.average_kwargs())
                triple.add(ratio, {"n": n, "a": a.tolist(), "sample_index": k})
    first, last = bands[str(sizes[0])], bands[str(sizes[-1])]
    within = bool(
        max(first["min"], last["min"]) / min(first["min"], last["min"]) <= 2
        and max(first["max"], last["max"]) / min(first["max"], last["max"]) <= 2
    )
    rng = instance_generator(s.seed, "chaos")
    chaos = [chaos_constant(rng.standard_normal((3, 3))) for _ in range(count)]
    details = {"bands": bands, "stable": within, "chaos_constant_min": min(chaos)}
    if len(reports) > 1:
        details["distortion_growth_slope"] = distortion_growth(reports)
    params = s.params(n=sizes, p=e.p, r=e.r, M=describe(M), matrices=count,
                      triple_matrices=triple_count, perm_samples=perm_samples)
    return _result("prop31", params, checks, details)


def _function_label(M, index):
    """Short key naming one function of a suite."""
    if isinstance(M, Power):
        return f"power{M.p:g}" if M.coef == 1 else f"power{M.p:g}x{M.coef:g}"
    return f"{M.kind}{index}"


def suite_cor32(s):
    """Prefix and tail sums of y_j = 1/M^{-1}(j/n) against (l/n)/M^{-1}(l/n)."""
    functions = [s.M] if s.M else [Power(1.2), Power(1.5)]
    p = s.p or 1.8
    sizes = s.sizes((16, 64))
    checks = {}
    for index, M in enumerate(functions):
        label = _function_label(M, index)
        for n in sizes:
            bounds = corollary_bounds(M, p, n)
            for part in ("prefix", "tail"):
                check = checks.setdefault(f"{part}:{label}:{n}", Sandwich())
                check.add(bounds[f"{part}_constant"], {"M": describe(M), "n": n})
    return _result("cor32", s.params(n=sizes, p=p), checks)


def suite_thm11(s):
    """Chain M^{*-1}(l/n) <= middle <= 3 M^{*-1}(l/n) under both exponent orderings."""
    e = Exponents(s.p or 1.5, s.r or 1.8)
    functions = [s.M] if s.M else [Power(q) for q in (1.1, 1.2, 1.3, 1.4, 1.5)]
    sizes = s.sizes((8, 16))
    check = Sandwich(1.0, 3.0)
    instances = []
    failures = []
    for M in functions:
        for n in sizes:
            reports = compare_orderings(M, e, n)
            satisfied = [name for name, rep in reports.items() if rep is not None and rep.passed]
            entry = {
                "M": describe(M),
                "n": n,
                "orderings": {k: rep.to_dict() if rep else None for k, rep in reports.items()},
                "satisfied_by": satisfied,
            }
            instances.append(entry)
            evaluated = [rep for rep in reports.values() if rep is not None]
            if not evaluated:
                log(f"No ordering applies to {M.kind} at n={n}: regularity fails", "warning")
                continue
            best = min(evaluated, key=lambda rep: rep.max_ratio)
            check.add(best.max_ratio, {"M": describe(M), "n": n, "ordering": best.ordering})
            if not satisfied:
                failures.append(entry)
    regular = {
        "stated": [bool(check_regularity(M, e.p)) for M in functions],
        "proof": [bool(check_regularity(M, e.r)) for M in functions],
    }
    details = {"instances": instances, "regularity": regular}
    result = _result("thm11", s.params(n=sizes, p=e.p, r=e.r), {"chain": check}, details,
                     extra_pass=not failures and check.count > 0)
    if failures:
        result.worst_case_instance = failures[0]
    return result


SUITES = {
    "eq1": suite_eq1,
    "l21": suite_l21,
    "l22": suite_l22,
    "l23": suite_l23,
    "l24": suite_l24,
    "l25": suite_l25,
    "l26": suite_l26,
    "genlp": suite_genlp,
    "prop31": suite_prop31,
    "cor32": suite_cor32,
    "thm11": suite_thm11,
}


def run_suite(lemma_id, settings=None):
    """Run one suite by id; unknown ids are a usage error."""
    if lemma_id not in SUITES:
        raise UsageError(f"Unknown lemma id {lemma_id!r} (choose from {', '.join(SUITES)})")
    settings = settings or SuiteSettings(seed=config.seed)
    log(f"Running suite {lemma_id}")
    result = SUITES[lemma_id](settings)
    log(f"Suite {lemma_id}: {'pass' if result.passed else 'FAIL'}")
    return result
