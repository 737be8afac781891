#!/usr/bin/env python3
"""
orliczembed - Numerical checks for Orlicz norms, permutation averages and L1 embeddings

Constructs the Orlicz functions behind the combinatorial inequalities for
permutation averages, evaluates every norm and average exactly or by seeded
Monte Carlo, and measures the empirical distortion of the explicit embedding of
the matrix spaces l_M^n(l_r^n) into L1.

Usage:
    python -m orliczembed verify l22 --n 5 --seed 7
    python -m orliczembed construct y-from-M --M power:2 --n 8
    python -m orliczembed construct psi --n 2 --p 1.1 --r 1.5 --out psi.json
    python -m orliczembed distortion --n 2 --p 1.1 --r 1.5 --seed 3

Exit codes: 0 all assertions pass, 1 assertion failure, 2 usage, 3 resource cap.
"""

import argparse
import json

import numpy as np
import pandas as pd

from .config import CAPS_ENV, CONFIG_DIR, LOG_FILE, config, log
from .embedding import build_psi, measure_distortion
from .errors import DomainError, OrliczEmbedError, UsageError
from .orlicz import (
    CHECK_TOL,
    Exponents,
    WeightVector,
    describe,
    function_from_string,
)
from .rearrange import (
    construct_N_lemma25,
    construct_N_lemma26,
    lemma25_profile,
    lemma26_profile,
    star_inverse_grid,
    y_from_M,
)
from .reports import write_csv, write_json
from .verify import SUITES, SuiteSettings, run_suite

CONSTRUCTIONS = ("orlicz-from-a", "y-from-M", "psi")

# Defaults of the embedding pipeline: M = t^1.3, p = 1.1, r = 1.5
DEFAULT_P = 1.1
DEFAULT_R = 1.5
DEFAULT_M = "power:1.3"


def _parse_list(text, cast, name):
    """Parse a comma separated list such as "4,3,2,1"."""
    try:
        values = [cast(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"Invalid --{name} list: {text!r}") from exc
    if not values:
        raise UsageError(f"--{name} needs at least one value")
    return values


def parse_args(argv=None):
    """Parse command line arguments."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", help="Dimension(s), comma separated")
    common.add_argument("--p", type=float, help="Exponent p")
    common.add_argument("--r", type=float, help="Exponent r")
    common.add_argument("--seed", type=int, help="Seed for every random stream")
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")
    common.add_argument(
        "--mode", choices=["exact", "mc", "auto"], default="auto",
        help="Averaging mode (auto: exact under the caps, else Monte Carlo)",
    )
    common.add_argument("--threads", type=int, help="Worker threads")
    common.add_argument("--out", help="Output file (default: stdout)")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--M", dest="M", help="Orlicz function: power:P[:COEF], JSON or file")
    common.add_argument("--instances", type=int, help="Random instances per size")

    parser = argparse.ArgumentParser(
        description="Numerical checks for Orlicz norms, permutation averages and L1 embeddings",
        epilog=f"Set {CAPS_ENV}=single=9,triple=6 to raise enumeration caps "
               f"(results may take long).",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", parents=[common], help="Run an invariant suite")
    verify.add_argument("lemma", choices=list(SUITES), help="Suite id")
    verify.add_argument("--grid", type=int, help="Grid points for the duality check")

    construct = commands.add_parser("construct", parents=[common], help="Build an object")
    construct.add_argument("what", choices=CONSTRUCTIONS)
    construct.add_argument("--a", help="Weights a, comma separated")
    construct.add_argument("--y", help="Weights y, comma separated")

    distortion = commands.add_parser("distortion", parents=[common],
                                     help="Measure the empirical distortion")
    distortion.add_argument("--y", help="Weights y (default: y from M)")
    distortion.add_argument("--matrix", help="JSON file with one matrix or a list of matrices")
    distortion.add_argument("--perm-samples", type=int,
                            help="Permutation triples per L1 estimate in Monte Carlo mode")

    return parser.parse_args(argv)


class RunConfig:
    """Validated command line values for one run."""

    def __init__(self, command, target=None, n=None, p=None, r=None, seed=0, samples=None,
                 mode="auto", threads=None, out=None, format="json", grid=None, M=None, a=None,
                 y=None, matrix=None, instances=None, perm_samples=None):
        self.command = command
        self.target = target
        self.n = n
        self.p = p
        self.r = r
        self.seed = seed
        self.samples = samples
        self.mode = mode
        self.threads = threads
        self.out = out
        self.format = format
        self.grid = grid
        self.M = M
        self.a = a
        self.y = y
        self.matrix = matrix
        self.instances = instances
        self.perm_samples = perm_samples
        self._validate()

    def _validate(self):
        if self.n is not None and any(n < 1 for n in self.n):
            raise UsageError(f"--n values must be >= 1, got {self.n}")
        for name in ("samples", "threads", "instances", "perm_samples"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be >= 1, got {value}")
        if self.grid is not None and self.grid < 2:
            raise UsageError(f"--grid must be >= 2, got {self.grid}")
        if self.p is not None and self.p < 1:
            raise UsageError(f"--p must be >= 1, got {self.p}")
        if self.r is not None and self.r <= 1:
            raise UsageError(f"--r must be > 1, got {self.r}")

    @classmethod
    def from_args(cls, args):
        target = getattr(args, "lemma", None) or getattr(args, "what", None)
        M = None
        if args.M:
            try:
                M = function_from_string(args.M)
            except DomainError as exc:
                raise UsageError(str(exc)) from exc
        text = {name: getattr(args, name, None) for name in ("n", "a", "y")}
        return cls(
            command=args.command,
            target=target,
            n=_parse_list(text["n"], int, "n") if text["n"] else None,
            p=args.p,
            r=args.r,
            seed=config.seed if args.seed is None else args.seed,
            samples=args.samples,
            mode=args.mode,
            threads=args.threads,
            out=args.out,
            format=args.format,
            grid=getattr(args, "grid", None),
            M=M,
            a=_parse_list(text["a"], float, "a") if text["a"] else None,
            y=_parse_list(text["y"], float, "y") if text["y"] else None,
            matrix=getattr(args, "matrix", None),
            instances=args.instances,
            perm_samples=getattr(args, "perm_samples", None),
        )

    def single_n(self, default=None):
        if not self.n:
            if default is None:
                raise UsageError(f"{self.command} {self.target or ''} needs --n".strip())
            return default
        if len(self.n) != 1:
            raise UsageError(f"{self.command} takes a single --n, got {self.n}")
        return self.n[0]

    def exponents(self):
        return Exponents(self.p or DEFAULT_P, self.r or DEFAULT_R)

    def weights(self, name, n=None):
        values = getattr(self, name)
        if values is None:
            return None
        w = WeightVector.sorted_from(values)
        if n is not None and len(w) != n:
            raise UsageError(f"--{name} has {len(w)} entries, expected n = {n}")
        return w


def _write(report, schema, frame, cfg):
    if cfg.format == "csv":
        write_csv(frame, cfg.out)
    else:
        write_json(report, schema, cfg.out)


def cmd_verify(lemma_id, cfg):
    """Run one suite and write its report; 0 iff every asserted constant holds."""
    settings = SuiteSettings(
        n=cfg.n, p=cfg.p, r=cfg.r, seed=cfg.seed, samples=cfg.samples, mode=cfg.mode,
        threads=cfg.threads, grid=cfg.grid, instances=cfg.instances, M=cfg.M,
    )
    result = run_suite(lemma_id, settings)
    unbounded = {"lower": None, "upper": None}
    rows = [
        dict(name=name, **values, **result.stated_constants.get(name, unbounded))
        for name, values in result.empirical_constants.items()
    ]
    frame = pd.DataFrame(rows, columns=["name", "min_ratio", "max_ratio", "instances", "lower",
                                        "upper"])
    _write(result.to_dict(), "verify_report", frame, cfg)
    if not result.passed:
        log(f"Suite {lemma_id} failed; worst case: {result.worst_case_instance}", "error")
        return 1
    return 0


def construct_orlicz_from_a(a, e, two_exponent=False):
    """
    Report for the grid construction from weights a: N-bar (exponent r) or, with
    ``two_exponent``, the (p, r) construction.
    """
    n = len(a)
    if two_exponent:
        lemma, N, profile = "l26", construct_N_lemma26(a, e), lemma26_profile(a, e)
        lower, upper = 0.5, None
    else:
        lemma, N, profile = "l25", construct_N_lemma25(a, e), lemma25_profile(a, e.r)
        lower, upper = 1.0, 8.0
    u = np.arange(n + 1) / n
    grid = np.asarray(N.conjugate().inverse(u), dtype=float)
    ratios = profile[1:] / grid[1:]
    concave = bool(np.all(np.diff(grid, 2) <= CHECK_TOL * max(1.0, grid[-1])))
    within = ratios.min() >= lower * (1 - CHECK_TOL)
    if upper is not None:
        within = within and ratios.max() <= upper * (1 + CHECK_TOL)
    report = {
        "lemma": lemma,
        "n": n,
        "params": {"a": list(a.entries), "p": e.p, "r": e.r, "conjugate": "raw"},
        "grid_values": grid,
        "profile": profile,
        "constants": {"lower": float(ratios.min()), "upper": float(ratios.max())},
        "pass": bool(concave and within),
        "function": describe(N),
    }
    frame = pd.DataFrame({"ell": np.arange(n + 1), "u": u, "grid_value": grid, "profile": profile,
                          "ratio": np.concatenate(([np.nan], ratios))})
    return report, frame


def construct_y_from_M(M, n):
    y = y_from_M(M, n)
    grid = star_inverse_grid(M, n)
    report = {
        "lemma": "thm11",
        "n": n,
        "params": {"M": describe(M), "conjugate": "raw"},
        "grid_values": grid,
        "weights": list(y.entries),
        "constants": {"lower": None, "upper": None},
        "pass": bool(y.is_positive),
    }
    frame = pd.DataFrame({"ell": np.arange(1, n + 1), "weight": y.array, "star_inverse": grid[1:]})
    return report, frame


def _pipeline_weights(cfg, n):
    y = cfg.weights("y", n)
    if y is None:
        y = y_from_M(cfg.M or function_from_string(DEFAULT_M), n)
    return y


def cmd_construct(what, cfg):
    """Build one object and write it in its report schema."""
    if what == "orlicz-from-a":
        a = cfg.weights("a")
        if a is None:
            raise UsageError("construct orlicz-from-a needs --a")
        two_exponent = cfg.p is not None and cfg.p > 1
        e = Exponents(cfg.p if two_exponent else 1.0, cfg.r or 2.0)
        report, frame = construct_orlicz_from_a(a, e, two_exponent)
        _write(report, "construct_report", frame, cfg)
    elif what == "y-from-M":
        if cfg.M is None:
            raise UsageError("construct y-from-M needs --M")
        report, frame = construct_y_from_M(cfg.M, cfg.single_n())
        _write(report, "construct_report", frame, cfg)
    elif what == "psi":
        n = cfg.single_n()
        e = cfg.exponents()
        psi = build_psi(n, e, _pipeline_weights(cfg, n))
        report = {
            "n": n,
            "p": e.p,
            "r": e.r,
            "row_count": psi.row_count,
            "columns": n * n,
            "y": psi.y,
            "rows": psi.rows,
        }
        _write(report, "psi_matrix", psi.to_frame(), cfg)
    else:
        raise UsageError(f"Unknown construction {what!r}")
    return 0


def load_matrices(path, n):
    """Read one n x n matrix or a list of them from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = np.asarray(json.load(f), dtype=float)
    except (OSError, ValueError) as exc:
        raise UsageError(f"Cannot read matrices from {path}: {exc}") from exc
    if data.ndim == 2:
        data = data[None]
    if data.ndim != 3 or data.shape[1:] != (n, n):
        raise UsageError(f"Matrices in {path} must be {n} x {n}, got shape {data.shape}")
    return data


def cmd_distortion(cfg):
    """Measure the distortion for one n and write the report."""
    n = cfg.single_n()
    e = cfg.exponents()
    matrices = load_matrices(cfg.matrix, n) if cfg.matrix else None
    report = measure_distortion(
        n, e, _pipeline_weights(cfg, n), samples=cfg.samples, seed=cfg.seed, mode=cfg.mode,
        perm_samples=cfg.perm_samples, threads=cfg.threads, matrices=matrices,
    )
    log(f"Empirical distortion for n={n}: {report.distortion:.12g}")
    if report.lower_bound is not None:
        log(f"Lower bound context (5 sqrt 2)^-1 n^(1/p-1/r): {report.lower_bound:.12g}")
    _write(report.to_dict(), "distortion_report", report.to_frame(), cfg)
    return 0


def main(argv=None):
    """Entry point; returns the exit code."""
    args = parse_args(argv)

    log(f"Config directory: {CONFIG_DIR}", "debug")
    log(f"Log file: {LOG_FILE}", "debug")

    try:
        config.load()
        cfg = RunConfig.from_args(args)
        if cfg.command == "verify":
            return cmd_verify(cfg.target, cfg)
        if cfg.command == "construct":
            return cmd_construct(cfg.target, cfg)
        return cmd_distortion(cfg)
    except OrliczEmbedError as exc:
        log(str(exc), "error")
        return exc.exit_code
    except Exception as exc:
        log(f"Unexpected error: {exc}", "error")
        raise


if __name__ == "__main__":
    raise SystemExit(main())
