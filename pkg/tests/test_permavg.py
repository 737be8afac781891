"""Tests for exact and Monte Carlo permutation averages."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orliczembed.errors import DomainError, ResourceError
from orliczembed.orlicz import Exponents, PiecewiseAffine, Power, WeightVector, luxemburg_norm
from orliczembed.permavg import (
    AverageEstimate,
    Mode,
    TensorB,
    ave_double_max,
    ave_lp_generator,
    ave_matrix_triple,
    ave_moment,
    ave_single,
    ave_triple_max,
    double_max_constants,
    double_max_weights,
    permutation_average,
    resolve_mode,
    triple_max_bounds,
)
from orliczembed.rearrange import rearrange

STEP = PiecewiseAffine(((0.0, 0.0), (1.0, 1.0)), 2.0)


def test_mode_parse():
    assert Mode.parse("mc") is Mode.MONTE_CARLO
    assert Mode.parse("exact") is Mode.EXACT
    with pytest.raises(DomainError):
        Mode.parse("bogus")


def test_resolve_mode_auto_and_caps(restore_config):
    assert resolve_mode("auto", 5, "single") == (Mode.EXACT, 0)
    mode, samples = resolve_mode("auto", 9, "single")
    assert mode is Mode.MONTE_CARLO and samples == restore_config.mc_samples
    with pytest.raises(ResourceError):
        resolve_mode("exact", 9, "single")
    restore_config.caps["single"] = 9
    assert resolve_mode("exact", 9, "single") == (Mode.EXACT, 0)


def test_exact_estimate_has_no_interval():
    with pytest.raises(DomainError):
        AverageEstimate(1.0, "exact", 6, 0.1, 0)
    est = AverageEstimate(4.0, "monte_carlo", 100, 0.4, 0).root(2)
    assert est.value == pytest.approx(2.0)
    assert est.ci95_halfwidth == pytest.approx(0.1)


def test_constant_weights_give_the_norm():
    x = np.array([1.0, -2.0, 0.5, 3.0])
    a = WeightVector((2.0,) * 4)
    est = ave_single(x, a, Power(1.5), "exact")
    assert est.value == pytest.approx(2 * np.linalg.norm(x, 1.5), rel=1e-9)
    assert est.mode == "exact" and est.samples == 24


def test_single_coordinate_average():
    est = ave_single([3.0], WeightVector((2.0,)), STEP, "exact")
    assert est.value == pytest.approx(6.0 / STEP.inverse(1.0))


def test_moment_matches_direct_enumeration():
    x = np.array([0.3, 1.0, 2.0])
    a = WeightVector((3.0, 1.0, 0.5))
    direct = np.mean([
        luxemburg_norm(STEP, x * a.array[list(p)]) ** 2 for p in itertools.permutations(range(3))
    ])
    assert ave_moment(x, a, STEP, 2.0, "exact").value == pytest.approx(direct, rel=1e-9)


def test_monte_carlo_agrees_with_exact(restore_config):
    restore_config.block_size = 1000
    rng = np.random.default_rng(1)
    x = rng.standard_normal(5)
    a = WeightVector.sorted_from(rng.uniform(0.5, 3, 5))
    exact = ave_single(x, a, Power(1.7), "exact").value
    mc = ave_single(x, a, Power(1.7), "mc", samples=20000, seed=3)
    assert mc.mode == "monte_carlo" and mc.samples == 20000
    assert abs(mc.value - exact) <= 5 * mc.ci95_halfwidth


def test_monte_carlo_ignores_thread_count(restore_config):
    restore_config.block_size = 500
    x = np.arange(1.0, 7.0)
    a = WeightVector.generated(6, 1.5)
    one = ave_single(x, a, STEP, "mc", samples=3000, seed=5, threads=1)
    four = ave_single(x, a, STEP, "mc", samples=3000, seed=5, threads=4)
    assert one.value == four.value
    assert one.ci95_halfwidth == four.ci95_halfwidth
    other = ave_single(x, a, STEP, "mc", samples=3000, seed=6, threads=1)
    assert other.value != one.value


def test_exact_mode_ignores_thread_count(restore_config):
    restore_config.block_size = 7
    x = np.array([1.0, 2.0, 0.5, 4.0])
    a = WeightVector.generated(4, 1.2)
    assert ave_single(x, a, STEP, "exact", threads=3).value == pytest.approx(
        ave_single(x, a, STEP, "exact", threads=1).value, rel=1e-15
    )


def test_exact_beyond_cap_is_a_resource_error():
    with pytest.raises(ResourceError):
        ave_single(np.ones(9), WeightVector((1.0,) * 9), STEP, "exact")


def test_multi_factor_enumeration_covers_all_tuples():
    counts = {}

    def integrand(perms, rng):
        for row in zip(*(map(tuple, p) for p in perms)):
            counts[row] = counts.get(row, 0) + 1
        return np.zeros(len(perms[0]))

    est = permutation_average(integrand, 3, factors=2, mode="exact", cap_key="double")
    assert est.samples == 36
    assert len(counts) == 36 and set(counts.values()) == {1}


def test_double_max_zero_vector():
    assert ave_double_max(np.zeros(4), Power(2), "exact").value == 0.0


def test_double_max_weights_for_power_two():
    n = 4
    d = double_max_weights(Power(2), n)
    j = np.arange(1, n + 1)
    assert np.allclose(d, 2 * n * (np.sqrt(j / n) - np.sqrt((j - 1) / n)))


def test_double_max_sandwich_at_five():
    assert double_max_constants(5) == (0.125, 2.0)
    assert double_max_constants(3) == (None, 2.0)
    rng = np.random.default_rng(2)
    for _ in range(5):
        x = rng.standard_normal(5)
        ratio = ave_double_max(x, Power(2), "exact").value / luxemburg_norm(Power(2), x)
        assert 0.125 <= ratio <= 2.0


def test_triple_max_constant_tensor():
    assert ave_triple_max(TensorB(np.full((3, 3, 3), 2.5)), "exact").value == pytest.approx(2.5)


def test_triple_max_single_entry():
    entries = np.zeros((2, 2, 2))
    entries[0, 0, 0] = 1.0
    assert ave_triple_max(TensorB(entries), "exact").value == pytest.approx(0.25)


def test_triple_max_bounds_at_three():
    entries = np.random.default_rng(4).exponential(1.0, (3, 3, 3))
    top = rearrange(entries).top(9)
    lower, upper = triple_max_bounds(TensorB(entries))
    assert lower == pytest.approx(top / 144)
    assert upper == pytest.approx(4 * top / 9)


def test_tensor_rejects_bad_shapes():
    with pytest.raises(DomainError):
        TensorB(np.ones((2, 3, 2)))
    with pytest.raises(DomainError):
        TensorB(-np.ones((2, 2, 2)))


def test_lp_generator_special_vectors():
    n, e = 5, Exponents(1.5, 2.0)
    a = WeightVector.generated(n, e.p).array
    e1 = np.eye(n)[0]
    assert ave_lp_generator(e1, e, "exact").value == pytest.approx(a.mean())
    assert ave_lp_generator(np.ones(n), e, "exact").value == pytest.approx(np.linalg.norm(a))


def test_matrix_triple_single_entry_factorizes():
    n = 3
    a = np.zeros((n, n))
    a[0, 0] = 1.0
    x, y, z = np.array([3.0, 2.0, 1.0]), np.array([2.0, 1.0, 0.5]), np.array([1.0, 1.0, 0.25])
    value = ave_matrix_triple(a, x, y, z, "exact").value
    assert value == pytest.approx(x.mean() * y.mean() * z.mean(), rel=1e-12)


def test_matrix_triple_diagonal_by_hand():
    """Identity at n=2: (pi, sigma) aligned gives sqrt(4*9 + 1), crossed gives sqrt(4 + 9)."""
    value = ave_matrix_triple(np.eye(2), [2.0, 1.0], [3.0, 1.0], [1.0, 1.0], "exact").value
    assert value == pytest.approx((math.sqrt(37) + math.sqrt(13)) / 2, rel=1e-12)


def test_matrix_triple_needs_square_matrix():
    with pytest.raises(DomainError):
        ave_matrix_triple(np.ones((2, 3)), [1, 1], [1, 1], [1, 1])


def test_estimate_to_dict():
    est = ave_single([1.0, 1.0], WeightVector((1.0, 1.0)), Power(2), "exact", seed=9)
    assert est.to_dict() == {
        "value": pytest.approx(math.sqrt(2)),
        "mode": "exact",
        "samples": 2,
        "ci95": 0.0,
        "seed": 9,
    }


relabelings = st.permutations(range(4))
vectors4 = st.lists(
    st.floats(min_value=-20, max_value=20, allow_subnormal=False), min_size=4, max_size=4
)


@settings(max_examples=25, deadline=None)
@given(vectors4, relabelings)
def test_exact_single_average_ignores_relabeling(x, tau):
    x = np.array(x)
    a = WeightVector((3.0, 2.0, 1.5, 0.5))
    value = ave_single(x, a, STEP, "exact").value
    assert ave_single(x[list(tau)], a, STEP, "exact").value == pytest.approx(
        value, rel=1e-9, abs=1e-12
    )


@settings(max_examples=25, deadline=None)
@given(vectors4, relabelings)
def test_exact_double_max_ignores_relabeling(x, tau):
    x = np.array(x)
    value = ave_double_max(x, Power(1.5), "exact").value
    relabeled = ave_double_max(x[list(tau)], Power(1.5), "exact").value
    assert relabeled == pytest.approx(value, rel=1e-12, abs=1e-12)


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.permutations(range(3)))
def test_exact_triple_max_ignores_relabeling(seed, tau):
    entries = np.random.default_rng(seed).exponential(1.0, (3, 3, 3))
    value = ave_triple_max(TensorB(entries), "exact").value
    rows = ave_triple_max(TensorB(entries[list(tau)]), "exact").value
    columns = ave_triple_max(TensorB(entries[:, list(tau)]), "exact").value
    assert rows == pytest.approx(value, rel=1e-12)
    assert columns == pytest.approx(value, rel=1e-12)
