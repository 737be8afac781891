"""Tests for Orlicz functions, conjugates, inverses and Luxemburg norms."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orliczembed.errors import DomainError, OrliczRangeError
from orliczembed.orlicz import (
    ComposedPower,
    Exponents,
    PiecewiseAffine,
    Power,
    WeightVector,
    check_regularity,
    compose_power,
    conjugate_exponent,
    equivalence_constants,
    function_from_dict,
    function_from_string,
    luxemburg_norm,
    luxemburg_norms,
    normalized_power_conjugate,
    power_conjugate_inverse_constant,
)
from orliczembed.verify import random_pwa

STEP = PiecewiseAffine(((0.0, 0.0), (1.0, 1.0)), 2.0)

exponents = st.floats(min_value=1.0, max_value=5.0)
coordinates = st.floats(min_value=-100, max_value=100, allow_subnormal=False)
vectors = st.lists(coordinates, min_size=1, max_size=6)


def _pwa(seed):
    return random_pwa(np.random.default_rng(seed))


def test_power_evaluates_and_inverts():
    assert Power(2)(3.0) == pytest.approx(9.0)
    assert Power(2).inverse(9.0) == pytest.approx(3.0)
    assert Power(1)(0.0) == 0.0


def test_pwa_affine_extension():
    """Beyond the last breakpoint the terminal slope continues the function."""
    assert STEP(2.0) == pytest.approx(3.0)
    assert STEP.inverse(3.0) == pytest.approx(2.0)


def test_inverse_of_zero_is_zero():
    for f in (Power(2), Power(1.3, 4.0), STEP, _pwa(1), STEP.conjugate()):
        assert f.inverse(0.0) == 0.0


def test_negative_argument_is_a_domain_error():
    with pytest.raises(DomainError):
        Power(2)(-1.0)
    with pytest.raises(DomainError):
        STEP.inverse(-0.5)


def test_vectorized_evaluation_keeps_shape():
    t = np.array([[0.0, 1.0], [2.0, 3.0]])
    assert STEP(t).shape == (2, 2)
    assert np.allclose(Power(2)(t), t**2)


def test_power_two_conjugate_is_quarter_square():
    star = Power(2).conjugate()
    s = np.array([0.0, 1.0, 2.0, 5.0])
    assert np.allclose(star(s), s**2 / 4)


def test_power_one_conjugate_is_indicator():
    star = Power(1).conjugate()
    assert star(0.5) == 0.0
    assert star(1.0) == 0.0
    assert math.isinf(star(1.5))
    assert star.domain_end == 1.0


def test_bounded_inverse_clamps_or_raises():
    star = Power(1).conjugate()
    assert star.inverse(10.0) == 1.0
    with pytest.raises(OrliczRangeError):
        star.inverse(10.0, strict=True)


def test_raw_conjugate_inverse_constant():
    """The raw conjugate of t^r inverts to C_r t^(1/r*)."""
    for r in (1.2, 1.5, 2.0, 3.0):
        t = np.array([0.1, 1.0, 7.0])
        c = power_conjugate_inverse_constant(r)
        expected = c * t ** (1 / conjugate_exponent(r))
        assert np.allclose(Power(r).conjugate().inverse(t), expected, rtol=1e-12)
    assert power_conjugate_inverse_constant(2.0) == pytest.approx(2.0)


def test_normalized_conjugate_differs_from_raw():
    t = np.array([0.5, 2.0])
    raw = Power(2).conjugate().inverse(t)
    assert not np.allclose(normalized_power_conjugate(2.0).inverse(t), raw)


def test_conjugate_exponent_edges():
    assert conjugate_exponent(2.0) == 2.0
    assert math.isinf(conjugate_exponent(1.0))
    with pytest.raises(DomainError):
        conjugate_exponent(0.5)


def test_pwa_conjugate_matches_dense_grid_oracle():
    f = PiecewiseAffine(((0.0, 0.0), (1.0, 1.0)), 50.0)
    star = f.conjugate()
    ts = np.linspace(0.0, 10.0, 100001)
    for x in (0.0, 0.5, 1.0, 2.0, 10.0, 49.0):
        oracle = np.max(x * ts - f(ts))
        assert star(x) == pytest.approx(oracle, abs=1e-6)
    assert math.isinf(star(51.0))


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_double_conjugate_recovers_breakpoints(seed):
    f = _pwa(seed)
    back = f.conjugate().conjugate()
    assert np.allclose(back.ts, f.ts, rtol=1e-9, atol=1e-12)
    assert np.allclose(back.vs, f.vs, rtol=1e-9, atol=1e-12)
    assert back.terminal_slope == pytest.approx(f.terminal_slope, rel=1e-9)


def test_from_points_merges_collinear_breakpoints():
    f = PiecewiseAffine.from_points([0, 1, 1, 2], [0, 1, 1, 2], 3.0)
    assert f.breakpoints == ((0.0, 0.0), (2.0, 2.0))
    assert f(3.0) == pytest.approx(5.0)
    g = PiecewiseAffine.from_points([0, 1, 2], [0, 1, 3], 2.0)
    assert g.breakpoints == ((0.0, 0.0), (1.0, 1.0))


def test_pwa_rejects_concave_input():
    with pytest.raises(DomainError):
        PiecewiseAffine(((0.0, 0.0), (1.0, 2.0), (2.0, 3.0)), 5.0)
    with pytest.raises(DomainError):
        PiecewiseAffine(((1.0, 0.0), (2.0, 1.0)), 2.0)


@settings(max_examples=100, deadline=None)
@given(exponents, st.floats(min_value=1e-3, max_value=1e3))
def test_young_duality_for_powers(p, t):
    """t <= M^{-1}(t) M^{*-1}(t) <= 2t."""
    f = Power(p)
    product = f.inverse(t) * f.conjugate().inverse(t)
    assert t * (1 - 1e-9) <= product <= 2 * t * (1 + 1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.floats(min_value=1e-3, max_value=1e3))
def test_young_duality_for_random_pwa(seed, t):
    f = _pwa(seed)
    product = f.inverse(t) * f.conjugate().inverse(t)
    assert t * (1 - 1e-9) <= product <= 2 * t * (1 + 1e-9)


def test_luxemburg_of_power_is_lp_norm():
    x = np.array([3.0, -4.0, 1.0])
    for p in (1.0, 1.5, 2.0, 3.0):
        assert luxemburg_norm(Power(p), x) == pytest.approx(np.linalg.norm(x, p), rel=1e-9)


def test_luxemburg_of_single_coordinate():
    """|t e_1|_f = |t| / f^{-1}(1)."""
    f = _pwa(7)
    assert luxemburg_norm(f, [3.0, 0.0, 0.0]) == pytest.approx(3.0 / f.inverse(1.0), rel=1e-9)


def test_luxemburg_of_zero_vector():
    assert luxemburg_norm(STEP, np.zeros(4)) == 0.0


def test_luxemburg_rejects_non_finite():
    with pytest.raises(DomainError):
        luxemburg_norm(STEP, [1.0, math.nan])


def test_luxemburg_agrees_with_bracketing_oracle():
    rng = np.random.default_rng(11)
    for k in range(100):
        f = random_pwa(rng)
        x = rng.standard_normal(rng.integers(1, 7))
        rho = luxemburg_norm(f, x)
        assert np.sum(f(np.abs(x) / (rho * (1 + 1e-6)))) <= 1.0
        assert np.sum(f(np.abs(x) / (rho * (1 - 1e-6)))) > 1.0


@settings(max_examples=50, deadline=None)
@given(vectors, vectors, st.floats(min_value=-10, max_value=10))
def test_luxemburg_is_a_norm(u, v, lam):
    n = min(len(u), len(v))
    x, y = np.array(u[:n]), np.array(v[:n])
    f = PiecewiseAffine(((0.0, 0.0), (1.0, 0.5), (2.0, 2.0)), 4.0)
    nx, ny = luxemburg_norm(f, x), luxemburg_norm(f, y)
    assert luxemburg_norm(f, lam * x) == pytest.approx(abs(lam) * nx, rel=1e-8, abs=1e-9)
    assert luxemburg_norm(f, x + y) <= (nx + ny) * (1 + 1e-8) + 1e-9


def test_luxemburg_norms_batches_rows():
    rows = np.array([[1.0, 2.0], [0.0, 0.0], [3.0, -1.0]])
    batch = luxemburg_norms(STEP, rows)
    assert np.allclose(batch, [luxemburg_norm(STEP, row) for row in rows])


def test_compose_power_shortcuts():
    assert compose_power(Power(2), 1.5) == Power(3.0)
    assert compose_power(STEP, 1) is STEP
    assert isinstance(compose_power(STEP, 2.0), ComposedPower)


def test_composed_power_norm_matches_definition():
    N = ComposedPower(STEP, 1.5)
    x = np.array([0.7, -2.0, 1.1])
    rho = luxemburg_norm(N, x)
    assert np.sum(N(np.abs(x) / rho)) == pytest.approx(1.0, rel=1e-7)


def test_composed_conjugate_matches_dense_grid_oracle():
    N = ComposedPower(STEP, 2.0)
    star = N.conjugate()
    ts = np.linspace(0.0, 20.0, 200001)
    for s in (0.0, 0.3, 1.0, 2.5, 6.0):
        assert star(s) == pytest.approx(np.max(s * ts - N(ts)), abs=1e-6)


def test_composed_conjugate_inverse_round_trips():
    star = ComposedPower(STEP, 2.0).conjugate()
    v = np.array([0.2, 1.0, 3.0])
    assert np.allclose(star(star.inverse(v)), v, rtol=1e-8)


def test_check_regularity_power_family():
    assert check_regularity(Power(1.2), 1.5, "decreasing")
    assert check_regularity(Power(1.5), 1.5, "decreasing")
    report = check_regularity(Power(2.0), 1.5, "decreasing")
    assert not report
    assert report.violation[0] < report.violation[1]
    assert check_regularity(Power(2.0), 1.5, "increasing")


def test_check_regularity_validates_arguments():
    with pytest.raises(DomainError):
        check_regularity(Power(2), 0.5)
    with pytest.raises(DomainError):
        check_regularity(Power(2), 2, "sideways")


def test_equivalence_constants():
    grid = np.geomspace(0.1, 10, 50)
    assert equivalence_constants(STEP, STEP, grid) == (1.0, 1.0)
    assert equivalence_constants(Power(1), Power(2), [1.0]) == (1.0, 1.0)
    interp = PiecewiseAffine.interpolating(Power(2), np.geomspace(0.01, 20, 2000))
    a, b = equivalence_constants(Power(2), interp, np.linspace(0.1, 10, 200))
    assert b / a <= 1.01
    with pytest.raises(DomainError):
        equivalence_constants(STEP, STEP, [])


def test_exponents_and_weights():
    e = Exponents(1.5, 1.8)
    assert e.p_star == pytest.approx(3.0)
    assert e.c_r == pytest.approx(power_conjugate_inverse_constant(1.8))
    with pytest.raises(DomainError):
        Exponents(1.8, 1.5).require_ordered()
    with pytest.raises(DomainError):
        Exponents(0.5, 2.0)
    w = WeightVector.generated(4, 2.0)
    assert w.entries[0] == pytest.approx(2.0) and w.entries[-1] == pytest.approx(1.0)
    assert WeightVector.sorted_from([1, -3, 2]).entries == (3.0, 2.0, 1.0)
    with pytest.raises(DomainError):
        WeightVector((1.0, 2.0))
    with pytest.raises(DomainError):
        WeightVector((1.0, 0.0)).require_positive()


def test_value_objects_compare_by_value():
    assert Exponents(1.5, 1.8) == Exponents(1.5, 1.8) != Exponents(1.5, 1.9)
    assert len({WeightVector((2.0, 1.0)), WeightVector((2.0, 1.0))}) == 1
    assert PiecewiseAffine(((0, 0), (1, 1)), 2) == PiecewiseAffine(((0.0, 0.0), (1.0, 1.0)), 2.0)
    assert Power(2) != Power(2, 3.0)
    assert hash(Power(1.5)) == hash(Power(1.5))


def test_function_from_string_forms(tmp_path):
    assert function_from_string("power:2") == Power(2.0)
    assert function_from_string("power:2:3") == Power(2.0, 3.0)
    inline = '{"kind": "pwa", "breakpoints": [[0, 0], [1, 1]], "terminal_slope": 2}'
    assert function_from_string(inline) == STEP
    path = tmp_path / "m.json"
    path.write_text(json.dumps(STEP.to_dict()))
    assert function_from_string(str(path)) == STEP
    with pytest.raises(DomainError):
        function_from_string("cubic")
    with pytest.raises(DomainError):
        function_from_string("power:x")


def test_function_from_dict_rejects_non_strict():
    data = {"kind": "pwa", "breakpoints": [[0, 0], [1, 0]], "terminal_slope": None}
    with pytest.raises(DomainError):
        function_from_dict(data)
    assert function_from_dict(data, strict=False).bounded
