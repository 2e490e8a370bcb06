from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from fraccoop.errors import DegenerateFieldError, DimensionMismatchError, FieldEvaluationError, InvalidParameterError
from fraccoop.field import (
    VectorField,
    analyze,
    check_cooperative,
    decay_margin,
    degree_at,
    estimate_homogeneity_degree,
    fd_jacobian,
    find_decay_direction,
    weighted_norm,
)
from fraccoop.systems import example1_field, example2_field, linear_field


# {{{ weighted norm


def test_weighted_norm_values():
    assert weighted_norm(np.zeros(3), (3.0, 1.0, 1.0)) == 0.0
    assert weighted_norm((0.5, 0.3, 0.8), (3.0, 1.0, 1.0)) == 0.8
    v = np.array([0.3, 2.0, 7.0])
    assert weighted_norm(v, v) == 1.0


def test_weighted_norm_errors():
    with pytest.raises(DimensionMismatchError):
        weighted_norm((1.0, 2.0), (1.0, 1.0, 1.0))
    with pytest.raises(InvalidParameterError):
        weighted_norm((1.0, 2.0), (1.0, 0.0))


vectors = hnp.arrays(np.float64, 4, elements=st.floats(-1e3, 1e3))
weights = hnp.arrays(np.float64, 4, elements=st.floats(1e-2, 1e2))


@given(x=vectors, y=vectors, v=weights, c=st.floats(-1e3, 1e3))
@settings(max_examples=100)
def test_weighted_norm_is_a_norm(x, y, v, c):
    nx, ny = weighted_norm(x, v), weighted_norm(y, v)
    assert nx >= 0.0
    assert weighted_norm(c * x, v) == pytest.approx(abs(c) * nx, rel=1e-12, abs=1e-300)
    assert weighted_norm(x + y, v) <= nx + ny + 1e-9 * (nx + ny)
    if not np.any(x):
        assert nx == 0.0


# }}}


# {{{ jacobian and cooperativity


def test_fd_jacobian_linear():
    A = np.array([[-2.0, 1.0, 0.5], [1.0, -3.0, 0.0], [0.2, 0.1, -1.0]])
    x = np.array([0.3, 1.5, 2.0])
    assert np.allclose(fd_jacobian(lambda w: A @ w, x), A, atol=1e-8)


def test_fd_jacobian_one_sided_at_boundary():
    f = lambda w: np.array([np.sqrt(w[0]) * w[1], w[0] ** 2])  # noqa: E731
    x = np.array([1e-8, 1.0])
    jac = fd_jacobian(f, x)
    assert np.all(np.isfinite(jac))


def test_analytic_jacobians_match_finite_differences():
    rng = np.random.default_rng(1)
    for f in (example1_field(), example2_field()):
        for _ in range(5):
            x = rng.uniform(0.1, 2.0, f.dimension)
            assert np.allclose(f.jacobian(x), fd_jacobian(f.func, x), atol=1e-6)


def test_example1_is_cooperative():
    v = check_cooperative(example1_field())
    assert v.passed and v.name == "cooperative"


def test_metzler_linear_is_cooperative():
    A = np.array([[-2.0, 1.0, 1.0], [1.0, -2.0, 1.0], [1.0, 1.0, -2.0]])
    v = check_cooperative(linear_field(A), samples=16)
    assert v.passed
    assert v.worst_margin == pytest.approx(1.0)


def test_non_metzler_reports_entry():
    f = linear_field([[-1.0, -1.0], [0.0, -1.0]])
    v = check_cooperative(f, samples=8)
    assert not v.passed
    assert v.worst_margin == pytest.approx(-1.0)
    assert v.details["entry"] == (0, 1)
    assert "d f1/d w2" in v.description


def test_cooperative_reports_evaluation_failure():
    def bad(w):
        if w[0] > 0.5:
            return np.array([math.nan, 0.0])
        return -w

    with pytest.raises(FieldEvaluationError):
        check_cooperative(VectorField(2, bad), samples=64)


def test_cooperative_argument_checks():
    with pytest.raises(InvalidParameterError):
        check_cooperative(example1_field(), samples=0)
    with pytest.raises(InvalidParameterError):
        check_cooperative(example1_field(), box_radius=0.0)


def test_cooperative_is_deterministic():
    a = check_cooperative(example2_field(), seed=3)
    b = check_cooperative(example2_field(), seed=3)
    assert a == b


# }}}


# {{{ homogeneity


def test_example1_degree_arithmetic():
    f = example1_field()
    assert np.allclose(f(np.array([1.0, 1.0])), [-1.0, -3.0])
    assert np.allclose(f(np.array([4.0, 4.0])), [-8.0, -24.0])
    assert degree_at(f, np.array([1.0, 1.0]), 4.0) == pytest.approx(1.5, abs=1e-14)


@pytest.mark.parametrize("f,p", [(example1_field(), 1.5), (example2_field(), 1.0), (linear_field([[-1.0, 2.0], [3.0, -4.0]]), 1.0)])
def test_degree_estimates(f, p):
    est, res = estimate_homogeneity_degree(f)
    assert est == pytest.approx(p, abs=1e-10)
    assert res <= 1e-12


def test_degree_scale_equivariance():
    for f in (example1_field(), example2_field()):
        p2, _ = estimate_homogeneity_degree(f, scales=(2.0,))
        p4, _ = estimate_homogeneity_degree(f, scales=(4.0,))
        assert abs(p2 - p4) <= 1e-6


def test_inhomogeneous_field_has_residual():
    f = VectorField(2, lambda w: np.array([-w[0] + w[1] ** 2, w[0] - w[1]]))
    _, res = estimate_homogeneity_degree(f)
    assert res > 1e-3


def test_zero_field_is_degenerate():
    with pytest.raises(DegenerateFieldError):
        estimate_homogeneity_degree(VectorField(2, lambda w: np.zeros(2)))
    with pytest.raises(InvalidParameterError):
        estimate_homogeneity_degree(example1_field(), probes=1)


@pytest.mark.parametrize("f", [example1_field(), example2_field()])
def test_homogeneous_fields_vanish_at_origin(f):
    _, res = estimate_homogeneity_degree(f)
    assert res <= 1e-8
    assert np.max(np.abs(f(np.zeros(f.dimension)))) <= 1e-6


# }}}


# {{{ decay direction


def test_documented_decay_directions():
    f1 = example1_field()
    assert np.allclose(f1(np.array([1.0, 1.0])), [-1.0, -3.0])
    f2 = example2_field()
    assert np.allclose(f2(np.array([3.0, 1.0, 1.0])), [-1.0, math.sqrt(10) - 4.0, math.sqrt(2) - 2.0])
    assert decay_margin(f2, (3.0, 1.0, 1.0)) == pytest.approx(1.0 / 3.0)


@pytest.mark.parametrize("f", [example1_field(), example2_field(), linear_field([[-3.0, 1.0], [1.0, -1.0]])])
def test_found_direction_satisfies_postcondition(f):
    v = find_decay_direction(f, budget=200)
    assert v is not None
    assert np.all(v > 0.0)
    assert np.all(f(v) < 0.0)
    assert np.max(v) == pytest.approx(1.0)


def test_no_direction_for_nonnegative_field():
    f = VectorField(2, lambda w: np.array([w[1], w[0]]))
    assert find_decay_direction(f, budget=200) is None


def test_direction_search_rescales():
    f = example2_field()
    v = find_decay_direction(f, budget=100, scale=5.0)
    assert np.max(v) == pytest.approx(5.0)


@given(
    a=st.floats(0.5, 5.0),
    b=st.floats(0.5, 5.0),
    c=st.floats(0.0, 2.0),
    e=st.floats(0.0, 2.0),
)
@settings(max_examples=30)
def test_direction_exists_for_hurwitz_metzler(a, b, c, e):
    # a Metzler matrix is Hurwitz iff some v > 0 has Av < 0
    A = np.array([[-a, c], [e, -b]])
    found = find_decay_direction(linear_field(A), budget=200)
    hurwitz = a * b - c * e > 1e-6
    if found is not None:
        assert np.all(A @ found < 0.0)
        assert hurwitz
    elif hurwitz and a * b - c * e > 1e-2:
        pytest.fail(f"no direction found for Hurwitz {A.tolist()}")


# }}}


def test_analyze_reports():
    rep = analyze(example1_field())
    assert rep.ok
    assert rep.degree == pytest.approx(1.5)
    lines = rep.lines()
    assert lines[0].startswith("CHECK cooperative PASS")
    assert any(line.startswith("CHECK decay_direction PASS") for line in lines)

    bad = analyze(linear_field([[-1.0, -1.0], [0.0, -1.0]]), samples=8)
    assert not bad.ok
    assert bad.lines()[0].startswith("CHECK cooperative FAIL")


def test_clip_negative_adapter():
    f = example1_field()
    assert np.all(np.isfinite(f(np.array([-1e-9, 0.5]))))
