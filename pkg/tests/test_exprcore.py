import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gencrf import exprcore as ec
from oracles import fd_grad, random_expr


def x(i):
    return ec.coord(i - 1)


def test_parse_precedence_and_values():
    e = ec.parse_expr("1 + 2*x1^2 - x2/4", 2)
    assert ec.evaluate(e, [3.0, 2.0]) == pytest.approx(1 + 18 - 0.5)
    assert ec.evaluate(ec.parse_expr("-x1^2", 1), [3.0]) == -9.0
    assert ec.evaluate(ec.parse_expr("2^-2 + PI + E", 1), [0.0]) == pytest.approx(0.25 + math.pi + math.e)
    assert ec.evaluate(ec.parse_expr("sin(x1)*exp(x2) + log(x3) + sqrt(x3)", 3), [0.3, 0.2, 4.0]) == \
        pytest.approx(math.sin(0.3) * math.exp(0.2) + math.log(4) + 2)


@pytest.mark.parametrize("src", ["1 +", "x1 *", "(x1", "foo(x1)", "x1 $ 2", "x1^x2", "sin x1"])
def test_syntax_errors_carry_position(src):
    with pytest.raises(ec.ExprSyntaxError) as info:
        ec.parse_expr(src, 2)
    assert 0 <= info.value.pos <= len(src)


def test_coordinate_range():
    with pytest.raises(ec.CoordinateRangeError):
        ec.parse_expr("x4", 3)
    with pytest.raises(ec.CoordinateRangeError):
        ec.parse_expr("t1", 3)
    t = ec.parse_expr("t1", 3, nfactors=1)
    assert ec.evaluate(t, [0, 0, 0, 0.7]) == pytest.approx(0.7)


def test_interning_and_folding():
    assert ec.add(x(1), x(2)) is ec.add(x(1), x(2))
    assert ec.mul(ec.ZERO, x(1)) is ec.ZERO
    assert ec.add(ec.ZERO, x(1)) is x(1)
    assert ec.mul(ec.const(2), ec.const(3)).value == 6.0


def test_hand_derivatives():
    e = ec.parse_expr("x1^3*x2 + sin(x1*x2)", 2)
    d1 = ec.partial(e, 0)
    p = [0.4, -1.3]
    expect = 3 * 0.4 ** 2 * -1.3 + math.cos(0.4 * -1.3) * -1.3
    assert ec.evaluate(d1, p) == pytest.approx(expect)
    assert ec.partial(e, 2) is ec.ZERO


def test_domain_error_names_subexpression():
    e = ec.parse_expr("x1 + 1/x2", 2)
    with pytest.raises(ec.DomainError) as info:
        ec.evaluate(e, [1.0, 0.0])
    assert "x2" in str(info.value)
    vals, bad = ec.evaluate_many([e], np.array([[1.0, 0.0], [1.0, 2.0]]))
    assert bad.tolist() == [True, False]
    assert vals[0, 1] == pytest.approx(1.5)


def test_jets_match_finite_differences():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-0.9, 0.9, (20, 3))
    for _ in range(20):
        e = random_expr(rng, 3)
        val, grad, bad = ec.eval_jets(e, pts)
        assert not bad.any()
        fd = fd_grad(np.array([e], dtype=object), pts)[:, 0, :]
        assert np.max(np.abs(grad - fd) / np.maximum(1.0, np.abs(fd))) < 1e-6


def test_sampling_is_seeded_and_inside():
    dom = ec.CoordinateDomain(2, ((0, 1), (-3, 3)), (False, True))
    a, b = dom.sample(50, 11), dom.sample(50, 11)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, dom.sample(50, 12))
    assert all(dom.contains(p) for p in a)


def test_sample_valid_redraws_degenerate_points():
    dom = ec.CoordinateDomain.cube(1)
    pts = ec.sample_valid(dom, 40, 0, lambda p: p[:, 0] < 0)
    assert np.all(pts[:, 0] >= 0)
    with pytest.raises(ec.SamplingError):
        ec.sample_valid(dom, 5, 0, lambda p: np.ones(len(p), bool), max_retries=2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_print_parse_round_trip(seed):
    rng = np.random.default_rng(seed)
    e = random_expr(rng, 3)
    back = ec.parse_expr(ec.to_str(e), 3)
    pts = rng.uniform(-1, 1, (8, 3))
    a, _ = ec.evaluate_many([e], pts)
    b, _ = ec.evaluate_many([back], pts)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mixed_partials_commute(seed):
    rng = np.random.default_rng(seed)
    e = random_expr(rng, 2)
    pts = rng.uniform(-1, 1, (6, 2))
    a, _ = ec.evaluate_many([ec.partial(ec.partial(e, 0), 1)], pts)
    b, _ = ec.evaluate_many([ec.partial(ec.partial(e, 1), 0)], pts)
    assert np.allclose(a, b, rtol=1e-9, atol=1e-9)
