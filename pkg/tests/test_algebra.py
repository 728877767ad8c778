from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symplab import algebra as al
from symplab.algebra import Alg, ein

floats = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def _g(b, e1=0.0, e2=0.0, e12=0.0) -> Alg:
    return Alg.grassmann(np.array(b, float), e1, e2, e12)


def test_generator_products():
    e1, e2 = _g(0.0, 1.0), _g(0.0, 0.0, 1.0)
    assert (e1 * e2).e12() == 1.0
    assert (e2 * e1).e12() == -1.0
    assert np.all((e1 * e1).data == 0)


def test_bilinear_expansion():
    x = _g(2.0, 3.0) * _g(5.0, 0.0, 7.0)
    assert x.data.tolist() == [10.0, 15.0, 14.0, 21.0]


@given(st.lists(floats, min_size=12, max_size=12))
def test_product_is_associative(c):
    a, b, d = (_g(*c[i:i + 4]) for i in (0, 4, 8))
    np.testing.assert_allclose(((a * b) * d).data, (a * (b * d)).data, atol=1e-12)


@given(st.lists(floats, min_size=8, max_size=8))
def test_odd_parts_anticommute(c):
    a, b = _g(0.0, c[0], c[1]), _g(0.0, c[2], c[3])
    np.testing.assert_allclose((a * b).data, -(b * a).data, atol=1e-12)


def test_ein_keeps_operand_order():
    rng = np.random.default_rng(1)
    h1, h2 = rng.normal(size=(2, 3, 3))
    x = Alg.grassmann(np.zeros((3, 3)), h1, h2)
    y = Alg.grassmann(np.zeros((3, 3)), 2 * h1, -h2)
    xy = ein("ij,jk->ik", x, y).e12()
    yx = ein("jk,ij->ik", y, x).e12()
    np.testing.assert_allclose(xy, -yx, atol=1e-13)
    expected = h1 @ (-h2) - h2 @ (2 * h1)
    np.testing.assert_allclose(xy, expected, atol=1e-13)


def test_ein_broadcasts_point_axes():
    rng = np.random.default_rng(2)
    a = Alg.const(rng.normal(size=(5, 3, 3)))
    eta = np.diag([-1.0, 1.0, 1.0])
    out = ein("mn,mn->", eta, a)
    np.testing.assert_allclose(out.body, np.einsum("mn,pmn->p", eta, a.body))


def test_taylor_gradient_of_product():
    # d(x y) = x dy + y dx on first-order jets
    x = Alg.taylor(np.array(2.0), np.array([1.0, 0.0]))
    y = Alg.taylor(np.array(3.0), np.array([0.5, 4.0]))
    np.testing.assert_allclose((x * y).grad().body, [3.0 + 1.0, 8.0])


@pytest.mark.parametrize("fn, value, slope", [(al.sqrt, 4.0, 0.25), (al.log, 2.0, 0.5), (al.exp, 0.0, 1.0),
                                              (al.reciprocal, 2.0, -0.25)])
def test_lift_first_order(fn, value, slope):
    y = fn(_g(value, 1.0))
    assert y.part(1) == pytest.approx(slope)


def test_sqrt_example():
    y = al.sqrt(_g(4.0, 1.0))
    assert y.data.tolist() == pytest.approx([2.0, 0.25, 0.0, 0.0])


def test_log_of_pure_two_form():
    y = al.log(_g(1.0, 0.0, 0.0, 1.0))
    assert y.data.tolist() == pytest.approx([0.0, 0.0, 0.0, 1.0])


def test_exp_of_odd_sum_has_no_two_form():
    y = al.exp(_g(0.0, 1.0, 1.0))
    assert y.data.tolist() == pytest.approx([1.0, 1.0, 1.0, 0.0])


@given(st.floats(0.2, 5.0), floats, floats, floats)
@settings(max_examples=50)
def test_lift_second_order_matches_chain_rule(b, u, v, w):
    # f(b + e1 u + e2 v + e12 w): e12 coefficient = f'(b) w (u v cross terms cancel: e1 e2 + e2 e1 = 0 is not
    # the case for the square; (e1 u + e2 v)^2 = 0, so no f'' term)
    y = al.log(_g(b, u, v, w))
    assert y.e12() == pytest.approx(w / b, abs=1e-12)


def test_matrix_inverse_multiplies_back(rng):
    b = np.diag([-1.0, 1.0, 1.0, 1.0]) + 0.1 * rng.normal(size=(4, 4))
    m = Alg.grassmann(b, rng.normal(size=(4, 4)), rng.normal(size=(4, 4)), rng.normal(size=(4, 4)))
    prod = ein("ij,jk->ik", m, al.inv(m))
    np.testing.assert_allclose(prod.body, np.eye(4), atol=1e-13)
    for g in (1, 2, 3):
        np.testing.assert_allclose(prod.part(g), 0.0, atol=1e-12)


def test_det_jacobi_first_order(rng):
    N = rng.normal(size=(3, 3))
    d = al.det(Alg.grassmann(np.eye(3), N))
    assert d.body == pytest.approx(1.0)
    assert d.part(1) == pytest.approx(np.trace(N))


def test_det_taylor_matches_finite_difference(rng):
    b = np.eye(3) + 0.2 * rng.normal(size=(3, 3))
    db = rng.normal(size=(3, 3))
    d = al.det(Alg.taylor(b, db[..., None]))
    eps = 1e-6
    fd = (np.linalg.det(b + eps * db) - np.linalg.det(b - eps * db)) / (2 * eps)
    assert d.grad().body[0] == pytest.approx(fd, rel=1e-8)


def test_body_of_nonlinear_lifts_is_plain_function():
    x = np.array([0.5, 2.0, 3.0])
    np.testing.assert_allclose(al.sqrt(Alg.const(x)).body, np.sqrt(x))
    np.testing.assert_allclose(al.exp(Alg.const(x)).body, np.exp(x))


def test_domain_errors():
    with pytest.raises(ValueError):
        al.sqrt(_g(-1.0))
    with pytest.raises(ValueError):
        al.log(_g(0.0))
    with pytest.raises(ZeroDivisionError):
        al.reciprocal(_g(0.0, 1.0))
