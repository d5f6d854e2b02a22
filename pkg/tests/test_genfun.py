import itertools

import numpy as np
import pytest

from qtransfer.genfun import (
    BoxError,
    coefficient_vs_T,
    e_multivariate,
    e_series,
    exponents_for,
    h_multivariate,
    h_series,
    shift_product_check,
)
from qtransfer.identities import cbr_det, dual_det
from qtransfer.transfer import e_direct, h_op

from conftest import make_family, relres


@pytest.fixture(scope="module")
def fam():
    return make_family(2, 2, seed=21)


def test_univariate_coefficients(fam):
    H = h_series(fam, 0, 4)
    zero = fam.context.zero()
    assert np.array_equal(H.coefficient((0,), zero), np.eye(4))
    assert np.array_equal(H.coefficient((1,), zero), h_op(fam, 1, 0))
    E = e_series(fam, 0, 4)
    for k in range(5):
        want = (-1) ** k * e_direct(fam, k, 0)
        assert np.array_equal(E.coefficient((k,), zero), want)
    assert not E.coefficient((3,), zero).any()


def test_negative_degree_rejected(fam):
    with pytest.raises(ValueError):
        h_series(fam, 0, -1)


def test_one_variable_multivariate_is_series(fam):
    a, b = h_multivariate(fam, 1, 4), h_series(fam, 0, 4)
    assert a.coeffs.keys() == b.coeffs.keys()
    assert all(np.allclose(a.coeffs[k], b.coeffs[k]) for k in a.coeffs)


def test_two_variable_examples(fam):
    zero = fam.context.zero()
    H = h_multivariate(fam, 2, 5)
    assert relres(H.coefficient((1, 0), zero), cbr_det(fam, (1, 1))) < 1e-12
    T01 = H.coefficient((0, 0), zero)
    assert np.linalg.norm(T01) <= 1e-12 * np.linalg.norm(h_op(fam, 1, 0))
    E = e_multivariate(fam, 2, 5)
    assert relres(E.coefficient((1, 0), zero), -dual_det(fam, (1, 1))) < 1e-12


def test_truncation_contract(fam):
    E = e_multivariate(fam, 2, 4)
    with pytest.raises(BoxError):
        E.coefficient((5, 0), fam.context.zero())
    assert all(max(k) <= E.top for k in E.coeffs)
    with pytest.raises(BoxError):
        coefficient_vs_T(fam, (7, 0), D=5)


@pytest.mark.parametrize("alpha", [(2, 1), (1, 2), (3,), (0, 0), (-1, 3), (4, -2)])
def test_coefficient_vs_T(fam, alpha):
    report = coefficient_vs_T(fam, alpha, D=5)
    assert report.passed, report.line()


def test_predicted_zero_flag(fam):
    assert coefficient_vs_T(fam, (1, 2)).details["predicted_zero"]
    assert not coefficient_vs_T(fam, (2, 1)).details["predicted_zero"]


def test_exponent_rule():
    assert exponents_for((2, 1)) == (2, 0)
    assert exponents_for((3, 3, 3)) == (3, 2, 1)


def test_antisymmetry_of_two_variable_coefficients(fam):
    zero = fam.context.zero()
    for series in (h_multivariate(fam, 2, 5), e_multivariate(fam, 2, 5)):
        for e1, e2 in itertools.product(range(-3, series.top + 1), repeat=2):
            a = series.coefficient((e1, e2), zero)
            b = series.coefficient((e2, e1), zero)
            assert np.linalg.norm(a + b) <= 1e-10 * max(1.0, np.linalg.norm(a))


@pytest.mark.parametrize("kind", ["h", "e"])
@pytest.mark.parametrize("l", [2, 3])
def test_shift_product_form(kind, l):
    f = make_family(3, 1, seed=l)
    report = shift_product_check(f, kind, l, D=5)
    assert report.passed, report.line()
