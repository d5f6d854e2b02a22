from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qtransfer import scalars
from qtransfer.combinatorics import conjugate, partitions_up_to, straighten
from qtransfer.identities import (
    cbr_det,
    dual_det,
    fig1_pattern,
    newton_residual,
    newton_terms,
    operator_det,
    straightening_check,
    transfer_via_cbr,
    transfer_via_dual,
)
from qtransfer.transfer import ChainContext, TransferFamily, e_direct, h_op, transfer_for

from conftest import make_family, relres


def _exact_family(N, n):
    rng = np.random.default_rng(N * 10 + n)

    def point(lo, hi):
        return scalars.exact((Fraction(int(rng.integers(lo, hi)), int(rng.integers(1, 5))),
                              Fraction(int(rng.integers(lo, hi)), int(rng.integers(1, 5)))))

    a = tuple(point(-9, 10) for _ in range(n))
    eig = []
    while len(eig) < N:
        z = point(-4, 5)
        if z:
            eig.append(z)
    ctx = ChainContext.diagonal(N, a, eig, exact=True)
    return TransferFamily(ctx, scalars.exact((Fraction(1, 3), Fraction(1, 7))))


def test_one_by_one_determinants(fam_2_1):
    assert np.array_equal(cbr_det(fam_2_1, (1,)), h_op(fam_2_1, 1, 0))
    assert relres(dual_det(fam_2_1, (1,)), h_op(fam_2_1, 1, 0)) < 1e-13


def test_two_by_two_against_wedge(fam_3_2):
    f = fam_3_2
    manual = h_op(f, 1, 0) @ h_op(f, 1, -1) - h_op(f, 2, -1) @ h_op(f, 0, 0)
    assert relres(manual, e_direct(f, 2, 0)) < 1e-10
    assert relres(cbr_det(f, (1, 1)), e_direct(f, 2, 0)) < 1e-10


def test_cbr_matches_young_symmetrizer(fam_3_2):
    want = transfer_for((2, 1), fam_3_2.context, fam_3_2.u0)
    assert relres(cbr_det(fam_3_2, (2, 1)), want) <= 1e-8


@pytest.mark.parametrize("lam", [(2,), (2, 1), (3, 1), (2, 2)])
def test_dual_matches_cbr(fam_3_2, lam):
    assert relres(dual_det(fam_3_2, conjugate(lam)), cbr_det(fam_3_2, lam)) <= 1e-8


@pytest.mark.parametrize("N, n", [(2, 0), (2, 1), (2, 2), (3, 1), (3, 2)])
def test_determinants_against_direct_trace(N, n):
    for seed in range(2):
        f = make_family(N, n, seed=seed + 7 * N + n)
        for lam in partitions_up_to(4, N)[1:]:
            want = transfer_for(lam, f.context, f.u0)
            assert relres(transfer_via_cbr(f, lam), want) <= 1e-8, lam
            assert relres(transfer_via_dual(f, lam), want) <= 1e-8, lam


def test_too_many_rows_vanish_via_dual(fam_2_1):
    assert not transfer_via_dual(fam_2_1, (1, 1, 1)).any()


def test_empty_partition_is_identity(fam_2_1):
    assert np.array_equal(transfer_via_cbr(fam_2_1, ()), np.eye(2))
    assert np.array_equal(transfer_via_dual(fam_2_1, ()), np.eye(2))


def test_empty_vector_rejected(fam_2_1):
    with pytest.raises(ValueError):
        cbr_det(fam_2_1, ())


def test_newton_small_cases(fam_2_1):
    assert not newton_residual(fam_2_1, 0, 0).any()
    assert np.abs(newton_residual(fam_2_1, 0, 1)).max() <= 1e-13 * np.abs(h_op(fam_2_1, 1, 0)).max()


def test_newton_residual_grid(fam_3_2):
    for a in range(-3, 6):
        for b in range(a, 6):
            terms = newton_terms(fam_3_2, a, b)
            scale = max([1.0] + [np.linalg.norm(t) for t in terms])
            assert np.linalg.norm(newton_residual(fam_3_2, a, b)) <= 1e-8 * scale, (a, b)


def test_newton_empty_sum_when_a_exceeds_b(fam_3_2):
    for a, b in [(1, 0), (5, -3), (2, 1)]:
        assert newton_terms(fam_3_2, a, b) == []
        assert not newton_residual(fam_3_2, a, b).any()


def test_operator_det_scale_bounds_result(fam_3_2):
    det, scale = operator_det([[fam_3_2.h(1, 0), fam_3_2.h(2, -1)], [fam_3_2.h(0, 0), fam_3_2.h(1, -1)]], fam_3_2)
    assert np.linalg.norm(det) <= scale * (1 + 1e-12)


@given(st.lists(st.integers(-3, 4), min_size=1, max_size=3).map(tuple))
def test_straightening_rule(alpha):
    f = make_family(3, 1, seed=2)
    report = straightening_check(f, alpha)
    assert report.passed, report.line()


def test_exact_mode_zero_residuals():
    f = _exact_family(2, 2)
    for lam in partitions_up_to(3, 2)[1:]:
        diff = transfer_via_cbr(f, lam) - transfer_via_dual(f, lam)
        assert scalars.is_exactly_zero(diff), lam
        if len(lam) == 1 or set(lam) == {1}:
            # Young-symmetrizer reps are float-only; sym and wedge traces are exact
            diff = transfer_via_cbr(f, lam) - transfer_for(lam, f.context, f.u0)
            assert scalars.is_exactly_zero(diff), lam
    assert scalars.is_exactly_zero(cbr_det(f, (1, 2)))
    assert scalars.is_exactly_zero(newton_residual(f, -1, 2))


@pytest.mark.parametrize("point, expected", [((2, 1), True), ((1, 2), False), ((-1, 0), False), ((2, 2), True)])
def test_fig1_points(point, expected):
    grid = fig1_pattern(make_family(2, 1, seed=4), box=(-3, 5, -3, 5))
    assert grid.computed[point] is expected
    assert grid.predicted[point] is expected


def test_fig1_no_mismatches():
    for N in (2, 3):
        grid = fig1_pattern(make_family(N, 1, seed=N), box=(-3, 5, -3, 5))
        assert grid.mismatches == []
        rows = grid.to_json()["rows_top_down"]
        assert len(rows) == 9 and all(len(r) == 9 for r in rows)


def test_straighten_prediction_in_pattern():
    grid = fig1_pattern(make_family(2, 2, seed=1), box=(-2, 3, -2, 3))
    for key, value in grid.predicted.items():
        st_ = straighten(key)
        assert value == (not st_.is_zero and len(st_.partition) <= 2)
