import numpy as np
import pytest
from hypothesis import given, strategies as st

from qtransfer import symfun
from qtransfer.combinatorics import partitions_up_to
from qtransfer.repn import sym_rep, young_rep
from qtransfer.transfer import (
    ChainContext,
    PoleError,
    TransferFamily,
    e_direct,
    h_op,
    transfer_direct,
    transfer_for,
)

from conftest import make_family, relres


def _unit(N, i, j):
    m = np.zeros((N, N), dtype=complex)
    m[i, j] = 1
    return m


def test_character_at_zero_sites():
    ctx = ChainContext.diagonal(2, (), [1.5, -0.5j])
    got = transfer_direct(young_rep(2, (1,)), ctx, 0.3)
    assert got.shape == (1, 1)
    assert np.isclose(got[0, 0], 1.5 - 0.5j)


def test_trivial_aux_space_gives_identity():
    ctx = ChainContext.diagonal(3, (0.4, 1 + 1j), [1, 2, 3])
    assert np.allclose(transfer_direct(sym_rep(3, 0), ctx, 2.0), np.eye(9))


def test_four_by_four_brute_force():
    g1, g2, a1, u = 1.3 + 0.1j, -0.6 + 0.4j, 0.7 - 0.2j, 2.1 + 1.5j
    g = np.diag([g1, g2])
    # R_01 = Id + (u-a)^{-1} sum_ij E_ji (aux) ⊗ E_ij (site)
    R = np.eye(4, dtype=complex)
    for i in range(2):
        for j in range(2):
            R += np.kron(_unit(2, j, i), _unit(2, i, j)) / (u - a1)
    M = (R @ np.kron(g, np.eye(2))).reshape(2, 2, 2, 2)
    oracle = np.einsum("axay->xy", M)
    ctx = ChainContext.diagonal(2, (a1,), [g1, g2])
    got = transfer_direct(young_rep(2, (1,)), ctx, u)
    assert np.allclose(got, oracle, atol=1e-13)


def test_non_diagonal_twist_brute_force():
    rng = np.random.default_rng(5)
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    a1, u = 0.2, 1.7j
    R = np.eye(4, dtype=complex)
    for i in range(2):
        for j in range(2):
            R += np.kron(_unit(2, j, i), _unit(2, i, j)) / (u - a1)
    oracle = np.einsum("axay->xy", (R @ np.kron(g, np.eye(2))).reshape(2, 2, 2, 2))
    ctx = ChainContext(2, (a1,), g)
    assert np.allclose(transfer_for((1,), ctx, u), oracle)


def test_h_conventions(fam_2_1):
    assert not h_op(fam_2_1, -2, 0).any()
    assert np.array_equal(h_op(fam_2_1, 0, 3), np.eye(2))


def test_e_conventions(fam_3_2):
    N = fam_3_2.context.N
    assert np.array_equal(e_direct(fam_3_2, 0, 0), np.eye(9))
    assert not e_direct(fam_3_2, N + 1, 0).any()
    assert np.allclose(e_direct(fam_3_2, 1, 0), h_op(fam_3_2, 1, 0), atol=1e-13)


def test_large_u_limit():
    ctx = ChainContext.diagonal(2, (0.5 + 0.5j,), [1.2, -0.7j])
    fam = TransferFamily(ctx, 1e7)
    assert np.allclose(h_op(fam, 1, 0), (1.2 - 0.7j) * np.eye(2), atol=1e-6)


def test_pole_is_rejected():
    ctx = ChainContext.diagonal(2, (1.0,), [1, 2])
    with pytest.raises(PoleError):
        transfer_for((1,), ctx, 1.0 + 1e-12)


def test_transfer_for_too_many_rows_is_zero():
    ctx = ChainContext.diagonal(2, (1.0,), [1, 2])
    assert not transfer_for((1, 1, 1), ctx, 3.0).any()


def test_singular_twist_rejected():
    with pytest.raises(ValueError):
        ChainContext(2, (), np.zeros((2, 2)))


@given(st.integers(0, 1000))
def test_transfer_matrices_commute(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(2, 4))
    fam = make_family(N, 2, seed=seed)
    labels = partitions_up_to(3, N)[1:]
    lam = labels[rng.integers(len(labels))]
    mu = labels[rng.integers(len(labels))]
    ctx = fam.context
    u, v = fam.u0, fam.u0 + complex(rng.normal(), rng.normal())
    A, B = transfer_for(lam, ctx, u), transfer_for(mu, ctx, v)
    scale = np.linalg.norm(A) * np.linalg.norm(B)
    assert np.linalg.norm(A @ B - B @ A) <= 1e-10 * scale


def test_character_matches_schur_for_empty_chain():
    eig = [0.9 + 0.2j, -1.1, 0.4j]
    ctx = ChainContext.diagonal(3, (), eig)
    for lam in partitions_up_to(4, 3):
        want = symfun.eval_at(symfun.schur_poly(lam, max(sum(lam), 1)), eig)
        assert abs(transfer_for(lam, ctx, 1.0)[0, 0] - want) <= 1e-10 * max(1, abs(want))


def test_limit_decay_rate():
    eig = [1.3, 0.6 + 0.5j]
    ctx = ChainContext.diagonal(2, (0.3, -0.8j), eig)
    lam = (2, 1)
    want = symfun.eval_at(symfun.schur_poly(lam, 3), eig) * np.eye(4)
    r1 = np.linalg.norm(transfer_for(lam, ctx, 20.0 + 5j) - want)
    r2 = np.linalg.norm(transfer_for(lam, ctx, 200.0 + 50j) - want)
    assert 5 <= r1 / r2 <= 20


def test_family_caches_are_reused(fam_2_1):
    first = fam_2_1.h(2, -1)
    assert fam_2_1.h(2, -1) is first
    assert relres(first, transfer_for((2,), fam_2_1.context, fam_2_1.u0 - 1)) < 1e-14
