import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qtransfer import symfun
from qtransfer.combinatorics import partitions_up_to
from qtransfer.repn import (
    RepresentationError,
    commutator_residual,
    hook_content_dimension,
    schur_rep,
    sym_rep,
    wedge_rep,
    young_rep,
)


def test_sym1_is_defining():
    rep = sym_rep(2, 1)
    expected = np.zeros((2, 2))
    expected[0, 1] = 1
    assert np.array_equal(rep.gen(1, 2), expected)


def test_sym2_diagonal_and_group():
    rep = sym_rep(2, 2)
    assert rep.dim == 3
    assert np.array_equal(np.diag(rep.gen(1, 1)), [2, 1, 0])
    g1, g2 = 1.5 + 0.2j, -0.7j
    assert np.allclose(rep.group(np.diag([g1, g2])), np.diag([g1**2, g1 * g2, g2**2]))


def test_wedge_examples():
    rep = wedge_rep(3, 0)
    assert rep.dim == 1 and not rep.gens.any()
    assert np.allclose(rep.group(np.eye(3)), [[1]])
    g = np.array([[1, 2], [3, 4.5]])
    assert np.isclose(wedge_rep(2, 2).group(g)[0, 0], np.linalg.det(g))
    rep = wedge_rep(3, 2)
    src = rep.basis_labels.index((2, 3))
    dst = rep.basis_labels.index((1, 3))
    assert rep.gen(1, 2)[dst, src] == 1


def test_young_examples():
    rep = young_rep(2, (1,))
    g = np.diag([1.3, -0.4 + 0.5j])
    assert rep.dim == 2
    assert np.isclose(np.trace(rep.group(g)), np.trace(g))
    rep = young_rep(2, (2, 1))
    g1, g2 = 2.0, 3.0
    assert rep.dim == 2
    assert np.isclose(np.trace(rep.group(np.diag([g1, g2]))), g1**2 * g2 + g1 * g2**2)
    rep = young_rep(3, (1, 1, 1))
    m = np.array([[1, 2, 0], [0.5, 1, 1], [2, 0, 1j]])
    assert rep.dim == 1 and np.isclose(rep.group(m)[0, 0], np.linalg.det(m))


def test_young_limits():
    with pytest.raises(RepresentationError):
        young_rep(2, (1, 1, 1))
    with pytest.raises(RepresentationError):
        young_rep(2, (3, 2))


def test_wedge_rejects_large_k():
    with pytest.raises(ValueError):
        wedge_rep(2, 3)


def _all_reps():
    for N in (1, 2, 3):
        for k in range(5):
            yield sym_rep(N, k)
        for k in range(N + 1):
            yield wedge_rep(N, k)
        for lam in partitions_up_to(4, N):
            if len(lam) >= 2 and not all(p == 1 for p in lam):
                yield young_rep(N, lam)


def test_commutation_relations():
    for rep in _all_reps():
        assert commutator_residual(rep) <= 1e-10, rep.name


def test_sym_wedge_generators_are_integers():
    for N in (2, 3):
        for k in range(4):
            assert sym_rep(N, k).gens.dtype.kind == "i"


def test_dimensions():
    for N in (1, 2, 3):
        for k in range(5):
            assert sym_rep(N, k).dim == comb(N + k - 1, k)
        for k in range(N + 1):
            assert wedge_rep(N, k).dim == comb(N, k)
        for lam in partitions_up_to(4, N):
            assert schur_rep(N, lam).dim == hook_content_dimension(N, lam)


@given(st.lists(st.complex_numbers(min_magnitude=0.5, max_magnitude=2, allow_nan=False, allow_infinity=False),
                min_size=3, max_size=3))
def test_character_matches_schur(eig):
    for lam in partitions_up_to(4, 3):
        rep = schur_rep(3, lam)
        got = np.trace(rep.group(np.diag(eig)))
        want = symfun.eval_at(symfun.schur_poly(lam, max(sum(lam), 1)), eig)
        assert abs(got - want) <= 1e-9 * max(1.0, abs(want))


def test_group_homomorphism():
    rng = np.random.default_rng(3)
    for rep in _all_reps():
        N = rep.N
        g = np.diag(rng.normal(size=N) + 1j * rng.normal(size=N))
        h = np.diag(rng.normal(size=N) + 1j * rng.normal(size=N))
        assert np.allclose(rep.group(np.eye(N)), np.eye(rep.dim), atol=1e-10)
        lhs, rhs = rep.group(g) @ rep.group(h), rep.group(g @ h)
        assert np.abs(lhs - rhs).max() <= 1e-10 * max(1.0, np.abs(rhs).max())


def test_nondiagonal_group_homomorphism_sym():
    rng = np.random.default_rng(4)
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h = rng.normal(size=(3, 3))
    for k in range(4):
        rep = sym_rep(3, k)
        assert np.allclose(rep.group(g) @ rep.group(h), rep.group(g @ h))
        rep = wedge_rep(3, min(k, 3))
        assert np.allclose(rep.group(g) @ rep.group(h), rep.group(g @ h))


def test_json_dump_shape():
    data = sym_rep(2, 1).to_json()
    assert data["dim"] == 2 and set(data["gens"]) == {f"{i},{j}" for i, j in itertools.product((1, 2), repeat=2)}
