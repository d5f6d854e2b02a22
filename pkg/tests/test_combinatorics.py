import pytest
from hypothesis import given, strategies as st

from qtransfer.combinatorics import (
    ChargedPartition,
    MayaDiagram,
    SignedPartition,
    as_partition,
    conjugate,
    from_maya,
    partitions,
    partitions_up_to,
    straighten,
    to_maya,
)

partition_st = st.lists(st.integers(1, 6), max_size=5).map(lambda xs: tuple(sorted(xs, reverse=True)))
vector_st = st.lists(st.integers(-4, 6), min_size=1, max_size=5).map(tuple)


@pytest.mark.parametrize("alpha, expected", [
    ((2, 1), SignedPartition(1, (2, 1))),
    ((1, 3), SignedPartition(-1, (2, 2))),
])
def test_straighten_examples(alpha, expected):
    assert straighten(alpha) == expected


def test_straighten_repeat_is_zero():
    assert straighten((1, 2)).is_zero


def test_straighten_negative_part_is_zero():
    assert straighten((-1, 0)).is_zero


def test_trailing_zeros_kept_while_straightening():
    assert straighten((0, 0, 0)) == SignedPartition(1, ())
    assert straighten((0, 1)).is_zero


@pytest.mark.parametrize("lam, expected", [((), ()), ((2, 1), (2, 1)), ((3, 1), (2, 1, 1))])
def test_conjugate_examples(lam, expected):
    assert conjugate(lam) == expected


@pytest.mark.parametrize("label, head", [
    (ChargedPartition(0, ()), (0, -1, -2)),
    (ChargedPartition(0, (2,)), (2, -1, -2)),
    (ChargedPartition(1, (1, 1)), (2, 1, -1, -2)),
])
def test_to_maya_examples(label, head):
    d = to_maya(label)
    assert d.entries(len(head)) == head


def test_partition_counts():
    assert [len(list(partitions(k))) for k in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]
    assert list(partitions(4, max_length=2)) == [(4,), (3, 1), (2, 2)]
    assert len(partitions_up_to(4)) == 12


def test_as_partition_rejects_bad_input():
    with pytest.raises(ValueError):
        as_partition((1, 2))
    with pytest.raises(ValueError):
        as_partition((2, -1))
    assert as_partition((3, 1, 0, 0)) == (3, 1)


def test_maya_requires_strict_decrease():
    with pytest.raises(ValueError):
        MayaDiagram((3, 3), 1)


@given(partition_st)
def test_straighten_idempotent_on_partitions(lam):
    assert straighten(lam) == SignedPartition(1, lam)


@given(vector_st, st.data())
def test_adjacent_swap_flips_sign(alpha, data):
    if len(alpha) < 2:
        return
    i = data.draw(st.integers(0, len(alpha) - 2))
    swapped = alpha[:i] + (alpha[i + 1] - 1, alpha[i] + 1) + alpha[i + 2:]
    a, b = straighten(alpha), straighten(swapped)
    if a.is_zero:
        assert b.is_zero
    else:
        assert b.partition == a.partition and b.sign == -a.sign


@given(vector_st)
def test_straighten_matches_rho_permutation(alpha):
    # alpha - rho must be a permutation of lambda - rho, with the computed sign
    res = straighten(alpha)
    if res.is_zero:
        return
    l = len(alpha)
    lam = res.partition + (0,) * (l - len(res.partition))
    assert sorted(a - i for i, a in enumerate(alpha)) == sorted(p - i for i, p in enumerate(lam))


@given(st.integers(-5, 5), st.lists(st.integers(1, 4), max_size=8).map(lambda xs: tuple(sorted(xs, reverse=True))))
def test_maya_round_trip(m, lam):
    if sum(lam) > 8:
        lam = lam[:2]
    label = ChargedPartition(m, lam)
    assert from_maya(to_maya(label)) == label


@given(partition_st)
def test_conjugate_involution(lam):
    assert conjugate(conjugate(lam)) == lam
    assert sum(conjugate(lam)) == sum(lam)
