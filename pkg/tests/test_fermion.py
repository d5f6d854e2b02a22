from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qtransfer.combinatorics import ChargedPartition, conjugate, partitions_up_to
from qtransfer.fermion import (
    BosonVector,
    ChargeError,
    anticommutator_residual,
    bilinear_check,
    bilinear_residual,
    cauchy_coefficients,
    find_bilinear_witness,
    iterated_vacuum,
    maya_action_crosscheck,
    psi_gen_apply,
    psi_minus,
    psi_plus,
    schur_tau,
    vacuum_string,
)

CP = ChargedPartition


def basis(m, lam=(), c=Fraction(1)):
    return BosonVector.basis(m, lam, c)


VAC = BosonVector.vacuum()
labels = st.builds(CP, st.integers(-2, 2), st.sampled_from(partitions_up_to(5)))


@pytest.mark.parametrize("k, src, want", [
    (1, basis(0), basis(1)),
    (3, basis(0, (1,)), basis(1, (2, 1))),
    (0, basis(0, (2,)), -basis(1, (1,))),
])
def test_psi_plus_examples(k, src, want):
    assert psi_plus(k, src) == want


@pytest.mark.parametrize("k, src, want", [
    (0, basis(0), basis(-1)),
    (2, basis(0, (2,)), basis(-1)),
    (-1, basis(0, (1,)), -basis(-1, (2,))),
])
def test_psi_minus_examples(k, src, want):
    assert psi_minus(k, src) == want


def test_trivial_anticommutators():
    assert not anticommutator_residual(0, 0, "+-", VAC)
    v = basis(0, (2, 1)) + basis(1, (1,)) * Fraction(3, 2)
    for k in range(-3, 4):
        assert not anticommutator_residual(k, k, "++", v)
        assert not anticommutator_residual(k, k, "--", v)


@given(labels, st.integers(-4, 4), st.integers(-4, 4), st.sampled_from(["+-", "++", "--"]))
def test_clifford_relations(label, k, l, kind):
    v = BosonVector({label: Fraction(1)})
    assert not anticommutator_residual(k, l, kind, v)


def test_clifford_on_random_combination():
    rng = np.random.default_rng(0)
    window = [CP(m, lam) for m in range(-2, 3) for lam in partitions_up_to(5)]
    picks = rng.choice(len(window), size=12, replace=False)
    v = BosonVector({window[i]: Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for i in picks})
    for k in range(-4, 5):
        for l in range(-4, 5):
            for kind in ("+-", "++", "--"):
                assert not anticommutator_residual(k, l, kind, v)


def test_maya_examples():
    assert maya_action_crosscheck(1, VAC).absolute_residual == 0
    assert maya_action_crosscheck(0, basis(0, (2,))).absolute_residual == 0


@given(labels.filter(lambda c: sum(c.partition) <= 4), st.integers(-5, 5))
def test_maya_route_agrees(label, k):
    assert maya_action_crosscheck(k, BosonVector({label: Fraction(1)})).absolute_residual == 0


@given(labels, st.integers(-6, 6))
def test_charge_grading(label, k):
    v = BosonVector({label: Fraction(1)})
    for image, shift in ((psi_plus(k, v), 1), (psi_minus(k, v), -1)):
        assert image.charges() <= {label.charge + shift}


def test_gen_vacuum_single_variable():
    plus = psi_gen_apply(1, 0, VAC, range(-3, 7))
    for k in range(1, 7):
        assert plus[k] == basis(1, (k - 1,) if k > 1 else ())
    assert all(k >= 1 for k in plus)
    minus = psi_gen_apply(-1, 0, VAC, range(-5, 3))
    for k in range(-5, 1):
        img = minus[-k]
        (label,) = img
        assert label == CP(-1, (1,) * (-k)) and abs(img[label]) == 1


def test_gen_apply_rejects_wrong_charge():
    with pytest.raises(ChargeError):
        psi_gen_apply(1, 0, basis(1), range(3))


def test_iterated_vacuum_plus():
    series = iterated_vacuum(1, 2, range(0, 7))
    for lam in [(0, 0), (1, 0), (2, 1), (3, 3)]:
        key = (lam[0] + 2, lam[1] + 1)
        assert series[key] == basis(2, tuple(p for p in lam if p))


@pytest.mark.parametrize("lam", [(), (1,), (2, 1), (3, 1, 1), (2, 2)])
def test_vacuum_strings(lam):
    l = len(lam)
    assert vacuum_string(lam, 1) == basis(l, lam)
    sign = -1 if sum(lam) % 2 else 1
    assert vacuum_string(lam, -1) == basis(-l, conjugate(lam)) * sign


def test_bilinear_trivial_cases():
    assert bilinear_residual(VAC, 4) == {}
    for lam in partitions_up_to(4):
        assert bilinear_residual(schur_tau({lam: 1}), 4) == {}, lam


def test_bilinear_cauchy_and_perturbation():
    Delta = 3
    coeffs = cauchy_coefficients((0.7, -0.3), 2 * Delta + 1)
    assert bilinear_check(schur_tau(coeffs), Delta, 1e-9).passed
    coeffs[(2,)] += 0.1
    residual = bilinear_residual(schur_tau(coeffs), Delta)
    assert max(abs(complex(c)) for c in residual.values()) > 1e-3
    assert not bilinear_check(schur_tau(coeffs), Delta, 1e-9).passed


def test_bilinear_witness():
    found = find_bilinear_witness(np.random.default_rng(0))
    assert found is not None
    coeffs, (mu, nu), value = found
    assert value != 0
    assert bilinear_residual(schur_tau(coeffs), 6)[(mu, nu)] == value


def test_mixed_charge_tau_rejected():
    with pytest.raises(ChargeError):
        bilinear_residual(basis(0) + basis(1), 2)


def test_literal_minus_string_order_fails():
    # indices -lam_l-l+1 ... -lam_1 read left to right do not produce the conjugate shape
    lam = (2, 1)
    l = len(lam)
    literal = [(-1, -lam[l - 1 - i] - (l - 1 - i)) for i in range(l)]
    from qtransfer.fermion import apply_string
    assert not apply_string(literal, VAC)
    assert vacuum_string(lam, -1) == -basis(-2, (2, 1))
