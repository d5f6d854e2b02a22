"""Determinant identities between transfer operators.

All determinants are expanded over permutations with operator products taken
in row order.  The entries commute (a property checked separately), so the
order only affects roundoff.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import scalars
from .combinatorics import conjugate, pad, straighten
from .report import ResidualReport, stopwatch
from .transfer import TransferFamily

DEFAULT_TOLERANCE = 1e-8


def operator_det(entries, family: TransferFamily) -> tuple[np.ndarray, float]:
    """Determinant of a square grid of operators (``None`` = zero operator).

    Returns the determinant and the cancellation scale: the sum over
    permutations of the products of entry norms.
    """
    size = len(entries)
    ctx = family.context
    if size == 0:
        return ctx.identity(), 1.0
    norms = [[0.0 if x is None else scalars.norm(x) for x in row] for row in entries]
    total = None
    scale = 0.0

    def rec(row, used, sign, acc, acc_norm):
        nonlocal total, scale
        if row == size:
            term = acc if sign > 0 else -acc
            total = term if total is None else total + term
            scale += acc_norm
            return
        for col in range(size):
            if col in used or entries[row][col] is None:
                continue
            flips = sum(1 for c in used if c > col)
            nxt = entries[row][col] if acc is None else acc @ entries[row][col]
            rec(row + 1, used | {col}, sign * (-1) ** flips, nxt, acc_norm * norms[row][col])

    rec(0, frozenset(), 1, None, 1.0)
    if total is None:
        return ctx.zero(), 0.0
    return total, scale


def cbr_entries(family: TransferFamily, alpha, s: int):
    l = len(alpha)
    return [[family.h(alpha[i - 1] - i + j, s - j + 1) for j in range(1, l + 1)] for i in range(1, l + 1)]


def dual_entries(family: TransferFamily, alpha, s: int):
    l = len(alpha)
    return [[family.e(alpha[i - 1] - i + j, s + j - 1) for j in range(1, l + 1)] for i in range(1, l + 1)]


def cbr_det(family: TransferFamily, alpha, s: int = 0) -> np.ndarray:
    """``det[h_{alpha_i - i + j}(u - j + 1)]`` at ``u = u0 + s``."""
    if len(alpha) < 1:
        raise ValueError("integer vector must have at least one entry")
    return operator_det(cbr_entries(family, alpha, s), family)[0]


def dual_det(family: TransferFamily, alpha, s: int = 0) -> np.ndarray:
    """``det[e_{alpha_i - i + j}(u + j - 1)]`` at ``u = u0 + s``; equals ``T_lambda`` for ``alpha = lambda'``."""
    if len(alpha) < 1:
        raise ValueError("integer vector must have at least one entry")
    return operator_det(dual_entries(family, alpha, s), family)[0]


def transfer_via_cbr(family: TransferFamily, lam, s: int = 0) -> np.ndarray:
    """``T_lambda`` for a partition, the empty partition giving the identity."""
    return cbr_det(family, lam, s) if lam else family.context.identity()


def transfer_via_dual(family: TransferFamily, lam, s: int = 0) -> np.ndarray:
    """``T_lambda`` from the e-determinant of the conjugate; vanishes when ``l(lambda) > N``."""
    lamc = conjugate(lam)
    return dual_det(family, lamc, s) if lamc else family.context.identity()


def newton_terms(family: TransferFamily, a: int, b: int, s: int = 0):
    """Nonzero terms ``(-1)^{a-p} h_{b+p}(u-p) e_{-p-a}(u-p-1)``, ``-b <= p <= -a``."""
    terms = []
    for p in range(-b, -a + 1):
        h = family.h(b + p, s - p)
        e = family.e(-p - a, s - p - 1)
        if h is None or e is None:
            continue
        term = h @ e
        terms.append(term if (a - p) % 2 == 0 else -term)
    return terms


def newton_residual(family: TransferFamily, a: int, b: int, s: int = 0) -> np.ndarray:
    """``sum_p (-1)^{a-p} h_{b+p}(u-p) e_{-p-a}(u-p-1) - delta_ab Id``."""
    ctx = family.context
    out = ctx.zero()
    for term in newton_terms(family, a, b, s):
        out = out + term
    if a == b:
        out = out - ctx.identity()
    return out


def compare_operators(name, params, lhs, rhs, scale, tolerance, elapsed=0.0) -> ResidualReport:
    """Residual of ``lhs - rhs`` relative to the larger side or the cancellation scale."""
    absolute = scalars.norm(np.asarray(lhs) - np.asarray(rhs))
    denom = max(scalars.norm(lhs), scalars.norm(rhs), scale)
    relative = absolute / denom if denom > 0 else absolute
    return ResidualReport(name, params, absolute, relative, tolerance, elapsed)


def straightening_check(family: TransferFamily, alpha, s: int = 0,
                        tolerance: float = DEFAULT_TOLERANCE) -> ResidualReport:
    """``T_alpha = sign * T_lambda`` (or zero) for both determinant forms."""
    alpha = tuple(alpha)
    with stopwatch() as clock:
        st = straighten(alpha)
        lhs_h, scale_h = operator_det(cbr_entries(family, alpha, s), family)
        lhs_e, scale_e = operator_det(dual_entries(family, alpha, s), family)
        if st.is_zero:
            rhs_h = rhs_e = family.context.zero()
            ref_h = ref_e = 0.0
        else:
            lam = pad(st.partition, len(alpha))
            rhs_h, ref_h = operator_det(cbr_entries(family, lam, s), family)
            rhs_e, ref_e = operator_det(dual_entries(family, lam, s), family)
            rhs_h, rhs_e = st.sign * rhs_h, st.sign * rhs_e
        rep_h = compare_operators("straighten-h", {}, lhs_h, rhs_h, max(scale_h, ref_h), tolerance)
        rep_e = compare_operators("straighten-e", {}, lhs_e, rhs_e, max(scale_e, ref_e), tolerance)
    worst = max((rep_h, rep_e), key=lambda r: r.relative_residual)
    prediction = "0" if st.is_zero else f"{st.sign:+d}*T{st.partition}"
    return ResidualReport(
        "straighten",
        {"alpha": list(alpha), "prediction": prediction},
        worst.absolute_residual,
        worst.relative_residual,
        tolerance,
        clock[0],
    )


@dataclass
class PatternGrid:
    """Nonzero pattern of ``T_(a1, a2)`` over a box, alongside the straightening prediction."""

    a1_range: tuple[int, int]
    a2_range: tuple[int, int]
    computed: dict[tuple[int, int], bool]
    predicted: dict[tuple[int, int], bool]
    norms: dict[tuple[int, int], float]
    threshold: float

    @property
    def mismatches(self) -> list[tuple[int, int]]:
        return sorted(k for k in self.computed if self.computed[k] != self.predicted[k])

    def to_json(self) -> dict:
        a1lo, a1hi = self.a1_range
        a2lo, a2hi = self.a2_range
        rows = []
        for a2 in range(a2hi, a2lo - 1, -1):
            rows.append("".join("#" if self.computed[(a1, a2)] else "." for a1 in range(a1lo, a1hi + 1)))
        return {
            "alpha1": [a1lo, a1hi],
            "alpha2": [a2lo, a2hi],
            "rows_top_down": rows,
            "mismatches": [list(m) for m in self.mismatches],
        }


def predicted_nonzero(alpha, N: int) -> bool:
    st = straighten(alpha)
    return not st.is_zero and len(st.partition) <= N


def fig1_pattern(family: TransferFamily, box=(-3, 5, -3, 5), s: int = 0,
                 relative_threshold: float = 1e-6) -> PatternGrid:
    """Which ``T_(a1, a2)(u)`` vanish on the box ``a1min, a1max, a2min, a2max``.

    The zero threshold is ``relative_threshold`` times the median of the
    norms that are clearly nonzero (above ``1e-12`` of the largest).
    """
    N = family.context.N
    if N < 2:
        raise ValueError("the two-row pattern needs N >= 2")
    a1lo, a1hi, a2lo, a2hi = box
    norms = {}
    for a1, a2 in itertools.product(range(a1lo, a1hi + 1), range(a2lo, a2hi + 1)):
        norms[(a1, a2)] = scalars.norm(cbr_det(family, (a1, a2), s))
    top = max(norms.values(), default=0.0)
    sizable = [v for v in norms.values() if v > 1e-12 * top]
    threshold = relative_threshold * float(np.median(sizable)) if sizable else 0.0
    computed = {k: v > threshold for k, v in norms.items()}
    predicted = {k: predicted_nonzero(k, N) for k in norms}
    return PatternGrid((a1lo, a1hi), (a2lo, a2hi), computed, predicted, norms, threshold)
