"""Operator-valued generating functions of transfer matrices.

``H(x|u) = sum_k h_k(u) x^k`` and ``E(x|u) = sum_k (-1)^k e_k(u) x^k``, and
their multivariate determinants

    H(x_1..x_l|u) = det[x_i^{1-j} H(x_i|u-j+1)]
    E(x_1..x_l|u) = det[(-x_i)^{1-j} E(x_i|u+j-1)].

Each univariate series is truncated at degree ``D``.  Entry ``(i, j)`` then
knows the exponents of ``x_i`` up to ``D + 1 - j``, so a multivariate series
is kept only where every exponent is at most ``D + 1 - l``; inside that window
the coefficients are exact.  Shifts of the spectral parameter are integer
offsets on the family arguments.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import scalars
from .combinatorics import straighten
from .identities import cbr_entries, dual_entries, operator_det
from .report import ResidualReport, stopwatch
from .transfer import TransferFamily

Exponents = tuple[int, ...]


class BoxError(ValueError):
    """Requested coefficient lies outside the exact truncation window."""


@dataclass
class SeriesPoly:
    """Laurent polynomial in ``x_1..x_l`` with operator coefficients.

    Missing keys are zero.  ``top`` is the largest exponent of any variable
    for which coefficients are exact.
    """

    l: int
    D: int
    top: int
    coeffs: dict[Exponents, np.ndarray] = field(default_factory=dict)

    def coefficient(self, exps: Sequence[int], zero: np.ndarray) -> np.ndarray:
        exps = tuple(exps)
        if len(exps) != self.l:
            raise ValueError(f"expected {self.l} exponents, got {len(exps)}")
        if max(exps, default=-np.inf) > self.top:
            raise BoxError(f"exponents {exps} exceed the exact window (max {self.top})")
        return self.coeffs.get(exps, zero)

    def add_term(self, exps: Exponents, op: np.ndarray) -> None:
        if max(exps, default=-np.inf) > self.top:
            return
        prev = self.coeffs.get(exps)
        self.coeffs[exps] = op if prev is None else prev + op

    def window(self) -> list[Exponents]:
        return sorted(self.coeffs)


def _sign_of(perm: Sequence[int]) -> int:
    inversions = sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def _univariate(family: TransferFamily, kind: str, s: int, D: int) -> dict[int, np.ndarray]:
    """Nonzero coefficients ``k -> op`` of ``H(x|u0+s)`` or ``E(x|u0+s)`` up to ``x^D``."""
    out = {}
    for k in range(D + 1):
        if kind == "h":
            op = family.h(k, s)
        else:
            op = family.e(k, s)
            if op is not None and k % 2:
                op = -op
        if op is not None:
            out[k] = op
    return out


def h_series(family: TransferFamily, s: int, D: int) -> SeriesPoly:
    if D < 0:
        raise ValueError("D must be nonnegative")
    return SeriesPoly(1, D, D, {(k,): op for k, op in _univariate(family, "h", s, D).items()})


def e_series(family: TransferFamily, s: int, D: int) -> SeriesPoly:
    if D < 0:
        raise ValueError("D must be nonnegative")
    return SeriesPoly(1, D, D, {(k,): op for k, op in _univariate(family, "e", s, D).items()})


def _product_terms(factors: list[dict[int, np.ndarray]]) -> Iterable[tuple[Exponents, np.ndarray]]:
    """Expand a product of series in distinct variables into ``(exponents, operator)``."""
    for choice in itertools.product(*(sorted(f.items()) for f in factors)):
        exps = tuple(k for k, _ in choice)
        op = choice[0][1]
        for _, nxt in choice[1:]:
            op = op @ nxt
        yield exps, op


def _multivariate(family: TransferFamily, kind: str, l: int, D: int, offsets) -> SeriesPoly:
    if l < 1:
        raise ValueError("need at least one variable")
    offsets = tuple(offsets) if offsets is not None else (0,) * l
    if len(offsets) != l:
        raise ValueError("one offset per variable")
    step = -1 if kind == "h" else 1
    out = SeriesPoly(l, D, D + 1 - l)
    for perm in itertools.permutations(range(1, l + 1)):
        sign = _sign_of(perm)
        factors = []
        for i, j in enumerate(perm):
            series = _univariate(family, kind, offsets[i] + step * (j - 1), D)
            shift = 1 - j
            # (-x)^{1-j} on the E side
            flip = -1 if kind == "e" and shift % 2 else 1
            factors.append({k + shift: (op if flip > 0 else -op) for k, op in series.items()})
        for exps, op in _product_terms(factors):
            out.add_term(exps, op if sign > 0 else -op)
    return out


def h_multivariate(family: TransferFamily, l: int, D: int, offsets: Sequence[int] | None = None) -> SeriesPoly:
    """``det[x_i^{1-j} H(x_i|u_i-j+1)]`` with ``u_i = u0 + offsets[i]``."""
    return _multivariate(family, "h", l, D, offsets)


def e_multivariate(family: TransferFamily, l: int, D: int, offsets: Sequence[int] | None = None) -> SeriesPoly:
    """``det[(-x_i)^{1-j} E(x_i|u_i+j-1)]`` with ``u_i = u0 + offsets[i]``."""
    return _multivariate(family, "e", l, D, offsets)


def _shift_monomials(l: int, inverse: bool) -> dict[Exponents, int]:
    """Expand the ordered product of binomials in ``y_i = S_i^{±1}/x_i`` over pairs ``i < j``.

    Keys count the powers of each ``y_i``; values are integer coefficients.
    For ``H`` the factor is ``y_j - y_i``, for ``E`` it is ``y_i - y_j``.
    """
    poly: dict[Exponents, int] = {(0,) * l: 1}
    for i, j in itertools.combinations(range(l), 2):
        nxt: dict[Exponents, int] = {}
        for key, c in poly.items():
            for idx, sign in ((j, 1), (i, -1)):
                if inverse:
                    sign = -sign
                new = list(key)
                new[idx] += 1
                new = tuple(new)
                nxt[new] = nxt.get(new, 0) + sign * c
        poly = {k: v for k, v in nxt.items() if v}
    return poly


def shift_product(family: TransferFamily, kind: str, l: int, D: int) -> SeriesPoly:
    """Product form ``prod_{i<j}(S_j/x_j - S_i/x_i) prod_i H(x_i|u_i)`` (or its E analogue).

    ``S_i`` lowers ``u_i`` by one for ``H`` and raises it for ``E``;
    afterwards all ``u_i`` are set to ``u0``.
    """
    step = -1 if kind == "h" else 1
    out = SeriesPoly(l, D, D + 1 - l)
    for powers, c in sorted(_shift_monomials(l, inverse=(kind == "e")).items()):
        factors = []
        for c_i in powers:
            series = _univariate(family, kind, step * c_i, D)
            factors.append({k - c_i: op for k, op in series.items()})
        for exps, op in _product_terms(factors):
            out.add_term(exps, op * c)
    return out


def exponents_for(alpha: Sequence[int]) -> Exponents:
    """``x_1^{alpha_1} x_2^{alpha_2 - 1} ... x_l^{alpha_l - l + 1}``."""
    return tuple(a - i for i, a in enumerate(alpha))


def coefficient_vs_T(family: TransferFamily, alpha: Sequence[int], D: int = 5,
                     tolerance: float = 1e-8, series: tuple[SeriesPoly, SeriesPoly] | None = None) -> ResidualReport:
    """Extracted coefficients of ``H(x_1..x_l|u)`` and ``E(x_1..x_l|u)`` against the determinants.

    The ``H`` coefficient at ``exponents_for(alpha)`` is ``T_alpha(u)``; the
    ``E`` coefficient is ``(-1)^A`` times the e-determinant of ``alpha`` with
    ``A`` the exponent sum.  ``series`` may carry precomputed expansions.
    """
    alpha = tuple(alpha)
    l = len(alpha)
    exps = exponents_for(alpha)
    if max(exps) > D + 1 - l:
        raise BoxError(f"alpha={alpha} needs exponents {exps}; window allows at most {D + 1 - l}")
    with stopwatch() as clock:
        hs, es = series if series is not None else (h_multivariate(family, l, D), e_multivariate(family, l, D))
        zero = family.context.zero()
        got_h = hs.coefficient(exps, zero)
        got_e = es.coefficient(exps, zero)
        want_h, scale_h = operator_det(cbr_entries(family, alpha, 0), family)
        want_e, scale_e = operator_det(dual_entries(family, alpha, 0), family)
        if sum(exps) % 2:
            want_e = -want_e
        residuals = []
        # Predicted zeros are measured against the cancellation scale of the determinant.
        for got, want, scale in ((got_h, want_h, scale_h), (got_e, want_e, scale_e)):
            absolute = scalars.norm(got - want)
            denom = max(scalars.norm(got), scalars.norm(want), scale)
            residuals.append((absolute, absolute / denom if denom > 0 else absolute))
    absolute = max(r[0] for r in residuals)
    relative = max(r[1] for r in residuals)
    st = straighten(alpha)
    return ResidualReport(
        "genfun",
        {"alpha": list(alpha), "D": D},
        absolute,
        relative,
        tolerance,
        clock[0],
        {"predicted_zero": st.is_zero or len(st.partition) > family.context.N,
         "coefficient_norm_h": scalars.norm(got_h), "coefficient_norm_e": scalars.norm(got_e)},
    )


def series_mismatch(a: SeriesPoly, b: SeriesPoly, zero: np.ndarray) -> tuple[float, float]:
    """Largest coefficient difference over the common exact window, absolute and relative to the largest coefficient."""
    top = min(a.top, b.top)
    keys = {k for k in set(a.coeffs) | set(b.coeffs) if max(k, default=-1) <= top}
    worst = 0.0
    scale = 0.0
    for k in keys:
        x = a.coeffs.get(k, zero)
        y = b.coeffs.get(k, zero)
        worst = max(worst, scalars.norm(x - y))
        scale = max(scale, scalars.norm(x), scalars.norm(y))
    return worst, (worst / scale if scale > 0 else worst)


def shift_product_check(family: TransferFamily, kind: str = "h", l: int = 2, D: int = 5,
                        tolerance: float = 1e-10) -> ResidualReport:
    """Determinant form against the shift-operator product form."""
    with stopwatch() as clock:
        det_form = (h_multivariate if kind == "h" else e_multivariate)(family, l, D)
        prod_form = shift_product(family, kind, l, D)
        absolute, relative = series_mismatch(det_form, prod_form, family.context.zero())
    return ResidualReport(f"genfun-shift-{kind}", {"l": l, "D": D}, absolute, relative, tolerance, clock[0],
                          {"coefficients": len(det_form.coeffs)})
