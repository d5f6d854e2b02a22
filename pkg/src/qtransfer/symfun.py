"""Symmetric functions as polynomials in normalized power sums.

Throughout, ``p_k`` denotes the *normalized* power sum, i.e. the classical
power sum divided by ``k``, so that ``H(x) = exp(sum_k p_k x^k)``.  With this
normalization the adjoint of multiplication by ``f = phi(p_1, 2 p_2, 3 p_3, ...)``
is ``phi(d/dp_1, d/dp_2, ...)``.

Coefficients are exact ``Fraction`` objects.  Every ``PPoly`` carries a hard
degree cap and arithmetic that would exceed it raises instead of truncating.
"""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import Iterable, Mapping, Sequence

from . import fermion
from .combinatorics import ChargedPartition, as_partition, partitions, partitions_up_to, straighten
from .report import ResidualReport, stopwatch

DEFAULT_DEGREE = 6
NUMERIC_TOLERANCE = 1e-9

Monomial = tuple[int, ...]  # generator indices, weakly decreasing: p_2 p_1^2 -> (2, 1, 1)


class DegreeOverflow(ValueError):
    pass


class PPoly:
    """Polynomial in ``p_1, p_2, ...`` with degree ``deg p_k = k``, capped at ``D``."""

    __slots__ = ("terms", "D")

    def __init__(self, terms: Mapping[Monomial, object] | None = None, D: int = DEFAULT_DEGREE):
        self.D = D
        self.terms: dict[Monomial, object] = {}
        for mono, c in (terms or {}).items():
            if c:
                mono = tuple(sorted(mono, reverse=True))
                if sum(mono) > D:
                    raise DegreeOverflow(f"term of degree {sum(mono)} exceeds cap {D}")
                self.terms[mono] = self.terms.get(mono, 0) + c
        self.terms = {m: c for m, c in self.terms.items() if c}

    @classmethod
    def constant(cls, c, D: int = DEFAULT_DEGREE) -> "PPoly":
        return cls({(): c}, D)

    @classmethod
    def p(cls, k: int, D: int = DEFAULT_DEGREE) -> "PPoly":
        return cls({(k,): Fraction(1)}, D)

    def _cap(self, other: "PPoly") -> int:
        return max(self.D, other.D)

    def __add__(self, other):
        if not isinstance(other, PPoly):
            other = PPoly.constant(other, self.D)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return PPoly(out, self._cap(other))

    __radd__ = __add__

    def __neg__(self):
        return PPoly({m: -c for m, c in self.terms.items()}, self.D)

    def __sub__(self, other):
        return self + (-other if isinstance(other, PPoly) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PPoly):
            return PPoly({m: c * other for m, c in self.terms.items()}, self.D)
        cap = self._cap(other)
        out: dict[Monomial, object] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                if sum(m1) + sum(m2) > cap:
                    raise DegreeOverflow(f"product degree {sum(m1) + sum(m2)} exceeds cap {cap}")
                m = tuple(sorted(m1 + m2, reverse=True))
                out[m] = out.get(m, 0) + c1 * c2
        return PPoly(out, cap)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PPoly):
            other = PPoly.constant(other, self.D)
        return not (self - other).terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join(f"p{j}^{e}" if e > 1 else f"p{j}" for j, e in sorted(Counter(m).items(), reverse=True))
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def with_cap(self, D: int) -> "PPoly":
        return PPoly(self.terms, D)

    def constant_term(self):
        return self.terms.get((), 0)

    def degrees(self) -> set[int]:
        return {sum(m) for m in self.terms}

    def derivative(self, j: int, times: int = 1) -> "PPoly":
        """``(d/dp_j)^times``."""
        out: dict[Monomial, object] = {}
        for m, c in self.terms.items():
            count = m.count(j)
            if count < times:
                continue
            falling = factorial(count) // factorial(count - times)
            rest = list(m)
            for _ in range(times):
                rest.remove(j)
            key = tuple(rest)
            out[key] = out.get(key, 0) + c * falling
        return PPoly(out, self.D)

    def max_abs_coefficient(self) -> float:
        return max((abs(complex(c)) for c in self.terms.values()), default=0.0)


def _power_sum_monomial_coeff(mu: Sequence[int], sign: int) -> Fraction:
    mult = Counter(mu)
    return Fraction(sign ** len(mu), prod(factorial(e) for e in mult.values()))


@lru_cache(maxsize=None)
def h_poly(k: int, D: int = DEFAULT_DEGREE) -> PPoly:
    """Coefficient of ``x^k`` in ``exp(sum p_j x^j)``."""
    return _exp_coefficient(k, D, 1)


@lru_cache(maxsize=None)
def e_poly(k: int, D: int = DEFAULT_DEGREE) -> PPoly:
    """Coefficient of ``x^k`` in ``exp(-sum p_j x^j)``; equals ``(-1)^k`` times the elementary function."""
    return _exp_coefficient(k, D, -1)


def elementary(k: int, D: int = DEFAULT_DEGREE) -> PPoly:
    """The elementary symmetric function ``e_k = s_(1^k)``."""
    return e_poly(k, D) * ((-1) ** k) if k >= 0 else PPoly({}, D)


def _exp_coefficient(k: int, D: int, sign: int) -> PPoly:
    if k < 0:
        return PPoly({}, D)
    if k > D:
        raise DegreeOverflow(f"degree {k} exceeds cap {D}")
    return PPoly({mu: _power_sum_monomial_coeff(mu, sign) for mu in partitions(k)}, D)


@lru_cache(maxsize=None)
def schur_poly(lam: tuple[int, ...], D: int = DEFAULT_DEGREE) -> PPoly:
    """Jacobi-Trudi determinant ``det[h_{lambda_i - i + j}]``."""
    lam = as_partition(lam)
    if sum(lam) > D:
        raise DegreeOverflow(f"|{lam}| exceeds cap {D}")
    l = len(lam)
    if l == 0:
        return PPoly.constant(Fraction(1), D)

    def entry(i, j):
        return h_poly(lam[i] - i + j, D) if lam[i] - i + j <= D else PPoly({}, D)

    @lru_cache(maxsize=None)
    def minor(row: int, cols: frozenset) -> PPoly:
        # Laplace expansion along ``row`` over the remaining columns.
        if row == l:
            return PPoly.constant(Fraction(1), D)
        total = PPoly({}, D)
        for pos, col in enumerate(sorted(cols)):
            h = entry(row, col)
            if not h:
                continue
            term = h * minor(row + 1, cols - {col})
            total = total + (term if pos % 2 == 0 else -term)
        return total

    return minor(0, frozenset(range(l)))


def eval_at(f: PPoly, y: Sequence[complex]) -> complex:
    """Specialize ``p_k = (sum_i y_i^k) / k``."""
    y = [complex(v) for v in y]
    cache: dict[int, complex] = {}

    def pk(k):
        if k not in cache:
            cache[k] = sum(v**k for v in y) / k
        return cache[k]

    total = 0j
    for m, c in f.terms.items():
        total += complex(c) * prod((pk(j) for j in m), start=1 + 0j)
    return total


def adjoint_apply(f: PPoly, g: PPoly) -> PPoly:
    """``D_f g`` where ``D_f`` is adjoint to multiplication by ``f``."""
    out = PPoly({}, max(f.D, g.D))
    for m, c in f.terms.items():
        term = g
        weight = Fraction(1)
        for j, e in Counter(m).items():
            term = term.derivative(j, e)
            weight /= j**e
        out = out + term * (c * weight)
    return out


def scalar_product(f: PPoly, g: PPoly):
    """``<f, g>`` in the Schur-orthonormal scalar product."""
    return adjoint_apply(f, g).constant_term()


# ---------------------------------------------------------------- series

def series_product(a: Mapping[int, PPoly], b: Mapping[int, PPoly], max_power: int) -> dict[int, PPoly]:
    out: dict[int, PPoly] = {}
    for i, fa in a.items():
        for j, fb in b.items():
            if i + j > max_power:
                continue
            out[i + j] = out.get(i + j, PPoly({}, max(fa.D, fb.D))) + fa * fb
    return {k: v for k, v in out.items() if v}


def H_series(D: int) -> dict[int, PPoly]:
    return {k: h_poly(k, D) for k in range(D + 1)}


def E_series(D: int) -> dict[int, PPoly]:
    return {k: e_poly(k, D) for k in range(D + 1)}


def HE_residual(D: int) -> dict[int, PPoly]:
    """Coefficients of ``H(x) E(x) - 1`` up to ``x^D`` (all should vanish)."""
    prod_ = series_product(H_series(D), E_series(D), D)
    prod_[0] = prod_.get(0, PPoly({}, D)) - 1
    return {k: v for k, v in prod_.items() if v}


def DH_closed_form(g: PPoly, sign: int = 1) -> dict[int, PPoly]:
    """``exp(sign * sum_k (d/dp_k)/k * y^k) g`` as a dict ``k -> coefficient of y^k``.

    ``sign=+1`` gives ``DH(x) g``, ``sign=-1`` gives ``DE(x) g`` with ``y = 1/x``.
    """
    top = max(g.degrees(), default=0)
    result = {0: g}
    current = {0: g}
    for n in range(1, top + 1):
        nxt: dict[int, PPoly] = {}
        for power, poly in current.items():
            for j in range(1, top + 1):
                d = poly.derivative(j)
                if not d:
                    continue
                contrib = d * Fraction(sign, j * n)
                nxt[power + j] = nxt.get(power + j, PPoly({}, g.D)) + contrib
        current = {k: v for k, v in nxt.items() if v}
        for k, v in current.items():
            result[k] = result.get(k, PPoly({}, g.D)) + v
        if not current:
            break
    return {k: v for k, v in result.items() if v}


def DH_via_adjoint(g: PPoly, sign: int = 1) -> dict[int, PPoly]:
    """Same as :func:`DH_closed_form` through ``D_{h_k}`` (or ``(-1)^k D_{e_k}``)."""
    top = max(g.degrees(), default=0)
    out = {}
    for k in range(top + 1):
        f = h_poly(k, g.D) if sign > 0 else e_poly(k, g.D)
        v = adjoint_apply(f, g)
        if v:
            out[k] = v
    return out


# ---------------------------------------------------------------- checks

def laurent_vandermonde(l: int) -> dict[tuple[int, ...], int]:
    """``prod_{i<j} (1 - x_j / x_i)`` as exponent-vector -> integer coefficient."""
    poly = {(0,) * l: 1}
    for i, j in itertools.combinations(range(l), 2):
        nxt: dict[tuple[int, ...], int] = {}
        for e, c in poly.items():
            nxt[e] = nxt.get(e, 0) + c
            f = list(e)
            f[i] -= 1
            f[j] += 1
            f = tuple(f)
            nxt[f] = nxt.get(f, 0) - c
        poly = {k: v for k, v in nxt.items() if v}
    return poly


def fsym_expansion(l: int, D: int) -> dict[tuple[int, ...], PPoly]:
    """``prod_{i<j}(1 - x_j/x_i) prod_i H(x_i)`` with total H-degree ``<= D``."""
    hs = {(): PPoly.constant(Fraction(1), D)}
    for _ in range(l):
        nxt = {}
        for e, f in hs.items():
            for k in range(D + 1 - sum(e)):
                nxt[e + (k,)] = f * h_poly(k, D)
        hs = nxt
    out: dict[tuple[int, ...], PPoly] = {}
    for shift, c in laurent_vandermonde(l).items():
        for e, f in hs.items():
            key = tuple(a + b for a, b in zip(e, shift))
            out[key] = out.get(key, PPoly({}, D)) + f * c
    return {k: v for k, v in out.items() if v}


def straightened_schur(alpha: Sequence[int], D: int) -> PPoly:
    st = straighten(alpha)
    if st.is_zero:
        return PPoly({}, D)
    return schur_poly(st.partition, D) * st.sign


def fsym_check(l: int, D: int = DEFAULT_DEGREE, y: Sequence[complex] | None = None,
               tolerance: float = 0.0) -> ResidualReport:
    """Coefficients of ``prod_{i<j}(1 - x_j/x_i) prod H(x_i)`` against Schur functions.

    Partition exponents must carry ``s_lambda``; any other exponent ``alpha``
    carries the straightened ``s_alpha``, which vanishes unless ``alpha``
    straightens to a partition.  Exact comparison; with ``y`` given, the
    specialized values are compared as well.
    """
    if l > 3 or D > 6:
        raise ValueError("fsym_check is limited to l <= 3, D <= 6")
    with stopwatch() as clock:
        lhs = fsym_expansion(l, D)
        keys = set(lhs)
        for k in range(D + 1):
            for lam in partitions(k, l):
                keys.add(tuple(lam) + (0,) * (l - len(lam)))
        worst = 0.0
        numeric = 0.0
        partition_terms = 0
        surviving_non_partition = 0
        for key in sorted(keys):
            got = lhs.get(key, PPoly({}, D))
            want = straightened_schur(key, D)
            if all(a >= 0 for a in key) and all(key[i] >= key[i + 1] for i in range(l - 1)):
                partition_terms += 1
            elif got:
                surviving_non_partition += 1
            worst = max(worst, (got - want).max_abs_coefficient())
            if y is not None:
                numeric = max(numeric, abs(eval_at(got, y) - eval_at(want, y)))
    details = {
        "partition_terms": partition_terms,
        "nonvanishing_non_partition_terms": surviving_non_partition,
    }
    if y is not None:
        details["numeric_residual"] = numeric
    # The specialization is floating point; only a gross mismatch counts against the exact check.
    relative = worst + (numeric if numeric > NUMERIC_TOLERANCE else 0.0)
    return ResidualReport("fsym", {"l": l, "D": D}, worst, relative, tolerance, clock[0], details)


def boson_to_ppoly(v: fermion.BosonVector, D: int) -> dict[int, PPoly]:
    """Charge -> symmetric function under ``z^m s_lambda -> s_lambda``."""
    out: dict[int, PPoly] = {}
    for c, coeff in v.items():
        out[c.charge] = out.get(c.charge, PPoly({}, D)) + schur_poly(c.partition, D) * coeff
    return out


def vertex_plus_coefficient(m: int, lam, k: int, D: int) -> PPoly:
    """Coefficient of ``x^k`` in ``x^{m+1} H(x) DE(x) s_lambda``."""
    s = schur_poly(tuple(lam), D)
    out = PPoly({}, D)
    for r in range(sum(lam) + 1):
        j = k - m - 1 + r
        if j < 0:
            continue
        lowered = adjoint_apply(elementary(r, D), s)
        if lowered:
            out = out + h_poly(j, D) * lowered * ((-1) ** r)
    return out


def vertex_minus_coefficient(m: int, lam, k: int, D: int) -> PPoly:
    """Coefficient of ``x^{-k}`` in ``x^{-m} E(x) DH(x) s_lambda``."""
    s = schur_poly(tuple(lam), D)
    out = PPoly({}, D)
    for r in range(sum(lam) + 1):
        j = r - k + m
        if j < 0:
            continue
        lowered = adjoint_apply(h_poly(r, D), s)
        if lowered:
            out = out + e_poly(j, D) * lowered
    return out


def _vertex_degree(sign: int, m: int, lam, k: int) -> int:
    return sum(lam) + (k - m - 1 if sign > 0 else m - k)


def vertex_check(sign: int, m: int, lam, k: int, D: int = DEFAULT_DEGREE) -> ResidualReport:
    """Bosonized ``Psi^{+/-}`` against the combinatorial ``psi^{+/-}_k`` on ``z^m s_lambda``.

    The working degree is raised to the degree of the output when needed, so
    no coefficient is lost to truncation.  Also compares ``DH``/``DE`` applied
    to ``s_lambda`` with their exponential closed forms.
    """
    lam = as_partition(lam)
    if sum(lam) > D - 1:
        raise ValueError(f"|lambda| must be at most D - 1 = {D - 1}")
    with stopwatch() as clock:
        work = max(D, _vertex_degree(sign, m, lam, k), sum(lam))
        basis = fermion.BosonVector({ChargedPartition(m, lam): Fraction(1)})
        if sign > 0:
            comb = fermion.psi_plus(k, basis)
            bos = vertex_plus_coefficient(m, lam, k, work)
            target_charge = m + 1
        else:
            comb = fermion.psi_minus(k, basis)
            bos = vertex_minus_coefficient(m, lam, k, work)
            target_charge = m - 1
        images = boson_to_ppoly(comb, work)
        if set(images) - {target_charge}:
            raise AssertionError("combinatorial action left the expected charge sector")
        expected = images.get(target_charge, PPoly({}, work))
        residual = (bos - expected).max_abs_coefficient()
        s = schur_poly(lam, work)
        closed = DH_closed_form(s, sign=-1 if sign > 0 else 1)
        adjoint = DH_via_adjoint(s, sign=-1 if sign > 0 else 1)
        closed_residual = max(
            ((closed.get(q, PPoly({}, work)) - adjoint.get(q, PPoly({}, work))).max_abs_coefficient()
             for q in set(closed) | set(adjoint)),
            default=0.0,
        )
    worst = max(residual, closed_residual)
    return ResidualReport(
        "vertex-plus" if sign > 0 else "vertex-minus",
        {"m": m, "lambda": list(lam), "k": k, "D": D},
        worst,
        worst,
        0.0,
        clock[0],
        {"working_degree": work, "closed_form_residual": closed_residual},
    )


def vertex_plus_check(m: int, lam, k: int, D: int = DEFAULT_DEGREE) -> ResidualReport:
    return vertex_check(+1, m, lam, k, D)


def vertex_minus_check(m: int, lam, k: int, D: int = DEFAULT_DEGREE) -> ResidualReport:
    return vertex_check(-1, m, lam, k, D)


def orthonormality_defect(max_weight: int) -> int:
    """Number of pairs with ``<s_lambda, s_mu> != delta``, ``|lambda|, |mu| <= max_weight``."""
    lams = partitions_up_to(max_weight)
    bad = 0
    for a, b in itertools.product(lams, repeat=2):
        value = scalar_product(schur_poly(a, max_weight), schur_poly(b, max_weight))
        if value != (1 if a == b else 0):
            bad += 1
    return bad


def bialternant(lam: Iterable[int], y: Sequence[complex]) -> complex:
    """``det(y_i^{lambda_j + n - j}) / det(y_i^{n - j})``; independent Schur evaluation."""
    import numpy as np

    y = np.asarray(y, dtype=complex)
    n = len(y)
    lam = list(lam)
    if len(lam) > n:
        return 0j
    lam = lam + [0] * (n - len(lam))
    num = np.array([[yi ** (lam[j] + n - 1 - j) for j in range(n)] for yi in y])
    den = np.array([[yi ** (n - 1 - j) for j in range(n)] for yi in y])
    return complex(np.linalg.det(num) / np.linalg.det(den))
