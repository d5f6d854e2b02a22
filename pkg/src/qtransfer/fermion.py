"""Clifford algebra action on the charge-graded boson space.

Basis vectors ``z^m s_lambda`` are :class:`ChargedPartition` labels; vectors
are finitely supported maps label -> coefficient.  The coefficient type is up
to the caller (``Fraction`` for exact identities, ``complex`` for numerical
tau functions).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .combinatorics import (
    ChargedPartition,
    MayaDiagram,
    Partition,
    as_partition,
    from_maya,
    partitions_up_to,
    straighten,
    to_maya,
)
from .report import ResidualReport, stopwatch


class ChargeError(ValueError):
    pass


class BosonVector(Mapping):
    """Finitely supported linear combination of ``z^m s_lambda``."""

    __slots__ = ("_terms",)
    symbol = "s"

    def __init__(self, terms: Mapping[ChargedPartition, object] | Iterable | None = None):
        acc: dict[ChargedPartition, object] = {}
        items = terms.items() if isinstance(terms, Mapping) else (terms or ())
        for label, c in items:
            if not isinstance(label, ChargedPartition):
                label = ChargedPartition(*label)
            acc[label] = acc.get(label, 0) + c
        self._terms = {k: v for k, v in acc.items() if v}

    @classmethod
    def basis(cls, charge: int, lam=(), coeff=Fraction(1)) -> "BosonVector":
        return cls({ChargedPartition(charge, lam): coeff})

    @classmethod
    def vacuum(cls) -> "BosonVector":
        return cls.basis(0, ())

    def __getitem__(self, key):
        return self._terms[key]

    def __iter__(self) -> Iterator[ChargedPartition]:
        return iter(sorted(self._terms))

    def __len__(self):
        return len(self._terms)

    def __add__(self, other: "BosonVector") -> "BosonVector":
        return type(self)(itertools.chain(self._terms.items(), other._terms.items()))

    def __sub__(self, other: "BosonVector") -> "BosonVector":
        return self + other * -1

    def __mul__(self, c) -> "BosonVector":
        return type(self)({k: v * c for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __eq__(self, other):
        if not isinstance(other, BosonVector):
            return NotImplemented
        return not (self - other)._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        name = type(self).__name__
        if not self._terms:
            return f"{name}(0)"
        body = " + ".join(f"{self._terms[k]}*z^{k.charge}{self.symbol}{k.partition}" for k in self)
        return f"{name}({body})"

    def charges(self) -> set[int]:
        return {k.charge for k in self._terms}

    def component(self, charge: int) -> "BosonVector":
        return type(self)({k: v for k, v in self._terms.items() if k.charge == charge})

    def max_abs(self) -> float:
        return max((abs(complex(v)) for v in self._terms.values()), default=0.0)

    def to_json(self) -> list[dict]:
        return [
            {"charge": k.charge, "partition": list(k.partition), "coefficient": _json_number(self._terms[k])}
            for k in self
        ]


def _json_number(c):
    if isinstance(c, Fraction):
        return str(c)
    if isinstance(c, complex):
        return [c.real, c.imag]
    if isinstance(c, int):
        return c
    return [complex(c).real, complex(c).imag]


# ------------------------------------------------------------------ generators

def plus_on_basis(k: int, label: ChargedPartition) -> tuple[int, ChargedPartition] | None:
    """``psi^+_k(z^m s_lambda) = z^{m+1} s_{(k-m-1, lambda)}`` straightened."""
    m, lam = label.charge, label.partition
    st = straighten((k - m - 1,) + lam)
    if st.is_zero:
        return None
    return st.sign, ChargedPartition(m + 1, st.partition)


def minus_on_basis(k: int, label: ChargedPartition) -> tuple[int, ChargedPartition] | None:
    """Remove the row ``t`` with ``lambda_t - t = k - m - 1``, sign ``(-1)^{t+1}``."""
    m, lam = label.charge, label.partition
    target = k - m - 1
    l = len(lam)
    t = None
    for i, part in enumerate(lam, start=1):
        if part - i == target:
            t = i
            break
    if t is None:
        # Past the last row lambda_t - t = -t.
        if target <= -(l + 1):
            t = -target
        else:
            return None
    padded = lam + (0,) * (t - l) if t > l else lam
    new = tuple(p + 1 for p in padded[: t - 1]) + padded[t:]
    sign = 1 if (t + 1) % 2 == 0 else -1
    return sign, ChargedPartition(m - 1, as_partition(new))


def _apply(rule, k: int, v: BosonVector) -> BosonVector:
    out: dict[ChargedPartition, object] = {}
    for label, c in v.items():
        image = rule(k, label)
        if image is None:
            continue
        sign, new = image
        out[new] = out.get(new, 0) + sign * c
    return BosonVector(out)


def psi_plus(k: int, v: BosonVector) -> BosonVector:
    return _apply(plus_on_basis, k, v)


def psi_minus(k: int, v: BosonVector) -> BosonVector:
    return _apply(minus_on_basis, k, v)


def psi(sign: int, k: int, v: BosonVector) -> BosonVector:
    return psi_plus(k, v) if sign > 0 else psi_minus(k, v)


def apply_string(ops: Iterable[tuple[int, int]], v: BosonVector) -> BosonVector:
    """Apply ``(sign, k)`` operators right to left, as written in a product."""
    for sign, k in reversed(list(ops)):
        v = psi(sign, k, v)
    return v


def anticommutator_residual(k: int, l: int, kind: str, v: BosonVector) -> BosonVector:
    """Clifford relations on ``v``; kind is ``"+-"``, ``"++"`` or ``"--"``."""
    if kind == "+-":
        return psi_plus(k, psi_minus(l, v)) + psi_minus(l, psi_plus(k, v)) - (v if k == l else BosonVector())
    if kind in ("++", "--"):
        s = 1 if kind == "++" else -1
        return psi(s, k, psi(s, l, v)) + psi(s, l, psi(s, k, v))
    raise ValueError(f"unknown kind {kind!r}")


# ------------------------------------------------------------------ Maya route

def _maya_window(label: ChargedPartition, k: int) -> list[int]:
    depth = len(label.partition) + abs(k - label.charge) + 2
    return list(to_maya(label).entries(depth))


def maya_plus(k: int, label: ChargedPartition) -> tuple[int, ChargedPartition] | None:
    """Wedge ``v_k`` in front, then sort (sign = parity of the insertion position)."""
    seq = _maya_window(label, k)
    if k in seq:
        return None
    pos = sum(1 for d in seq if d > k)
    head = sorted(seq + [k], reverse=True)
    sign = -1 if pos % 2 else 1
    return sign, from_maya(MayaDiagram(tuple(head), seq[-1] - 1))


def maya_minus(k: int, label: ChargedPartition) -> tuple[int, ChargedPartition] | None:
    """Contract ``v_k`` out of the wedge (sign = parity of its position)."""
    seq = _maya_window(label, k)
    if k not in seq:
        return None
    pos = seq.index(k)
    head = seq[:pos] + seq[pos + 1:]
    sign = -1 if pos % 2 else 1
    return sign, from_maya(MayaDiagram(tuple(head), seq[-1] - 1))


def maya_action_crosscheck(k: int, v: BosonVector) -> ResidualReport:
    """``psi^{+/-}_k`` by the partition rules versus wedge insertion/contraction."""
    with stopwatch() as clock:
        diff_plus = psi_plus(k, v) - _apply(maya_plus, k, v)
        diff_minus = psi_minus(k, v) - _apply(maya_minus, k, v)
        worst = max(diff_plus.max_abs(), diff_minus.max_abs())
    return ResidualReport("maya", {"k": k, "support": len(v)}, worst, worst, 0.0, clock[0])


# ------------------------------------------------------------------ generating functions

def psi_gen_apply(sign: int, m: int, v: BosonVector, window: Iterable[int]) -> dict[int, BosonVector]:
    """Coefficients of ``Psi^+(x, m) v`` (powers ``x^k``) or ``Psi^-(x, m) v`` (powers ``x^{-k}``).

    Returns ``{power of x: coefficient}`` for ``k`` in ``window``.
    """
    if v and v.charges() != {m}:
        raise ChargeError(f"vector has charges {sorted(v.charges())}, expected only {m}")
    out = {}
    for k in window:
        image = psi(sign, k, v)
        if image:
            out[k if sign > 0 else -k] = image
    return out


def iterated_vacuum(sign: int, l: int, window: Iterable[int]) -> dict[tuple[int, ...], BosonVector]:
    """``Psi^s(x_1, .) ... Psi^s(x_l, 0)(1)`` as ``{(e_1..e_l): coefficient}``.

    Charges step by ``sign`` from the vacuum: ``x_l`` acts on charge 0,
    ``x_1`` on charge ``sign * (l - 1)``.
    """
    window = list(window)
    series: dict[tuple[int, ...], BosonVector] = {(): BosonVector.vacuum()}
    for step in range(l):
        charge = sign * step
        nxt = {}
        for exps, vec in series.items():
            for power, image in psi_gen_apply(sign, charge, vec, window).items():
                nxt[(power,) + exps] = image
        series = nxt
    return series


def vacuum_string_ops(lam: Partition, sign: int) -> list[tuple[int, int]]:
    """Operators of the vacuum strings, leftmost first.

    ``psi^+_{lam_1+l} ... psi^+_{lam_l+1}`` gives ``z^l s_lam``;
    ``psi^-_{-lam_1-l+1} ... psi^-_{-lam_l}`` gives ``z^{-l} (-1)^{|lam|} s_{lam'}``.
    """
    lam = tuple(lam)
    l = len(lam)
    if sign > 0:
        return [(1, lam[i] + l - i) for i in range(l)]
    return [(-1, -lam[i] - l + i + 1) for i in range(l)]


def vacuum_string(lam: Partition, sign: int) -> BosonVector:
    return apply_string(vacuum_string_ops(lam, sign), BosonVector.vacuum())


# ------------------------------------------------------------------ bilinear identity

def contributing_k_range(tau: BosonVector) -> range:
    """All ``k`` for which some ``psi^+_k(tau) ⊗ psi^-_k(tau)`` term can be nonzero."""
    charges = tau.charges()
    if not charges:
        return range(0)
    if len(charges) != 1:
        raise ChargeError("tau must be charge-homogeneous")
    (m,) = charges
    longest = max(len(c.partition) for c in tau)
    widest = max((c.partition[0] if c.partition else 0) for c in tau)
    return range(m + 1 - longest, m + widest + 1)


def bilinear_residual(tau: BosonVector, max_weight: int) -> dict[tuple[ChargedPartition, ChargedPartition], object]:
    """Nonzero coefficients of ``sum_k psi^+_k(tau) ⊗ psi^-_k(tau)`` with ``|mu|, |nu| <= max_weight``.

    The sum over ``k`` is finite and enumerated exactly from the support of
    ``tau``.  For a truncated infinite ``tau``, the coefficients are complete
    when the support covers all weights up to ``2 * max_weight + 1``.
    """
    out: dict[tuple[ChargedPartition, ChargedPartition], object] = {}
    for k in contributing_k_range(tau):
        left = psi_plus(k, tau)
        right = psi_minus(k, tau)
        for mu, a in left.items():
            if sum(mu.partition) > max_weight:
                continue
            for nu, b in right.items():
                if sum(nu.partition) > max_weight:
                    continue
                out[(mu, nu)] = out.get((mu, nu), 0) + a * b
    return {k: v for k, v in sorted(out.items()) if v}


def bilinear_to_json(residual: Mapping, threshold: float = 0.0) -> list[dict]:
    rows = []
    for (mu, nu), c in residual.items():
        if abs(complex(c)) <= threshold:
            continue
        rows.append({"charge": mu.charge - 1, "mu": list(mu.partition), "nu": list(nu.partition),
                     "coefficient": _json_number(c)})
    return rows


def schur_tau(coefficients: Mapping[Partition, object], charge: int = 0) -> BosonVector:
    return BosonVector({ChargedPartition(charge, lam): c for lam, c in coefficients.items()})


def cauchy_coefficients(y, max_weight: int) -> dict[Partition, complex]:
    """``c_lambda = s_lambda(y)`` for ``|lambda| <= max_weight``."""
    from .symfun import bialternant

    return {lam: bialternant(lam, y) for lam in partitions_up_to(max_weight)}


def basis_window(max_weight: int, charges: Iterable[int]) -> list[ChargedPartition]:
    return [ChargedPartition(m, lam) for m in charges for lam in partitions_up_to(max_weight)]


def bilinear_check(tau: BosonVector, max_weight: int, tolerance: float = 1e-9) -> ResidualReport:
    """Bilinear residual against its cancellation scale.

    The scale is the sum over ``k`` of the products of the coefficient
    ``l1`` norms of ``psi^+_k tau`` and ``psi^-_k tau`` inside the window.
    """
    with stopwatch() as clock:
        residual = bilinear_residual(tau, max_weight)
        worst = max((abs(complex(c)) for c in residual.values()), default=0.0)
        scale = 0.0
        for k in contributing_k_range(tau):
            left = sum(abs(complex(c)) for lab, c in psi_plus(k, tau).items() if sum(lab.partition) <= max_weight)
            right = sum(abs(complex(c)) for lab, c in psi_minus(k, tau).items() if sum(lab.partition) <= max_weight)
            scale += left * right
    relative = worst / scale if scale > 0 else worst
    return ResidualReport("bilinear", {"max_weight": max_weight, "terms": len(tau)}, worst, relative, tolerance,
                          clock[0], {"nonzero_pairs": len(residual)})


def find_bilinear_witness(rng, max_weight: int = 3, attempts: int = 200):
    """Random search for a two-term ``s_lambda + c s_mu`` that is not a tau function.

    Returns ``(coefficients, (mu, nu), value)`` for the first hit, else ``None``.
    """
    labels = partitions_up_to(max_weight)
    for _ in range(attempts):
        i, j = rng.choice(len(labels), size=2, replace=False)
        coeffs = {labels[i]: Fraction(1), labels[j]: Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 5)))}
        residual = bilinear_residual(schur_tau(coeffs), 2 * max_weight)
        if residual:
            pair, value = next(iter(residual.items()))
            return coeffs, pair, value
    return None
