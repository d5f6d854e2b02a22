"""Sequences of transfer matrices as a Clifford module.

A basis vector ``z^m t_lambda(u)`` stands for the sequence
``(T^N_lambda(u))_{N >= 1}``.  Symbols are manipulated exactly with the
same rules as the boson space; numbers appear only when a
:class:`SequenceEvaluator` turns a symbol into the operators for
``N = 1..N_max``.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from . import fermion, genfun, scalars
from .combinatorics import ChargedPartition, Partition, as_partition, conjugate, partitions_up_to
from .fermion import BosonVector, ChargeError
from .identities import cbr_entries, operator_det, transfer_via_dual
from .report import ResidualReport, stopwatch
from .transfer import ChainContext, TransferFamily

DEFAULT_N_MAX = 3


class TildeVector(BosonVector):
    """Finite combination of ``z^m t_lambda(u)``."""

    __slots__ = ()
    symbol = "t"


def phi(v: BosonVector) -> TildeVector:
    """``z^m s_lambda -> z^m t_lambda(u)``; coefficients are untouched."""
    return TildeVector(dict(v.items()))


def phi_inverse(v: TildeVector) -> BosonVector:
    return BosonVector(dict(v.items()))


def psi_tilde(sign: int, k: int, v: TildeVector) -> TildeVector:
    """Clifford generators on sequences, by the boson-space formulas."""
    return TildeVector(dict(fermion.psi(sign, k, v).items()))


def apply_string_tilde(ops, v: TildeVector) -> TildeVector:
    return TildeVector(dict(fermion.apply_string(ops, v).items()))


class TransferSequence(NamedTuple):
    """The symbol ``z^m t_lambda``; its values come from an evaluator."""

    label: ChargedPartition

    def values(self, evaluator: "SequenceEvaluator") -> tuple[np.ndarray, ...]:
        return evaluator.evaluate(TildeVector({self.label: 1}))


@dataclass(eq=False)
class SequenceEvaluator:
    """Chains for ``N = 1..N_max`` sharing the inhomogeneities, evaluated at ``u``."""

    contexts: tuple[ChainContext, ...]
    u: complex
    _families: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if not self.contexts:
            raise ValueError("need at least one chain")
        for N, ctx in enumerate(self.contexts, start=1):
            if ctx.N != N:
                raise ValueError(f"context {N} has N={ctx.N}")
            if ctx.a != self.contexts[0].a:
                raise ValueError("all chains must share the inhomogeneities")

    @classmethod
    def principal(cls, a: Sequence, eigenvalues: Sequence, u, N_max: int = DEFAULT_N_MAX,
                  exact: bool = False) -> "SequenceEvaluator":
        """Twists ``diag(g_1..g_N)``: principal truncations of one diagonal matrix."""
        if len(eigenvalues) < N_max:
            raise ValueError(f"need {N_max} eigenvalues")
        contexts = tuple(ChainContext.diagonal(N, a, eigenvalues[:N], exact=exact) for N in range(1, N_max + 1))
        return cls(contexts, u)

    @property
    def N_max(self) -> int:
        return len(self.contexts)

    def at(self, u) -> "SequenceEvaluator":
        return SequenceEvaluator(self.contexts, u)

    def family(self, N: int) -> TransferFamily:
        with self._lock:
            fam = self._families.get(N)
            if fam is None:
                fam = self._families[N] = TransferFamily(self.contexts[N - 1], self.u)
            return fam

    def component(self, lam: Partition, N: int) -> np.ndarray:
        """``T^N_lambda(u)`` through the e-determinant, so ``l(lambda) > N`` gives zero."""
        return transfer_via_dual(self.family(N), as_partition(lam))

    def evaluate(self, v: TildeVector) -> tuple[np.ndarray, ...]:
        """Operators for ``N = 1..N_max``.  The charge is symbolic and must be uniform."""
        if len(v.charges()) > 1:
            raise ChargeError(f"mixed charges {sorted(v.charges())}")
        out = []
        for N in range(1, self.N_max + 1):
            ctx = self.contexts[N - 1]
            total = ctx.zero()
            for label, c in v.items():
                total = total + self.component(label.partition, N) * ctx.scalar(c)
            out.append(total)
        return tuple(out)

    def to_json(self) -> dict:
        first = self.contexts[0]
        return {
            "N_max": self.N_max,
            "u": [scalars.to_complex(self.u).real, scalars.to_complex(self.u).imag],
            "a": [[scalars.to_complex(x).real, scalars.to_complex(x).imag] for x in first.a],
            "g_diagonals": [[[scalars.to_complex(z).real, scalars.to_complex(z).imag] for z in np.diag(c.g)]
                            for c in self.contexts],
        }


def _tuple_residual(got: Sequence[np.ndarray], want: Sequence[np.ndarray], scale: float = 0.0) -> tuple[float, float]:
    absolute = max((scalars.norm(x - y) for x, y in zip(got, want)), default=0.0)
    scale = max([scale] + [max(scalars.norm(x), scalars.norm(y)) for x, y in zip(got, want)])
    return absolute, (absolute / scale if scale > 0 else absolute)


def vacuum_strings_check(lam: Partition, evaluator: SequenceEvaluator, tolerance: float = 1e-8) -> ResidualReport:
    """Both vacuum strings, symbolically and evaluated against the h-determinants.

    ``psi^+`` string gives ``z^l t_lambda``; ``psi^-`` string gives
    ``z^{-l} (-1)^{|lambda|} t_{lambda'}``.
    """
    lam = as_partition(lam)
    l = len(lam)
    with stopwatch() as clock:
        symbolic_ok = True
        worst_abs = worst_rel = 0.0
        vac = TildeVector.basis(0, ())
        for sign, label, coeff in ((1, lam, 1), (-1, conjugate(lam), (-1) ** sum(lam))):
            got = apply_string_tilde(fermion.vacuum_string_ops(lam, sign), vac)
            expected = TildeVector.basis(sign * l, label, coeff)
            symbolic_ok &= got == expected
            values = evaluator.evaluate(got)
            direct = []
            scale = 0.0
            for N in range(1, evaluator.N_max + 1):
                fam = evaluator.family(N)
                if label:
                    det, cancel = operator_det(cbr_entries(fam, label, 0), fam)
                else:
                    det, cancel = fam.context.identity(), 1.0
                direct.append(det * fam.context.scalar(coeff))
                scale = max(scale, cancel)
            # Labels longer than every N vanish; their roundoff is judged against the cancellation scale.
            a, r = _tuple_residual(values, direct, scale)
            worst_abs, worst_rel = max(worst_abs, a), max(worst_rel, r)
    if not symbolic_ok:
        worst_rel = float("inf")
    return ResidualReport("vacuum-strings", {"lambda": list(lam)}, worst_abs, worst_rel, tolerance, clock[0],
                          {"symbolic_match": symbolic_ok})


def _pair_scale(tau: BosonVector, max_weight: int, left: SequenceEvaluator, right: SequenceEvaluator,
                N: int, norms: dict) -> float:
    """Sum over ``k`` of the products of the term-norm sums of both factors."""

    def size(vec, ev, key):
        total = 0.0
        for label, c in vec.items():
            if sum(label.partition) > max_weight:
                continue
            nk = (key, label.partition)
            if nk not in norms:
                norms[nk] = scalars.norm(ev.component(label.partition, N))
            total += abs(complex(c)) * norms[nk]
        return total

    return sum(size(fermion.psi_plus(k, tau), left, "u") * size(fermion.psi_minus(k, tau), right, "v")
               for k in fermion.contributing_k_range(tau))


def bilinear_matrix_residual(coefficients: Mapping[Partition, object], evaluator: SequenceEvaluator, v,
                             max_weight: int, tolerance: float = 1e-8) -> ResidualReport:
    """``sum_k psi^+_k tau(u) ⊗ psi^-_k tau(v)`` as ``N^{2n}``-dimensional matrices.

    Pair coefficients ``d_{mu nu}`` come from :func:`fermion.bilinear_residual`
    (exact when the coefficients are rational).  The relative residual is the
    matrix norm over the cancellation scale: the sum over ``k`` of the
    products of term-norm sums of the two factors.
    """
    with stopwatch() as clock:
        tau = fermion.schur_tau(coefficients)
        d = fermion.bilinear_residual(tau, max_weight)
        right = evaluator.at(v)
        per_N = []
        worst_abs = worst_rel = 0.0
        for N in range(1, evaluator.N_max + 1):
            ctx = evaluator.contexts[N - 1]
            total = scalars.zeros((ctx.size**2, ctx.size**2), ctx.exact)
            for (mu, nu), c in d.items():
                total = total + np.kron(evaluator.component(mu.partition, N), right.component(nu.partition, N)) * ctx.scalar(c)
            absolute = scalars.norm(total)
            scale = _pair_scale(tau, max_weight, evaluator, right, N, {})
            relative = absolute / scale if scale > 0 else absolute
            per_N.append({"N": N, "absolute": absolute, "relative": relative})
            worst_abs, worst_rel = max(worst_abs, absolute), max(worst_rel, relative)
    return ResidualReport("bilinear-matrix", {"max_weight": max_weight, "terms": len(tau)}, worst_abs, worst_rel,
                          tolerance, clock[0], {"pair_coefficients": len(d), "per_N": per_N})


def _decomposition_rhs(family: TransferFamily, l: int, D: int, kind: str) -> genfun.SeriesPoly:
    """Right side of the vertex decomposition in ``(x, x_1..x_l)``.

    H side: ``sum_k (-x)^{k-l} H(x|u-l+k) DE_k H(x_1..x_l|u_1..u_l)``.
    E side: ``sum_k (-1)^k x^{k-l} E(x|u+l-k) DH_k E(x_1..x_l|u_1..u_l)``.
    ``DE_k`` / ``DH_k`` sum over ``k``-subsets ``S`` the product of
    ``x_i^{-1}`` and a shift of ``u_i`` by ``-1`` (H) or ``+1`` (E), ``i`` in ``S``.
    """
    shift = -1 if kind == "h" else 1
    out = genfun.SeriesPoly(l + 1, D, D - l)
    identity = family.context.identity()
    for k in range(l + 1):
        lead = genfun._univariate(family, kind, shift * (l - k), D)
        sign = (-1) ** (k - l) if kind == "h" else (-1) ** k
        for subset in itertools.combinations(range(l), k):
            if l == 0:
                tail = {(): identity}
            else:
                offsets = [shift if i in subset else 0 for i in range(l)]
                series = (genfun.h_multivariate if kind == "h" else genfun.e_multivariate)(family, l, D, offsets)
                tail = {tuple(e - (i in subset) for i, e in enumerate(exps)): op for exps, op in series.coeffs.items()}
            for p, lead_op in lead.items():
                for exps, op in tail.items():
                    term = lead_op @ op
                    out.add_term((p + k - l,) + exps, term if sign > 0 else -term)
    return out


def vertex_decomposition_check(family: TransferFamily, l: int, D: int = 5, sign: int = 1,
                               tolerance: float = 1e-10) -> ResidualReport:
    """``H(x, x_1..x_l|u)`` (or ``E``) against its expansion in ``DE_k`` (or ``DH_k``)."""
    kind = "h" if sign > 0 else "e"
    if not 0 <= l <= 2:
        raise ValueError("l must be 0, 1 or 2")
    with stopwatch() as clock:
        lhs = (genfun.h_multivariate if kind == "h" else genfun.e_multivariate)(family, l + 1, D)
        rhs = _decomposition_rhs(family, l, D, kind)
        absolute, relative = genfun.series_mismatch(lhs, rhs, family.context.zero())
    return ResidualReport(f"vertex-decomposition-{kind}", {"l": l, "D": D}, absolute, relative, tolerance,
                          clock[0], {"coefficients": len(lhs.coeffs)})


def gen_vacuum_check(evaluator: SequenceEvaluator, l: int, D: int = 5, sign: int = 1,
                     tolerance: float = 1e-8) -> ResidualReport:
    """Iterated generating fermions on the vacuum against the multivariate series.

    The residual is the worst coefficient mismatch over the largest coefficient.

    ``Psi^+(x_1, l-1) ... Psi^+(x_l, 0)(1) = z^l (x_1..x_l)^l H(x_1..x_l|u)`` and
    ``Psi^-(x_1, 1-l) ... Psi^-(x_l, 0)(1) = z^{-l} (-1)^{l(l-1)/2} (x_1..x_l)^{l-1} E(x_1..x_l|u)``.
    """
    if not 1 <= l <= 2:
        raise ValueError("l must be 1 or 2")
    lift = l if sign > 0 else l - 1
    prefactor = 1 if sign > 0 else (-1) ** (l * (l - 1) // 2)
    top = D + 1 - l
    with stopwatch() as clock:
        window = range(-(D + l + 2), D + l + 3)
        symbolic = {exps: TildeVector(dict(vec.items())) for exps, vec in fermion.iterated_vacuum(sign, l, window).items()}
        series = []
        for N in range(1, evaluator.N_max + 1):
            fam = evaluator.family(N)
            series.append((genfun.h_multivariate if sign > 0 else genfun.e_multivariate)(fam, l, D))
        keys = {e for e in symbolic if max(e) - lift <= top}
        for s in series:
            keys |= {tuple(x + lift for x in e) for e in s.coeffs}
        worst_abs = scale = 0.0
        charge_ok = True
        for exps in sorted(keys):
            vec = symbolic.get(exps, TildeVector())
            if vec and vec.charges() != {sign * l}:
                charge_ok = False
            got = evaluator.evaluate(vec)
            want = []
            for N, s in enumerate(series, start=1):
                ctx = evaluator.contexts[N - 1]
                want.append(s.coefficient(tuple(x - lift for x in exps), ctx.zero()) * prefactor)
            worst_abs = max(worst_abs, _tuple_residual(got, want)[0])
            scale = max([scale] + [scalars.norm(w) for w in want])
        worst_rel = worst_abs / scale if scale > 0 else worst_abs
    if not charge_ok:
        worst_rel = float("inf")
    return ResidualReport("gen-vacuum-plus" if sign > 0 else "gen-vacuum-minus", {"l": l, "D": D},
                          worst_abs, worst_rel, tolerance, clock[0], {"coefficients": len(keys), "charge_ok": charge_ok})


def independence_check(evaluator: SequenceEvaluator, max_weight: int = 3, threshold: float = 1e-6) -> ResidualReport:
    """Evaluated sequences for distinct ``|lambda| <= max_weight`` are linearly independent.

    Columns are the flattened operator tuples, scaled to unit norm; the
    reported residual is ``threshold / sigma_min`` so that passing means
    ``sigma_min > threshold``.
    """
    with stopwatch() as clock:
        labels = partitions_up_to(max_weight)
        columns = []
        for lam in labels:
            flat = np.concatenate([scalars.as_complex_array(op).ravel()
                                   for op in evaluator.evaluate(TildeVector.basis(0, lam))])
            size = np.linalg.norm(flat)
            # a sequence vanishing on every chain stays a zero column
            columns.append(flat / size if size > 0 else flat)
        sv = np.linalg.svd(np.stack(columns, axis=1), compute_uv=False)
        # fewer rows than labels means rank deficiency
        sv = np.concatenate([sv, np.zeros(len(labels) - len(sv))])
        smallest = float(sv[-1])
    ratio = threshold / smallest if smallest > 0 else float("inf")
    return ResidualReport("independence", {"max_weight": max_weight, "N_max": evaluator.N_max}, smallest, ratio, 1.0,
                          clock[0], {"smallest_singular_value": smallest, "condition_number": float(sv[0] / sv[-1])
                                     if smallest > 0 else float("inf"), "labels": len(labels)})
