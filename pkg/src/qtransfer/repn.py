"""Finite-dimensional gl(N) representations used as auxiliary spaces.

Three constructions are provided: symmetric powers, exterior powers (both with
exact integer generator matrices) and a Young-symmetrizer construction for an
arbitrary highest weight, which serves as an independent oracle.

Indices of generators are 1-based, ``gen(i, j)`` is the image of ``e_ij``.
Basis orders are lexicographic so matrices are reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .combinatorics import Partition, as_partition, conjugate

YOUNG_MAX_DEGREE = 4
YOUNG_MAX_N = 4


class RepresentationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RepSpace:
    """A gl(N)-module with explicit generator matrices and group action."""

    N: int
    name: str
    basis_labels: tuple
    gens: np.ndarray  # shape (N, N, dim, dim); gens[i-1, j-1] = gen(i, j)
    _group: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    @property
    def dim(self) -> int:
        return self.gens.shape[-1]

    def gen(self, i: int, j: int) -> np.ndarray:
        return self.gens[i - 1, j - 1]

    def group(self, g) -> np.ndarray:
        g = np.asarray(g)
        if g.shape != (self.N, self.N):
            raise RepresentationError(f"twist must be {self.N}x{self.N}, got {g.shape}")
        return self._group(g)

    def to_json(self) -> dict:
        """Debug dump of the generator matrices."""
        return {
            "name": self.name,
            "N": self.N,
            "dim": self.dim,
            "gens": {
                f"{i + 1},{j + 1}": [[[float(z.real), float(z.imag)] for z in row]
                                     for row in np.asarray(self.gens[i, j], dtype=complex)]
                for i in range(self.N) for j in range(self.N)
            },
        }


def _scalar_dtype(g: np.ndarray):
    return object if g.dtype == object else complex


def _det(m: np.ndarray):
    """Leibniz determinant; fine for the k <= 4 minors used here."""
    k = m.shape[0]
    if k == 0:
        return 1
    if m.dtype != object:
        return np.linalg.det(m)
    total = 0
    for perm in itertools.permutations(range(k)):
        term = _perm_sign(perm)
        for i, j in enumerate(perm):
            term = term * m[i, j]
        total = total + term
    return total


def _perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def sym_rep(N: int, k: int) -> RepSpace:
    """``Sym^k C^N`` on monomials ``x^mu``; ``gen(i, j)`` acts as ``x_i d/dx_j``."""
    if N < 1:
        raise RepresentationError("N must be positive")
    if k < 0:
        raise RepresentationError(f"Sym^{k} is undefined for negative k")
    labels = tuple(
        sorted(
            (mu for mu in itertools.product(range(k + 1), repeat=N) if sum(mu) == k),
            reverse=True,
        )
    )
    index = {mu: a for a, mu in enumerate(labels)}
    dim = len(labels)
    gens = np.zeros((N, N, dim, dim), dtype=np.int64)
    for b, mu in enumerate(labels):
        for i in range(N):
            for j in range(N):
                if mu[j] == 0:
                    continue
                nu = list(mu)
                nu[j] -= 1
                nu[i] += 1
                gens[i, j, index[tuple(nu)], b] += mu[j]

    def group(g: np.ndarray) -> np.ndarray:
        out = np.zeros((dim, dim), dtype=_scalar_dtype(g))
        for b, mu in enumerate(labels):
            poly = {(0,) * N: 1}
            for q in range(N):
                for _ in range(mu[q]):
                    nxt: dict = {}
                    for exps, c in poly.items():
                        for p in range(N):
                            e = list(exps)
                            e[p] += 1
                            e = tuple(e)
                            nxt[e] = nxt.get(e, 0) + c * g[p, q]
                    poly = nxt
            for exps, c in poly.items():
                out[index[exps], b] = out[index[exps], b] + c
        return out

    return RepSpace(N, f"Sym^{k}", labels, gens, group)


@lru_cache(maxsize=None)
def wedge_rep(N: int, k: int) -> RepSpace:
    """``Lambda^k C^N`` on strictly increasing tuples (1-based)."""
    if not 0 <= k <= N:
        raise RepresentationError(f"Lambda^{k} C^{N} requires 0 <= k <= N")
    labels = tuple(itertools.combinations(range(1, N + 1), k))
    index = {t: a for a, t in enumerate(labels)}
    dim = len(labels)
    gens = np.zeros((N, N, dim, dim), dtype=np.int64)
    for b, t in enumerate(labels):
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                if j not in t:
                    continue
                if i == j:
                    gens[i - 1, j - 1, b, b] += 1
                    continue
                if i in t:
                    continue
                lo, hi = min(i, j), max(i, j)
                between = sum(1 for x in t if lo < x < hi)
                new = tuple(sorted((set(t) - {j}) | {i}))
                gens[i - 1, j - 1, index[new], b] += -1 if between % 2 else 1

    def group(g: np.ndarray) -> np.ndarray:
        out = np.zeros((dim, dim), dtype=_scalar_dtype(g))
        for a, s in enumerate(labels):
            rows = [x - 1 for x in s]
            for b, t in enumerate(labels):
                cols = [x - 1 for x in t]
                out[a, b] = _det(g[np.ix_(rows, cols)]) if k else 1
        return out

    return RepSpace(N, f"Lambda^{k}", labels, gens, group)


def hook_content_dimension(N: int, lam: Partition) -> int:
    """Dimension of the irreducible gl(N)-module with highest weight ``lam``."""
    lam = as_partition(lam)
    lamc = conjugate(lam)
    num, den = 1, 1
    for i, row in enumerate(lam):
        for j in range(row):
            num *= N + j - i
            den *= (row - j - 1) + (lamc[j] - i - 1) + 1
    return num // den


def _slot_permutation_matrix(N: int, d: int, perm: tuple[int, ...]) -> np.ndarray:
    idx = np.arange(N**d).reshape((N,) * d)
    return np.eye(N**d)[idx.transpose(perm).ravel()]


def _subgroup(blocks: list[list[int]]):
    """Permutations of ``range(d)`` preserving each block setwise, with signs."""
    d = sum(len(b) for b in blocks)
    for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
        perm = list(range(d))
        for block, image in zip(blocks, choice):
            for src, dst in zip(block, image):
                perm[src] = dst
        yield tuple(perm), _perm_sign(perm)


@lru_cache(maxsize=None)
def young_rep(N: int, lam: Partition, d_max: int = YOUNG_MAX_DEGREE) -> RepSpace:
    """Irreducible module cut out of ``(C^N)^{⊗d}`` by a Young symmetrizer.

    The diagram is filled row by row; the module is the column space of
    ``P @ Q`` (row symmetrizer times signed column antisymmetrizer), with an
    orthonormal basis from an SVD.  Only meant for small cases.
    """
    lam = as_partition(lam)
    d = sum(lam)
    if len(lam) > N:
        raise RepresentationError(f"{lam} has more than N={N} rows")
    if d > d_max or N > YOUNG_MAX_N:
        raise RepresentationError(f"Young construction limited to |lambda| <= {d_max}, N <= {YOUNG_MAX_N}")

    big = N**d
    filling, start = [], 0
    for row in lam:
        filling.append(list(range(start, start + row)))
        start += row
    columns = [[filling[i][j] for i in range(len(lam)) if len(filling[i]) > j]
               for j in range(lam[0] if lam else 0)]

    sym = np.zeros((big, big))
    for perm, _ in _subgroup(filling):
        sym += _slot_permutation_matrix(N, d, perm)
    anti = np.zeros((big, big))
    for perm, sign in _subgroup(columns):
        anti += sign * _slot_permutation_matrix(N, d, perm)
    c = sym @ anti

    u, s, _ = np.linalg.svd(c)
    cutoff = 1e-10 * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > cutoff))
    expected = hook_content_dimension(N, lam)
    if rank != expected:
        raise RepresentationError(f"Young construction for {lam}, N={N}: rank {rank} != dimension {expected}")
    basis = u[:, :rank].astype(complex)

    gens = np.zeros((N, N, rank, rank), dtype=complex)
    eye_n = np.eye(N)
    for i in range(N):
        for j in range(N):
            e_ij = np.zeros((N, N))
            e_ij[i, j] = 1.0
            full = np.zeros((big, big))
            for slot in range(d):
                factors = [eye_n] * d
                factors[slot] = e_ij
                full += _kron_all(factors)
            gens[i, j] = basis.conj().T @ full @ basis

    def group(g: np.ndarray) -> np.ndarray:
        g = np.asarray(g, dtype=complex)
        return basis.conj().T @ _kron_all([g] * d) @ basis

    labels = tuple(tuple(np.round(basis[:, a], 12)) for a in range(rank))
    return RepSpace(N, f"Young{lam}", labels, gens, group)


def _kron_all(factors) -> np.ndarray:
    out = np.ones((1, 1))
    for f in factors:
        out = np.kron(out, f)
    return out


def defining_rep(N: int) -> RepSpace:
    return sym_rep(N, 1)


def schur_rep(N: int, lam: Partition) -> RepSpace:
    """Preferred construction for ``lam``: Sym or Lambda when possible, else Young."""
    lam = as_partition(lam)
    if len(lam) <= 1:
        return sym_rep(N, lam[0] if lam else 0)
    if all(p == 1 for p in lam):
        return wedge_rep(N, len(lam))
    return young_rep(N, lam)


def commutator_residual(rep: RepSpace) -> float:
    """Largest violation of the gl(N) commutation relations."""
    N = rep.N
    worst = 0.0
    for i, j, k, l in itertools.product(range(1, N + 1), repeat=4):
        lhs = rep.gen(i, j) @ rep.gen(k, l) - rep.gen(k, l) @ rep.gen(i, j)
        rhs = (j == k) * rep.gen(i, l) - (l == i) * rep.gen(k, j)
        worst = max(worst, float(np.abs(lhs - rhs).max()) if rep.dim else 0.0)
    return worst


__all__ = [
    "RepSpace",
    "RepresentationError",
    "sym_rep",
    "wedge_rep",
    "young_rep",
    "schur_rep",
    "defining_rep",
    "hook_content_dimension",
    "commutator_residual",
]
