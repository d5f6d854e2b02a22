"""R-matrices, monodromy products and transfer operators on ``(C^N)^{⊗n}``.

Operators are dense ``N**n x N**n`` matrices; multi-index ``(i_1, ..., i_n)``
is flattened with slot 1 most significant.  In exact mode every scalar is a
Gaussian rational and operators are ``object`` arrays.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from . import scalars
from .combinatorics import Partition, as_partition
from .repn import RepSpace, schur_rep, sym_rep, wedge_rep

POLE_TOLERANCE = 1e-10


class PoleError(ValueError):
    """Spectral parameter too close to an inhomogeneity."""


@dataclass(frozen=True, eq=False)
class ChainContext:
    """Chain data: site dimension, inhomogeneities and twist matrix."""

    N: int
    a: tuple
    g: np.ndarray
    seed: int | None = None
    exact: bool = False

    def __post_init__(self):
        g = np.asarray(self.g, dtype=object if self.exact else complex)
        if self.exact:
            g = scalars.exact_array(g)
            object.__setattr__(self, "a", tuple(scalars.exact(x) for x in self.a))
        else:
            object.__setattr__(self, "a", tuple(complex(x) for x in self.a))
        if g.shape != (self.N, self.N):
            raise ValueError(f"twist must be {self.N}x{self.N}")
        if abs(np.linalg.det(scalars.as_complex_array(g))) <= 1e-12:
            raise ValueError("twist matrix is singular")
        object.__setattr__(self, "g", g)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def size(self) -> int:
        return self.N**self.n

    @classmethod
    def diagonal(cls, N, a, eigenvalues, **kw) -> "ChainContext":
        eig = list(eigenvalues)[:N]
        g = np.zeros((N, N), dtype=object if kw.get("exact") else complex)
        for i, x in enumerate(eig):
            g[i, i] = x
        return cls(N, tuple(a), g, **kw)

    def identity(self) -> np.ndarray:
        return scalars.identity(self.size, self.exact)

    def zero(self) -> np.ndarray:
        return scalars.zeros((self.size, self.size), self.exact)

    def scalar(self, z):
        return scalars.exact(z) if self.exact else complex(z)


def random_context(N: int, n: int, rng: np.random.Generator, seed=None) -> ChainContext:
    """Inhomogeneities in the annulus ``1 <= |z| <= 3``, diagonal twist eigenvalues in ``0.5 <= |z| <= 2``."""
    a = annulus(rng, n, 1.0, 3.0)
    eig = annulus(rng, N, 0.5, 2.0)
    return ChainContext.diagonal(N, a, eig, seed=seed)


def annulus(rng: np.random.Generator, count: int, rmin: float, rmax: float) -> list[complex]:
    r = rng.uniform(rmin, rmax, size=count)
    phi = rng.uniform(0.0, 2 * np.pi, size=count)
    return [complex(x) for x in r * np.exp(1j * phi)]


def _check_poles(ctx: ChainContext, u) -> None:
    for ai in ctx.a:
        if abs(scalars.to_complex(u - ai)) < POLE_TOLERANCE:
            raise PoleError(f"u={scalars.to_complex(u)} hits the pole a={scalars.to_complex(ai)}")


def _lax_tensor(rep: RepSpace, coeff, exact: bool) -> np.ndarray:
    """``L[a, b, p, q]`` of ``Id + coeff * sum_pq gen(q, p) ⊗ E_pq`` as an aux-matrix of site operators."""
    N, dim = rep.N, rep.dim
    gens = rep.gens.astype(object) if exact else rep.gens.astype(complex)
    lax = gens.transpose(2, 3, 1, 0) * coeff
    one = scalars.identity(1, exact)[0, 0]
    for a in range(dim):
        for p in range(N):
            lax[a, a, p, p] = lax[a, a, p, p] + one
    return lax


def transfer_direct(rep: RepSpace, ctx: ChainContext, u) -> np.ndarray:
    """Trace over the auxiliary space of ``R_01(u-a_1) ... R_0n(u-a_n) (rep(g) ⊗ Id)``."""
    if rep.N != ctx.N:
        raise ValueError("representation and chain have different N")
    u = ctx.scalar(u)
    _check_poles(ctx, u)
    exact = ctx.exact
    dim, N = rep.dim, ctx.N
    mono = scalars.zeros((dim, dim, 1, 1), exact)
    one = scalars.identity(1, exact)[0, 0]
    for a in range(dim):
        mono[a, a, 0, 0] = one
    for ai in ctx.a:
        lax = _lax_tensor(rep, one / (u - ai), exact)
        mono = np.einsum("abxz,bcyw->acxyzw", mono, lax)
        side = mono.shape[2] * N
        mono = mono.reshape(dim, dim, side, side)
    twist = rep.group(ctx.g)
    return np.einsum("abxy,ba->xy", mono, twist)


def transfer_for(lam: Partition, ctx: ChainContext, u) -> np.ndarray:
    """``T_lambda(u)`` by direct trace, zero when ``lambda`` has more than N rows."""
    lam = as_partition(lam)
    if len(lam) > ctx.N:
        return ctx.zero()
    return transfer_direct(schur_rep(ctx.N, lam), ctx, u)


@dataclass(eq=False)
class TransferFamily:
    """Memoized ``h_k(u0 + s)`` and ``e_k(u0 + s)`` for one chain context."""

    context: ChainContext
    u0: complex
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        self.u0 = self.context.scalar(self.u0)

    @property
    def exact(self) -> bool:
        return self.context.exact

    def argument(self, s: int):
        return self.u0 + s

    def _memo(self, key, build):
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = build()
        value.setflags(write=False)
        with self._lock:
            return self._cache.setdefault(key, value)

    def h(self, k: int, s: int) -> np.ndarray | None:
        """``h_k(u0 + s)``; ``None`` stands for the zero operator."""
        if k < 0:
            return None
        if k == 0:
            return self._memo(("id",), self.context.identity)
        return self._memo(("h", k, s), lambda: transfer_direct(sym_rep(self.context.N, k), self.context, self.argument(s)))

    def e(self, k: int, s: int) -> np.ndarray | None:
        if k < 0 or k > self.context.N:
            return None
        if k == 0:
            return self._memo(("id",), self.context.identity)
        return self._memo(("e", k, s), lambda: transfer_direct(wedge_rep(self.context.N, k), self.context, self.argument(s)))

    def cached_keys(self) -> list:
        with self._lock:
            return sorted(self._cache, key=repr)


def h_op(family: TransferFamily, k: int, s: int) -> np.ndarray:
    """``h_k(u0 + s)`` as a matrix (zero for ``k < 0``, identity for ``k == 0``)."""
    out = family.h(k, s)
    return family.context.zero() if out is None else out


def e_direct(family: TransferFamily, k: int, s: int) -> np.ndarray:
    """``e_k(u0 + s)``: the trace over ``Lambda^k C^N``; zero outside ``0..N``."""
    out = family.e(k, s)
    return family.context.zero() if out is None else out


def operator_to_json(op: np.ndarray) -> list:
    """Row-major flat list of ``[re, im]`` pairs."""
    return [[z.real, z.imag] for z in scalars.as_complex_array(op).ravel()]
