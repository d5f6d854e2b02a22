"""Partitions, integer vectors, straightening and Maya diagrams.

Partitions are plain tuples of positive integers in weakly decreasing order;
integer vectors are arbitrary tuples of ints.  Straightening follows the
``alpha - rho = sigma(lambda - rho)`` rule with ``rho = (0, 1, ..., l-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

Partition = tuple[int, ...]


class SignedPartition(NamedTuple):
    """Result of straightening: ``sign * s_partition``, or zero when sign == 0."""

    sign: int
    partition: Partition | None

    @property
    def is_zero(self) -> bool:
        return self.sign == 0


ZERO = SignedPartition(0, None)


@dataclass(frozen=True, order=True)
class ChargedPartition:
    """Basis label ``z^charge s_partition`` of the charge-graded boson space."""

    charge: int
    partition: Partition = ()

    def __post_init__(self):
        object.__setattr__(self, "partition", as_partition(self.partition))


def as_partition(parts: Sequence[int]) -> Partition:
    """Validate and normalize ``parts`` (trailing zeros dropped)."""
    parts = tuple(int(p) for p in parts)
    while parts and parts[-1] == 0:
        parts = parts[:-1]
    if any(p < 0 for p in parts):
        raise ValueError(f"negative part in {parts}")
    if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
        raise ValueError(f"{parts} is not weakly decreasing")
    return parts


def is_partition(alpha: Sequence[int]) -> bool:
    return all(a >= 0 for a in alpha) and all(
        alpha[i] >= alpha[i + 1] for i in range(len(alpha) - 1)
    )


def weight(lam: Sequence[int]) -> int:
    return sum(lam)


def partitions(n: int, max_length: int | None = None) -> Iterator[Partition]:
    """All partitions of ``n`` in reverse lexicographic order."""

    def rec(rest, largest, prefix):
        if rest == 0:
            yield tuple(prefix)
            return
        if max_length is not None and len(prefix) >= max_length:
            return
        for part in range(min(rest, largest), 0, -1):
            yield from rec(rest - part, part, prefix + [part])

    yield from rec(n, n, [])


def partitions_up_to(n: int, max_length: int | None = None) -> list[Partition]:
    return [lam for k in range(n + 1) for lam in partitions(k, max_length)]


def straighten(alpha: Sequence[int]) -> SignedPartition:
    """Straighten an integer vector into ``±`` a partition, or zero.

    The length of ``alpha`` matters: trailing zeros are kept while shifting by
    ``rho`` and only dropped from the resulting partition.

    >>> straighten((1, 3))
    SignedPartition(sign=-1, partition=(2, 2))
    """
    gamma = [a - i for i, a in enumerate(alpha, start=1)]
    if len(set(gamma)) != len(gamma):
        return ZERO
    inversions = sum(
        1
        for i in range(len(gamma))
        for j in range(i + 1, len(gamma))
        if gamma[i] < gamma[j]
    )
    ordered = sorted(gamma, reverse=True)
    lam = [g + i for i, g in enumerate(ordered, start=1)]
    if any(p < 0 for p in lam):
        return ZERO
    return SignedPartition(-1 if inversions % 2 else 1, as_partition(lam))


def conjugate(lam: Sequence[int]) -> Partition:
    lam = as_partition(lam)
    if not lam:
        return ()
    return tuple(sum(1 for p in lam if p >= j) for j in range(1, lam[0] + 1))


def pad(lam: Sequence[int], length: int) -> tuple[int, ...]:
    if len(lam) > length:
        raise ValueError(f"{tuple(lam)} has more than {length} parts")
    return tuple(lam) + (0,) * (length - len(lam))


@dataclass(frozen=True)
class MayaDiagram:
    """Semi-infinite strictly decreasing sequence ``head + (tail_start, tail_start-1, ...)``."""

    head: tuple[int, ...]
    tail_start: int

    def entries(self, count: int) -> tuple[int, ...]:
        """First ``count`` entries of the sequence."""
        extra = max(0, count - len(self.head))
        tail = tuple(self.tail_start - i for i in range(extra))
        return (self.head + tail)[:count]

    def __post_init__(self):
        seq = self.head + (self.tail_start,)
        if any(seq[i] <= seq[i + 1] for i in range(len(seq) - 1)):
            raise ValueError(f"Maya sequence {seq}... is not strictly decreasing")


def to_maya(c: ChargedPartition) -> MayaDiagram:
    """Indices ``d_i = m - i + 1 + lambda_i`` of the wedge monomial for ``z^m s_lambda``."""
    m, lam = c.charge, c.partition
    head = tuple(m - i + 1 + p for i, p in enumerate(lam, start=1))
    return MayaDiagram(head, m - len(lam))


def from_maya(d: MayaDiagram) -> ChargedPartition:
    m = d.tail_start + len(d.head)
    lam = [x - m + i - 1 for i, x in enumerate(d.head, start=1)]
    return ChargedPartition(m, as_partition(lam))
