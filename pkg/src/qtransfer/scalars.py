"""Scalar fields: double-precision complex or exact Gaussian rationals.

Exact arrays are numpy ``object`` arrays holding ``QQ_I`` elements (sympy's
Gaussian rational field); never test them with ``== 0``, use truthiness.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Number

import numpy as np
from sympy.polys.domains import QQ_I


def exact(z) -> object:
    """Convert ``z`` to a Gaussian rational.

    Accepts ints, Fractions, decimal strings, ``(re, im)`` pairs and complex
    numbers whose parts are exactly representable binary fractions.
    """
    if isinstance(z, tuple):
        re, im = z
        return QQ_I(Fraction(str(re)) if isinstance(re, str) else Fraction(re),
                    Fraction(str(im)) if isinstance(im, str) else Fraction(im))
    if isinstance(z, str):
        return QQ_I(Fraction(z), 0)
    if isinstance(z, complex):
        return QQ_I(Fraction(z.real), Fraction(z.imag))
    if isinstance(z, (int, Fraction)):
        return QQ_I(Fraction(z), 0)
    if isinstance(z, Number):
        return QQ_I(Fraction(float(z)), 0)
    return QQ_I.convert(z)


def to_complex(z) -> complex:
    if hasattr(z, "x") and hasattr(z, "y"):
        return complex(float(z.x), float(z.y))
    return complex(z)


def as_complex_array(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        return np.vectorize(to_complex, otypes=[complex])(a)
    return np.asarray(a, dtype=complex)


def norm(a: np.ndarray) -> float:
    """Frobenius norm; works for exact object arrays too."""
    return float(np.linalg.norm(as_complex_array(np.asarray(a))))


def is_exactly_zero(a: np.ndarray) -> bool:
    return not any(bool(x) for x in np.asarray(a).flat)


def identity(n: int, exact_mode: bool = False) -> np.ndarray:
    if exact_mode:
        out = np.full((n, n), QQ_I.zero, dtype=object)
        for i in range(n):
            out[i, i] = QQ_I.one
        return out
    return np.eye(n, dtype=complex)


def zeros(shape, exact_mode: bool = False) -> np.ndarray:
    if exact_mode:
        return np.full(shape, QQ_I.zero, dtype=object)
    return np.zeros(shape, dtype=complex)


def exact_array(a) -> np.ndarray:
    a = np.asarray(a, dtype=object)
    return np.vectorize(exact, otypes=[object])(a) if a.size else a


def relative_residual(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """``(absolute, relative)`` Frobenius residual of ``a - b``."""
    diff = np.asarray(a) - np.asarray(b)
    absolute = norm(diff)
    scale = max(norm(a), norm(b))
    return absolute, (absolute / scale if scale > 0 else absolute)
