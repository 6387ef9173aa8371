"""Scalar machinery shared by every other module.

Two scalar kinds are supported and never mixed within one call:

* float mode: ``float`` / ``numpy.float64`` values, log-gamma based;
* exact mode: :class:`fractions.Fraction` values (integers are accepted and
  promoted), used by the exact oracles.

All densities are assembled in log space from ``gammaln`` and exponentiated
last.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Integral, Rational
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gammaln

ExactRational = Fraction

__all__ = [
    "ExactRational",
    "is_exact",
    "is_exact_vector",
    "as_exact",
    "as_exact_vector",
    "parse_rational",
    "format_rational",
    "positive_vector",
    "multi_index",
    "rising_factorial",
    "log_normalizer",
    "log_gamma_ratio",
    "dirichlet_moment",
    "multinomial_coefficient",
    "compositions",
]


def is_exact(value) -> bool:
    """True for ``int``/``Fraction`` scalars (but not ``bool``)."""
    return isinstance(value, Rational) and not isinstance(value, bool)


def is_exact_vector(values: Iterable) -> bool:
    return all(is_exact(v) for v in values)


def as_exact(value) -> Fraction:
    """Convert to ``Fraction``.

    Floats are read through their shortest decimal representation, so
    ``0.4`` becomes ``2/5`` rather than the nearest binary fraction.
    Strings may be ``"p/q"``, integers or decimals.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise ValueError(f"cannot convert non-finite value {value!r} to a rational")
        return Fraction(repr(float(value)))
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def as_exact_vector(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(as_exact(v) for v in values)


def parse_rational(text: str) -> Fraction:
    """Parse the ``"p/q"`` wire format (``q`` may be omitted)."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational {text!r}") from exc


def format_rational(value: Fraction) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def positive_vector(values, *, min_length: int = 2, name: str = "alpha") -> tuple:
    """Validate a positive parameter vector and return it as a tuple.

    Exact inputs (all ``int``/``Fraction``) stay exact, everything else is
    converted to ``float``.
    """
    vals = list(values)
    if len(vals) < min_length:
        raise ValueError(f"{name} must have at least {min_length} entries, got {len(vals)}")
    if is_exact_vector(vals):
        out = tuple(Fraction(v) for v in vals)
    else:
        out = tuple(float(v) for v in vals)
        if not all(math.isfinite(v) for v in out):
            raise ValueError(f"{name} has non-finite entries: {out}")
    if not all(v > 0 for v in out):
        raise ValueError(f"{name} entries must be strictly positive: {vals}")
    return out


def multi_index(values, length: int | None = None) -> tuple[int, ...]:
    out = []
    for v in values:
        if isinstance(v, bool) or int(v) != v:
            raise ValueError(f"multi-index entries must be integers, got {v!r}")
        if v < 0:
            raise ValueError(f"multi-index entries must be nonnegative, got {v!r}")
        out.append(int(v))
    if length is not None and len(out) != length:
        raise ValueError(f"multi-index length {len(out)} does not match dimension {length}")
    return tuple(out)


def rising_factorial(v, n: int):
    """Rising factorial ``(v)_n = v (v+1) ... (v+n-1)``.

    Exact for ``int``/``Fraction`` input. In float mode an ``OverflowError``
    is raised when the product leaves the double range.
    """
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    n = int(n)
    if is_exact(v):
        result = Fraction(1)
        v = Fraction(v)
        for k in range(n):
            result *= v + k
        return result
    v = float(v)
    result = 1.0
    for k in range(n):
        result *= v + k
    if not math.isfinite(result):
        raise OverflowError(f"rising factorial ({v})_{n} overflows float range")
    return result


def log_normalizer(alpha) -> float:
    """``log c(alpha) = log Gamma(alpha_+) - sum_j log Gamma(alpha_j)``."""
    a = np.asarray([float(v) for v in positive_vector(alpha)])
    return float(gammaln(a.sum()) - gammaln(a).sum())


def log_gamma_ratio(x: float, n: int) -> float:
    """``log Gamma(x + n) - log Gamma(x)``, i.e. ``log (x)_n`` for x > 0."""
    return float(gammaln(x + n) - gammaln(x))


def dirichlet_moment(alpha: Sequence, m: Sequence[int]) -> Fraction:
    """Exact mixed moment ``E[x^m]`` under ``Dir(alpha)`` for rational alpha.

    Equals ``prod_j (alpha_j)_{m_j} / (alpha_+)_{|m|}``.
    """
    a = positive_vector(alpha)
    if not is_exact_vector(a):
        raise TypeError("dirichlet_moment requires rational alpha")
    mm = multi_index(m)
    if len(mm) != len(a):
        raise ValueError(f"dimension mismatch: alpha has {len(a)} entries, m has {len(mm)}")
    num = Fraction(1)
    for aj, mj in zip(a, mm):
        num *= rising_factorial(aj, mj)
    return num / rising_factorial(sum(a), sum(mm))


def multinomial_coefficient(counts: Sequence[int]) -> int:
    """``|k|! / prod k_j!`` for a nonnegative integer vector."""
    total = 0
    result = 1
    for k in counts:
        total += k
        result *= math.comb(total, k)
    return result


def compositions(total: int, parts: int):
    """Yield every nonnegative integer vector of length ``parts`` summing to ``total``.

    Order is lexicographically decreasing in the first coordinate.
    """
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest
