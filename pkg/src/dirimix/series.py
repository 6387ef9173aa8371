"""Power-series expansion of inverted Dirichlet kernels near the origin.

With ``u = alpha_{1:J-1} - 1`` and ``Y = sum_j y_j < 1``,

    h_alpha(y) = c(alpha) sum_m (-1)^{|m|} (alpha_+)_{|m|} / m! * y^{u+m},

an absolutely convergent expansion. Grouping by total order ``n = |m|``
collapses the inner sum to ``(-1)^n (alpha_+)_n Y^n / n!`` by the
multinomial theorem.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, FeasibilityError
from .numeric_core import (
    compositions,
    is_exact_vector,
    log_gamma_ratio,
    log_normalizer,
    multi_index,
    positive_vector,
    rising_factorial,
)

INT_TOL = 1e-9
GAP_TOL = 1e-12
MAX_RETRIES = 1000
ROUNDING = 1e-14


@dataclass(frozen=True)
class SeriesTerm:
    exponent: tuple
    coefficient: float

    def __post_init__(self):
        if not math.isfinite(self.coefficient):
            raise ValueError("series coefficient must be finite")


@dataclass(frozen=True)
class Direction:
    """A strictly positive direction separating a finite set of exponents.

    ``exact`` records whether distinctness was checked in exact arithmetic
    or only up to the relative float gap.
    """

    lam: tuple
    seed: int | None = None
    attempts: int = 1
    exact: bool = False

    def __post_init__(self):
        if not self.lam or not all(v > 0 for v in self.lam):
            raise ValueError("direction entries must be strictly positive")

    def __len__(self):
        return len(self.lam)

    def dot(self, w) -> float:
        return sum(float(a) * float(b) for a, b in zip(self.lam, w))


def _alpha(alpha) -> np.ndarray:
    return np.asarray([float(v) for v in positive_vector(alpha)])


def h_series_coeff(alpha, m) -> tuple:
    """Coefficient of ``y^{u+m}`` and the base exponent ``u``.

    Returns ``(coef, u)`` with ``coef = c(alpha) (-1)^{|m|} (alpha_+)_{|m|} / m!``.
    """
    a = _alpha(alpha)
    m = multi_index(m, len(a) - 1)
    n = sum(m)
    try:
        mag = rising_factorial(float(a.sum()), n) / math.prod(math.factorial(k) for k in m)
        coef = (-1) ** n * math.exp(log_normalizer(a)) * mag
    except OverflowError:
        coef = math.nan
    if not math.isfinite(coef) or coef == 0:
        log_mag = log_normalizer(a) + log_gamma_ratio(a.sum(), n) - sum(gammaln(k + 1) for k in m)
        coef = (-1) ** n * math.exp(log_mag)
    return coef, tuple(float(v) - 1.0 for v in a[:-1])


def h_series_terms(alpha, order: int) -> list:
    """Every term of the expansion with ``|m| <= order``, one per multi-index."""
    a = _alpha(alpha)
    d = len(a) - 1
    terms = []
    for n in range(order + 1):
        for m in sorted(compositions(n, d), reverse=True):
            coef, u = h_series_coeff(a, m)
            terms.append(SeriesTerm(tuple(ui + mi for ui, mi in zip(u, m)), coef))
    return terms


def ratio_bound(alpha_plus: float, Y: float, order: int) -> float:
    """Upper bound on ``t_{n+1}/t_n = Y (alpha_+ + n)/(n + 1)`` for all ``n > order``."""
    return Y * max(1.0, (order + alpha_plus) / (order + 1))


def h_series_eval(alpha, y, order: int) -> tuple:
    """Partial sum through total order ``order`` and a rigorous remainder bound.

    The bound dominates the tail by a geometric series with ratio ``q``
    from :func:`ratio_bound` and adds a small allowance for rounding in
    the partial sum.

    Raises
    ------
    DomainError
        If ``Y >= 1/2``.
    FeasibilityError
        If ``q >= 1`` at this order.
    """
    a = _alpha(alpha)
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != len(a) - 1 or np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise DomainError(f"y must be a positive vector of length {len(a) - 1}")
    order = int(order)
    if order < 0:
        raise ValueError("order must be nonnegative")
    Y = float(y.sum())
    if Y >= 0.5:
        raise DomainError(f"series evaluation needs Y < 1/2, got Y = {Y}")
    ap = float(a.sum())
    q = ratio_bound(ap, Y, order)
    if q >= 1:
        raise FeasibilityError(f"ratio bound q = {q} is not below 1 at order {order}")
    log_lead = log_normalizer(a) + float(np.dot(a[:-1] - 1.0, np.log(y)))
    logY = math.log(Y)
    n = np.arange(order + 2)
    log_t = np.array([log_gamma_ratio(ap, k) for k in n]) + n * logY - gammaln(n + 1) + log_lead
    t = np.exp(log_t)
    signs = np.where(n % 2 == 0, 1.0, -1.0)
    partial = t[:-1] * signs[:-1]
    value = float(math.fsum(partial))
    tail = float(t[-1] / (1.0 - q) + ROUNDING * np.sum(t[:-1]))
    return value, tail


# ---------------------------------------------------------------------------
# Separating directions
# ---------------------------------------------------------------------------


def _all_distinct_exact(values) -> bool:
    return len(set(values)) == len(values)


def _all_distinct_float(values) -> bool:
    v = np.sort(np.asarray(values, dtype=float))
    if len(v) < 2:
        return True
    scale = max(1.0, float(np.max(np.abs(v))))
    return bool(np.min(np.diff(v)) > GAP_TOL * scale)


def separating_direction(vectors: Sequence, seed=None, *, max_retries: int = MAX_RETRIES) -> Direction:
    """Draw ``lam > 0`` making every ``<v_i, lam>`` distinct.

    Rational inputs get a rational ``lam`` and exact comparison; float
    inputs require a relative gap above 1e-12.
    """
    vecs = [tuple(v) for v in vectors]
    if not vecs:
        raise ValueError("need at least one vector")
    d = len(vecs[0])
    if any(len(v) != d for v in vecs):
        raise ValueError("vectors have mixed lengths")
    exact = all(is_exact_vector(v) for v in vecs)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    recorded = None if isinstance(seed, np.random.Generator) else seed
    for attempt in range(1, max_retries + 1):
        if exact:
            lam = tuple(Fraction(int(k), 10**6) for k in rng.integers(1, 10**6, size=d))
            values = [sum(Fraction(a) * b for a, b in zip(v, lam)) for v in vecs]
            ok = _all_distinct_exact(values)
        else:
            lam = tuple(float(v) for v in rng.uniform(0.5, 1.5, size=d))
            values = [float(np.dot(np.asarray(v, dtype=float), lam)) for v in vecs]
            ok = _all_distinct_float(values)
        if ok:
            return Direction(lam, recorded, attempt, exact)
    raise FeasibilityError(
        f"no separating direction after {max_retries} draws; input vectors are probably duplicated"
    )


# ---------------------------------------------------------------------------
# Coefficient extraction
# ---------------------------------------------------------------------------


def _lattice_offset(w, u):
    """Return ``m = w - u`` if it is a nonnegative integer vector, else None."""
    m = []
    for wk, uk in zip(w, u):
        diff = wk - uk
        if isinstance(diff, Fraction):
            if diff.denominator != 1 or diff < 0:
                return None
            m.append(int(diff))
        else:
            k = round(float(diff))
            if abs(float(diff) - k) > INT_TOL or k < 0:
                return None
            m.append(k)
    return tuple(m)


def _base_exponent(alpha):
    return tuple(a - 1 for a in alpha[:-1])


def coefficient_terms(params: Sequence, coeffs: Sequence, w) -> list:
    """Per-parameter contributions to the coefficient of ``y^w``.

    Entry i is ``c_i c(alpha_i) (-1)^{|m|} (alpha_+)_{|m|} / m!`` for the
    unique ``m`` with ``u_i + m = w``, or 0 when no such ``m`` exists.
    """
    vecs = [positive_vector(p) for p in params]
    if len(vecs) != len(coeffs):
        raise ValueError("params and coeffs differ in length")
    if len({tuple(v) for v in vecs}) != len(vecs):
        raise ValueError("params must be distinct")
    w = tuple(w)
    out = []
    for alpha, c in zip(vecs, coeffs):
        if len(w) != len(alpha) - 1:
            raise ValueError(f"w must have length {len(alpha) - 1}")
        m = _lattice_offset(w, _base_exponent(alpha))
        if m is None or float(c) == 0:
            out.append(0.0)
            continue
        coef, _ = h_series_coeff(alpha, m)
        out.append(float(c) * coef)
    return out


def coefficient_extract(params: Sequence, coeffs: Sequence, w) -> float:
    """Coefficient ``A_w`` of ``y^w`` in ``sum_i c_i h_{alpha_i}(y)``."""
    return math.fsum(coefficient_terms(params, coeffs, w))


def coefficient_scale(params: Sequence, coeffs: Sequence, w) -> float:
    """Sum of absolute contributions, the natural scale for testing ``A_w = 0``."""
    return math.fsum(abs(t) for t in coefficient_terms(params, coeffs, w))


def lowest_exponents(params: Sequence, direction: Direction, count: int) -> list:
    """The ``count`` smallest exponents of ``union_i (u_i + N_0^{J-1})`` ordered by ``<w, lam>``.

    Exponents are kept exact for rational parameters. Float duplicates are
    merged when they agree to within the integer tolerance.
    """
    bases = [_base_exponent(positive_vector(p)) for p in params]
    if not bases:
        return []
    d = len(bases[0])

    def key(w):
        if all(isinstance(v, Fraction) for v in w):
            return tuple(w)
        return tuple(round(float(v) / INT_TOL) for v in w)

    heap = []
    seen = set()
    for u in bases:
        k = key(u)
        if k not in seen:
            seen.add(k)
            heapq.heappush(heap, (direction.dot(u), k, u))
    out = []
    while heap and len(out) < count:
        _, _, w = heapq.heappop(heap)
        out.append(w)
        for j in range(d):
            nxt = tuple(v + (1 if i == j else 0) for i, v in enumerate(w))
            k = key(nxt)
            if k not in seen:
                seen.add(k)
                heapq.heappush(heap, (direction.dot(nxt), k, nxt))
    return out
