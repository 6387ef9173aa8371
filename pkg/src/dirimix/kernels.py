"""Densities and pmfs for the Dirichlet family and the families built on it.

Continuous families are evaluated through :func:`kernel_log_density` on open
domains only: the simplex interior for Dirichlet, generalized Dirichlet and
Beta-Liouville kernels, the positive orthant for the inverted families.
Discrete families (Dirichlet-multinomial, LDA document marginal) have exact
rational evaluators plus float counterparts.

Points can be batched: any array whose last axis holds the coordinates is
accepted, and the result has the leading shape.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import ClassVar, Sequence, Union

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import DomainError, FeasibilityError
from .numeric_core import (
    as_exact,
    compositions,
    dirichlet_moment,
    format_rational,
    is_exact,
    is_exact_vector,
    log_normalizer,
    multi_index,
    multinomial_coefficient,
    positive_vector,
)

SIMPLEX_TOL = 1e-12
BETA_ROW_TOL = 1e-12
LDA_MAX_LENGTH = 8
LDA_MAX_TOPICS = 4

DIRICHLET = "dirichlet"
INVERTED_DIRICHLET = "inverted_dirichlet"
GENERALIZED_DIRICHLET = "generalized_dirichlet"
BETA_LIOUVILLE = "beta_liouville"
INVERTED_BETA_LIOUVILLE = "inverted_beta_liouville"
DIRICHLET_MULTINOMIAL = "dirichlet_multinomial"
LDA_MARGINAL = "lda_marginal"

SIMPLEX_FAMILIES = (DIRICHLET, GENERALIZED_DIRICHLET, BETA_LIOUVILLE)
ORTHANT_FAMILIES = (INVERTED_DIRICHLET, INVERTED_BETA_LIOUVILLE)
CONTINUOUS_FAMILIES = SIMPLEX_FAMILIES + ORTHANT_FAMILIES
DISCRETE_FAMILIES = (DIRICHLET_MULTINOMIAL, LDA_MARGINAL)
FAMILIES = CONTINUOUS_FAMILIES + DISCRETE_FAMILIES

_ALIASES = {
    "dir": DIRICHLET,
    "id": INVERTED_DIRICHLET,
    "inverted-dirichlet": INVERTED_DIRICHLET,
    "gd": GENERALIZED_DIRICHLET,
    "generalized-dirichlet": GENERALIZED_DIRICHLET,
    "bl": BETA_LIOUVILLE,
    "beta-liouville": BETA_LIOUVILLE,
    "ibl": INVERTED_BETA_LIOUVILLE,
    "inverted-beta-liouville": INVERTED_BETA_LIOUVILLE,
    "dm": DIRICHLET_MULTINOMIAL,
    "dirichlet-multinomial": DIRICHLET_MULTINOMIAL,
    "lda": LDA_MARGINAL,
    "lda-marginal": LDA_MARGINAL,
}


def family_tag(name: str) -> str:
    """Normalize a family name or short alias to its canonical tag."""
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in FAMILIES:
        raise ValueError(f"unknown kernel family {name!r}")
    return key


# ---------------------------------------------------------------------------
# Points
# ---------------------------------------------------------------------------


class SimplexPoint:
    """Point(s) of the open simplex interior.

    Built from the first J-1 coordinates (each > 0, sum < 1 strictly) or,
    through :meth:`from_full`, from all J coordinates. ``x`` holds the full
    coordinates with shape ``(..., J)``.
    """

    __slots__ = ("x",)

    def __init__(self, coords):
        c = np.asarray(coords, dtype=float)
        if c.ndim == 0 or c.shape[-1] < 1:
            raise DomainError("a simplex point needs at least one free coordinate")
        if not np.all(np.isfinite(c)) or np.any(c <= 0):
            raise DomainError("simplex coordinates must be finite and strictly positive")
        last = 1.0 - c.sum(axis=-1)
        if np.any(last <= 0):
            raise DomainError("free simplex coordinates must sum to strictly less than 1")
        self.x = np.concatenate([c, last[..., None]], axis=-1)

    @classmethod
    def from_full(cls, x) -> "SimplexPoint":
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[-1] < 2:
            raise DomainError("a full simplex point needs at least two coordinates")
        if not np.all(np.isfinite(x)) or np.any(x <= 0):
            raise DomainError("simplex coordinates must be finite and strictly positive")
        if np.any(np.abs(x.sum(axis=-1) - 1.0) > SIMPLEX_TOL):
            raise DomainError("simplex coordinates must sum to 1 (tolerance 1e-12)")
        obj = cls.__new__(cls)
        obj.x = x
        return obj

    @property
    def J(self) -> int:
        return self.x.shape[-1]

    @property
    def coords(self) -> np.ndarray:
        return self.x[..., :-1]

    def __repr__(self) -> str:
        return f"SimplexPoint({self.x!r})"


def as_simplex_point(point, J: int) -> SimplexPoint:
    """Coerce ``point`` (SimplexPoint, J full or J-1 free coordinates)."""
    if isinstance(point, SimplexPoint):
        if point.J != J:
            raise ValueError(f"point has dimension {point.J}, kernel expects {J}")
        return point
    arr = np.asarray(point, dtype=float)
    if arr.ndim == 0:
        arr = arr[None]
    if arr.shape[-1] == J:
        return SimplexPoint.from_full(arr)
    if arr.shape[-1] == J - 1:
        return SimplexPoint(arr)
    raise ValueError(f"expected {J} or {J - 1} coordinates, got {arr.shape[-1]}")


def as_orthant_point(point, d: int) -> np.ndarray:
    y = np.asarray(getattr(point, "y", point), dtype=float)
    if y.ndim == 0:
        y = y[None]
    if y.shape[-1] != d:
        raise ValueError(f"expected {d} orthant coordinates, got {y.shape[-1]}")
    if not np.all(np.isfinite(y)) or np.any(y <= 0):
        raise DomainError("orthant coordinates must be finite and strictly positive")
    return y


# ---------------------------------------------------------------------------
# Kernel specifications
# ---------------------------------------------------------------------------


def _scalar(value, name):
    if is_exact(value):
        value = Fraction(value)
    else:
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite")
    if value <= 0:
        raise ValueError(f"{name} must be strictly positive, got {value}")
    return value


def _json_num(v):
    return format_rational(v) if isinstance(v, Fraction) else float(v)


def _json_vec(vs):
    return [_json_num(v) for v in vs]


def _read_num(v, exact):
    if exact:
        return as_exact(v)
    return float(as_exact(v)) if isinstance(v, str) else float(v)


def _read_vec(vs, exact):
    return [_read_num(v, exact) for v in vs]


@dataclass(frozen=True)
class Dirichlet:
    alpha: tuple

    family: ClassVar[str] = DIRICHLET

    def __post_init__(self):
        object.__setattr__(self, "alpha", positive_vector(self.alpha))

    @property
    def J(self) -> int:
        return len(self.alpha)

    def to_vector(self) -> tuple:
        return self.alpha


@dataclass(frozen=True)
class InvertedDirichlet:
    """Inverted Dirichlet kernel on the positive orthant of dimension J-1."""

    alpha: tuple

    family: ClassVar[str] = INVERTED_DIRICHLET

    def __post_init__(self):
        object.__setattr__(self, "alpha", positive_vector(self.alpha))

    @property
    def J(self) -> int:
        return len(self.alpha)

    def to_vector(self) -> tuple:
        return self.alpha


@dataclass(frozen=True)
class GeneralizedDirichlet:
    """Connor-Mosimann generalized Dirichlet kernel; ``a`` and ``b`` have length J-1."""

    a: tuple
    b: tuple

    family: ClassVar[str] = GENERALIZED_DIRICHLET

    def __post_init__(self):
        a = positive_vector(self.a, min_length=1, name="a")
        b = positive_vector(self.b, min_length=1, name="b")
        if len(a) != len(b):
            raise ValueError("a and b must have equal length")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def J(self) -> int:
        return len(self.a) + 1

    @property
    def gamma(self) -> tuple:
        """Exponents of the running remainders ``1 - x_1 - ... - x_j``."""
        a, b = self.a, self.b
        g = [b[j] - a[j + 1] - b[j + 1] for j in range(len(a) - 1)]
        g.append(b[-1] - 1)
        return tuple(g)

    def to_vector(self) -> tuple:
        return self.a + self.b


@dataclass(frozen=True)
class BetaLiouville:
    a_vec: tuple
    a: object
    b: object

    family: ClassVar[str] = BETA_LIOUVILLE

    def __post_init__(self):
        object.__setattr__(self, "a_vec", positive_vector(self.a_vec, min_length=1, name="a_vec"))
        object.__setattr__(self, "a", _scalar(self.a, "a"))
        object.__setattr__(self, "b", _scalar(self.b, "b"))

    @property
    def J(self) -> int:
        return len(self.a_vec) + 1

    def to_vector(self) -> tuple:
        return self.a_vec + (self.a, self.b)


@dataclass(frozen=True)
class InvertedBetaLiouville:
    a_vec: tuple
    a: object
    b: object
    lam: object

    family: ClassVar[str] = INVERTED_BETA_LIOUVILLE

    def __post_init__(self):
        object.__setattr__(self, "a_vec", positive_vector(self.a_vec, min_length=1, name="a_vec"))
        object.__setattr__(self, "a", _scalar(self.a, "a"))
        object.__setattr__(self, "b", _scalar(self.b, "b"))
        object.__setattr__(self, "lam", _scalar(self.lam, "lambda"))

    @property
    def J(self) -> int:
        return len(self.a_vec) + 1

    def to_vector(self) -> tuple:
        return self.a_vec + (self.a, self.b, self.lam)


@dataclass(frozen=True)
class DirichletMultinomial:
    n: int
    alpha: tuple

    family: ClassVar[str] = DIRICHLET_MULTINOMIAL

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 0:
            raise ValueError(f"n must be a nonnegative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "alpha", positive_vector(self.alpha))

    @property
    def J(self) -> int:
        return len(self.alpha)

    def to_vector(self) -> tuple:
        return self.alpha


@dataclass(frozen=True)
class LDAMarginal:
    """Document marginal of LDA with fixed topic matrix ``beta`` (K x V).

    ``document`` holds 1-based word indices.
    """

    alpha: tuple
    beta: tuple
    document: tuple

    family: ClassVar[str] = LDA_MARGINAL

    def __post_init__(self):
        alpha = positive_vector(self.alpha)
        beta = topic_matrix(self.beta, exact=is_exact_vector(alpha))
        if len(beta) != len(alpha):
            raise ValueError(f"beta has {len(beta)} rows but alpha has {len(alpha)} topics")
        doc = check_document(self.document, len(beta[0]))
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "document", doc)

    @property
    def J(self) -> int:
        return len(self.alpha)

    @property
    def K(self) -> int:
        return len(self.alpha)

    @property
    def V(self) -> int:
        return len(self.beta[0])

    def to_vector(self) -> tuple:
        return self.alpha


KernelSpec = Union[
    Dirichlet,
    InvertedDirichlet,
    GeneralizedDirichlet,
    BetaLiouville,
    InvertedBetaLiouville,
    DirichletMultinomial,
    LDAMarginal,
]


def topic_matrix(beta, *, exact: bool) -> tuple:
    """Validate a row-stochastic topic matrix.

    Exact rows must sum to 1 exactly. Float rows within 1e-12 of 1 are
    renormalized; anything further off is rejected.
    """
    rows = [list(r) for r in beta]
    if not rows or not rows[0]:
        raise ValueError("beta must be a non-empty matrix")
    V = len(rows[0])
    if any(len(r) != V for r in rows):
        raise ValueError("beta rows must all have the same length")
    out = []
    for k, row in enumerate(rows):
        if exact:
            vals = [as_exact(v) for v in row]
            if any(v < 0 for v in vals):
                raise ValueError(f"beta row {k + 1} has negative entries")
            if sum(vals) != 1:
                raise ValueError(f"beta row {k + 1} sums to {sum(vals)}, not exactly 1")
            out.append(tuple(vals))
        else:
            vals = np.asarray([float(as_exact(v)) if isinstance(v, str) else float(v) for v in row])
            if np.any(vals < 0) or not np.all(np.isfinite(vals)):
                raise ValueError(f"beta row {k + 1} has negative or non-finite entries")
            s = math.fsum(vals)
            if abs(s - 1.0) > BETA_ROW_TOL:
                raise ValueError(f"beta row {k + 1} sums to {s!r}, outside 1e-12 of 1")
            out.append(tuple(float(v) for v in vals / s))
    return tuple(out)


def check_document(document, V: int) -> tuple[int, ...]:
    doc = tuple(int(w) for w in document)
    if any(w < 1 or w > V for w in doc):
        raise ValueError(f"document word indices must lie in 1..{V}: {doc}")
    return doc


def kernel_from_vector(family: str, vec: Sequence, **context) -> KernelSpec:
    """Rebuild a kernel from its flattened parameter vector.

    The flattened layouts are ``alpha`` for the Dirichlet-type families,
    ``a + b`` for GD, ``a_vec + (a, b)`` for BL and ``a_vec + (a, b, lam)``
    for IBL. Discrete families read ``n`` or ``beta``/``document`` from
    ``context``.
    """
    family = family_tag(family)
    vec = tuple(vec)
    if family == DIRICHLET:
        return Dirichlet(vec)
    if family == INVERTED_DIRICHLET:
        return InvertedDirichlet(vec)
    if family == GENERALIZED_DIRICHLET:
        if len(vec) % 2:
            raise ValueError("generalized Dirichlet vector must have even length")
        h = len(vec) // 2
        return GeneralizedDirichlet(vec[:h], vec[h:])
    if family == BETA_LIOUVILLE:
        return BetaLiouville(vec[:-2], vec[-2], vec[-1])
    if family == INVERTED_BETA_LIOUVILLE:
        return InvertedBetaLiouville(vec[:-3], vec[-3], vec[-2], vec[-1])
    if family == DIRICHLET_MULTINOMIAL:
        return DirichletMultinomial(context["n"], vec)
    return LDAMarginal(vec, context["beta"], context.get("document", ()))


def dimension_of(family: str, vec_len: int) -> int:
    """Simplex dimension J implied by a flattened parameter vector length."""
    family = family_tag(family)
    if family == GENERALIZED_DIRICHLET:
        return vec_len // 2 + 1
    if family == BETA_LIOUVILLE:
        return vec_len - 1
    if family == INVERTED_BETA_LIOUVILLE:
        return vec_len - 2
    return vec_len


def kernel_to_json(spec: KernelSpec) -> dict:
    out = {"family": spec.family}
    if isinstance(spec, (Dirichlet, InvertedDirichlet)):
        out["alpha"] = _json_vec(spec.alpha)
    elif isinstance(spec, GeneralizedDirichlet):
        out["a"] = _json_vec(spec.a)
        out["b"] = _json_vec(spec.b)
    elif isinstance(spec, BetaLiouville):
        out.update(a_vec=_json_vec(spec.a_vec), a=_json_num(spec.a), b=_json_num(spec.b))
    elif isinstance(spec, InvertedBetaLiouville):
        out.update(
            a_vec=_json_vec(spec.a_vec),
            a=_json_num(spec.a),
            b=_json_num(spec.b),
            **{"lambda": _json_num(spec.lam)},
        )
    elif isinstance(spec, DirichletMultinomial):
        out.update(n=spec.n, alpha=_json_vec(spec.alpha))
    else:
        out.update(
            alpha=_json_vec(spec.alpha),
            beta=[_json_vec(r) for r in spec.beta],
            document=list(spec.document),
        )
    return out


def kernel_from_json(obj: dict, *, exact: bool | None = None) -> KernelSpec:
    """Parse a KernelSpec JSON object.

    With ``exact=None`` the mode is inferred: string entries mean exact.
    """
    family = family_tag(obj["family"])
    if exact is None:
        exact = any(isinstance(v, str) for v in _flat_values(obj))
    if family in (DIRICHLET, INVERTED_DIRICHLET):
        cls = Dirichlet if family == DIRICHLET else InvertedDirichlet
        return cls(_read_vec(obj["alpha"], exact))
    if family == GENERALIZED_DIRICHLET:
        return GeneralizedDirichlet(_read_vec(obj["a"], exact), _read_vec(obj["b"], exact))
    if family == BETA_LIOUVILLE:
        return BetaLiouville(
            _read_vec(obj["a_vec"], exact), _read_num(obj["a"], exact), _read_num(obj["b"], exact)
        )
    if family == INVERTED_BETA_LIOUVILLE:
        return InvertedBetaLiouville(
            _read_vec(obj["a_vec"], exact),
            _read_num(obj["a"], exact),
            _read_num(obj["b"], exact),
            _read_num(obj["lambda"], exact),
        )
    if family == DIRICHLET_MULTINOMIAL:
        return DirichletMultinomial(int(obj["n"]), _read_vec(obj["alpha"], exact))
    return LDAMarginal(
        _read_vec(obj["alpha"], exact),
        [_read_vec(r, exact) for r in obj["beta"]],
        obj.get("document", []),
    )


def _flat_values(obj):
    for key, v in obj.items():
        if key in ("family", "document", "n"):
            continue
        if isinstance(v, list):
            for item in v:
                if isinstance(item, list):
                    yield from item
                else:
                    yield item
        else:
            yield v


# ---------------------------------------------------------------------------
# Continuous densities
# ---------------------------------------------------------------------------


def _f(v) -> np.ndarray:
    return np.asarray([float(t) for t in v])


def _dirichlet_logpdf(alpha, x: np.ndarray) -> np.ndarray:
    a = _f(alpha)
    return log_normalizer(a) + np.sum((a - 1.0) * np.log(x), axis=-1)


def _inverted_dirichlet_logpdf(alpha, y: np.ndarray) -> np.ndarray:
    a = _f(alpha)
    return (
        log_normalizer(a)
        + np.sum((a[:-1] - 1.0) * np.log(y), axis=-1)
        - a.sum() * np.log1p(y.sum(axis=-1))
    )


def _generalized_dirichlet_logpdf(spec: GeneralizedDirichlet, x: np.ndarray) -> np.ndarray:
    a, b, g = _f(spec.a), _f(spec.b), _f(spec.gamma)
    const = np.sum(gammaln(a + b) - gammaln(a) - gammaln(b))
    # 1 - (x_1 + ... + x_j) taken as the tail sum x_{j+1} + ... + x_J
    tails = np.cumsum(x[..., ::-1], axis=-1)[..., ::-1][..., 1:]
    return const + np.sum((a - 1.0) * np.log(x[..., :-1]) + g * np.log(tails), axis=-1)


def _beta_liouville_logpdf(spec: BetaLiouville, x: np.ndarray) -> np.ndarray:
    av = _f(spec.a_vec)
    a, b = float(spec.a), float(spec.b)
    s = av.sum()
    const = gammaln(a + b) + gammaln(s) - gammaln(a) - gammaln(b) - gammaln(av).sum()
    head = x[..., :-1]
    return (
        const
        + np.sum((av - 1.0) * np.log(head), axis=-1)
        + (a - s) * np.log(head.sum(axis=-1))
        + (b - 1.0) * np.log(x[..., -1])
    )


def _inverted_beta_liouville_logpdf(spec: InvertedBetaLiouville, y: np.ndarray) -> np.ndarray:
    av = _f(spec.a_vec)
    a, b, lam = float(spec.a), float(spec.b), float(spec.lam)
    s = av.sum()
    Y = y.sum(axis=-1)
    const = gammaln(s) + gammaln(a + b) - gammaln(a) - gammaln(b) - gammaln(av).sum()
    return (
        const
        + b * math.log(lam)
        + np.sum((av - 1.0) * np.log(y), axis=-1)
        + (a - s) * np.log(Y)
        - (a + b) * np.log(lam + Y)
    )


def _scalarize(value):
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value


def kernel_log_density(spec: KernelSpec, point):
    """Log-density of a continuous kernel at ``point``.

    Simplex families take a :class:`SimplexPoint` or an array of J (full) or
    J-1 (free) coordinates; inverted families take J-1 positive orthant
    coordinates. Batched input returns an array.
    """
    if isinstance(spec, (DirichletMultinomial, LDAMarginal)):
        raise TypeError(f"{spec.family} is discrete; use dm_pmf_exact / lda_marginal_exact")
    J = spec.J
    if spec.family in SIMPLEX_FAMILIES:
        x = as_simplex_point(point, J).x
        if isinstance(spec, Dirichlet):
            out = _dirichlet_logpdf(spec.alpha, x)
        elif isinstance(spec, GeneralizedDirichlet):
            out = _generalized_dirichlet_logpdf(spec, x)
        else:
            out = _beta_liouville_logpdf(spec, x)
    else:
        y = as_orthant_point(point, J - 1)
        if isinstance(spec, InvertedDirichlet):
            out = _inverted_dirichlet_logpdf(spec.alpha, y)
        else:
            out = _inverted_beta_liouville_logpdf(spec, y)
    return _scalarize(out)


def dirichlet_log_density(alpha, point):
    """Shorthand for ``kernel_log_density(Dirichlet(alpha), point)``."""
    return kernel_log_density(Dirichlet(alpha), point)


def mixture_log_density(G, family: str | None, point):
    """``log sum_k pi_k f_k(point)`` by log-sum-exp over the atoms of ``G``.

    ``G`` is any object with ``atoms`` (pairs of flattened parameter vector
    and weight) and a ``family`` tag; ``family=None`` uses ``G.family``.
    """
    family = family_tag(family or G.family)
    if family in DISCRETE_FAMILIES:
        raise TypeError(f"{family} is discrete; use mixture_pmf_exact")
    logs = []
    weights = []
    for params, weight in G.atoms:
        logs.append(np.asarray(kernel_log_density(kernel_from_vector(family, params), point)))
        weights.append(float(weight))
    stacked = np.stack(logs, axis=0)
    w = np.asarray(weights).reshape((-1,) + (1,) * (stacked.ndim - 1))
    return _scalarize(logsumexp(stacked, axis=0, b=w))


# ---------------------------------------------------------------------------
# Discrete kernels
# ---------------------------------------------------------------------------


def count_vectors(n: int, J: int):
    """All count vectors of length J with total n."""
    return list(compositions(n, J))


def dm_pmf_exact(n: int, alpha, x) -> Fraction:
    """Exact Dirichlet-multinomial probability of the count vector ``x``."""
    a = positive_vector(alpha)
    if not is_exact_vector(a):
        raise TypeError("dm_pmf_exact requires rational alpha")
    xs = multi_index(x, len(a))
    if sum(xs) != n:
        raise ValueError(f"count vector {xs} does not sum to n={n}")
    return multinomial_coefficient(xs) * dirichlet_moment(a, xs)


def dm_log_pmf(n: int, alpha, x) -> float:
    """Float log-pmf of the Dirichlet-multinomial kernel."""
    a = _f(positive_vector(alpha))
    xs = np.asarray(multi_index(x, len(a)), dtype=float)
    if xs.sum() != n:
        raise ValueError(f"count vector does not sum to n={n}")
    return float(
        gammaln(n + 1.0)
        - gammaln(xs + 1.0).sum()
        + gammaln(a + xs).sum()
        - gammaln(a).sum()
        + gammaln(a.sum())
        - gammaln(a.sum() + n)
    )


def _lda_check(K: int, N: int, max_length: int, max_topics: int):
    if N > max_length:
        raise FeasibilityError(
            f"document length {N} exceeds the enumeration cap {max_length} (K^N assignments)"
        )
    if K > max_topics:
        raise FeasibilityError(f"{K} topics exceed the enumeration cap {max_topics}")


def _lda_count_weights(beta, document, K: int) -> dict:
    """Sum of prod_n beta[z_n, w_n] over assignments z, keyed by topic counts."""
    acc: dict = {}
    zero = beta[0][0] * 0
    for z in itertools.product(range(K), repeat=len(document)):
        prod = zero + 1
        for zn, wn in zip(z, document):
            prod *= beta[zn][wn - 1]
            if prod == 0:
                break
        if prod == 0:
            continue
        counts = [0] * K
        for zn in z:
            counts[zn] += 1
        key = tuple(counts)
        acc[key] = acc.get(key, zero) + prod
    return acc


def lda_marginal_exact(
    alpha,
    beta,
    document,
    *,
    max_length: int = LDA_MAX_LENGTH,
    max_topics: int = LDA_MAX_TOPICS,
) -> Fraction:
    """Exact LDA document marginal by enumerating topic assignments."""
    spec = LDAMarginal(alpha, beta, document)
    if not is_exact_vector(spec.alpha):
        raise TypeError("lda_marginal_exact requires rational alpha and beta")
    _lda_check(spec.K, len(spec.document), max_length, max_topics)
    total = Fraction(0)
    for counts, weight in _lda_count_weights(spec.beta, spec.document, spec.K).items():
        total += weight * dirichlet_moment(spec.alpha, counts)
    return total


def lda_marginal(
    alpha,
    beta,
    document,
    *,
    max_length: int = LDA_MAX_LENGTH,
    max_topics: int = LDA_MAX_TOPICS,
) -> float:
    """Float counterpart of :func:`lda_marginal_exact`."""
    a = tuple(float(v) for v in positive_vector(alpha))
    spec = LDAMarginal(a, beta, document)
    _lda_check(spec.K, len(spec.document), max_length, max_topics)
    a_arr = np.asarray(a)
    total = 0.0
    for counts, weight in _lda_count_weights(spec.beta, spec.document, spec.K).items():
        c = np.asarray(counts, dtype=float)
        log_moment = (gammaln(a_arr + c) - gammaln(a_arr)).sum() - (
            gammaln(a_arr.sum() + c.sum()) - gammaln(a_arr.sum())
        )
        total += weight * math.exp(log_moment)
    return total


def mixture_pmf_exact(G, point, **context) -> Fraction:
    """Exact mixture pmf for the discrete families (rational atoms)."""
    family = family_tag(G.family)
    total = Fraction(0)
    for params, weight in G.atoms:
        if family == DIRICHLET_MULTINOMIAL:
            total += weight * dm_pmf_exact(context["n"], params, point)
        elif family == LDA_MARGINAL:
            total += weight * lda_marginal_exact(params, context["beta"], point)
        else:
            raise TypeError(f"{family} is continuous; use mixture_log_density")
    return total


def mixture_pmf(G, point, **context) -> float:
    family = family_tag(G.family)
    total = 0.0
    for params, weight in G.atoms:
        if family == DIRICHLET_MULTINOMIAL:
            total += float(weight) * math.exp(dm_log_pmf(context["n"], params, point))
        elif family == LDA_MARGINAL:
            total += float(weight) * lda_marginal(params, context["beta"], point)
        else:
            raise TypeError(f"{family} is continuous; use mixture_log_density")
    return total
