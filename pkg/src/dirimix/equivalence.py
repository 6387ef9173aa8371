"""Deciding equality of mixture densities and certifying identifiable regimes.

Three independent routes decide whether ``m_G = m_G'``:

* exact polynomial: rational atoms are reduced to simplex polynomial
  identities and tested by degree elevation;
* closed-form L2: when every pair of atoms satisfies ``alpha_j + beta_j > 1``
  the squared L2 distance is a finite sum of gamma-function ratios;
* Monte Carlo: relative discrepancy under a Dirichlet reference. It can
  refute equality but never certify it.

Discrete kernels are decided by enumerating their finite support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import ClassVar, Sequence

import mpmath
import numpy as np

from . import kernels as K
from .errors import AmbiguityError, FeasibilityError
from .exactpoly import DEFAULT_EPS_INT, congruence_partition, degree_elevate, is_null_relation, relation_from_measures, sign_counts
from .kernels import kernel_log_density
from .numeric_core import (
    compositions,
    format_rational,
    is_exact_vector,
    log_normalizer,
    parse_rational,
    positive_vector,
)
from .witnesses import ATOM_TOL, MixingMeasure, pullback, source_family

EQUAL = "equal"
NOT_EQUAL = "not_equal"
INCONCLUSIVE = "inconclusive"
VERDICTS = (EQUAL, NOT_EQUAL, INCONCLUSIVE)

EXACT_POLYNOMIAL = "exact_polynomial"
CLOSED_FORM_L2 = "closed_form_l2"
MONTE_CARLO = "monte_carlo"
ENUMERATION = "enumeration"
METHODS = (EXACT_POLYNOMIAL, CLOSED_FORM_L2, MONTE_CARLO, ENUMERATION)

L2_TOL = 1e-10
CLAMP_TOL = 1e-12
RANK_TOL = 1e-10
SLICE_TOL = 1e-12
ENUM_TOL = 1e-12
MC_SAMPLES = 100_000
MC_CHUNK = 10_000
MP_DPS = 40


@dataclass(frozen=True)
class RelationCertificate:
    """Outcome of :func:`decide_equality`.

    ``residual`` is an exact ``Fraction`` on the exact paths and a float
    otherwise. ``details`` records method-specific evidence.
    """

    verdict: str
    method: str
    residual: object
    sign_counts: tuple | None = None
    details: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.residual < 0:
            raise ValueError("residual must be nonnegative")
        if self.method == EXACT_POLYNOMIAL and self.verdict == EQUAL and self.residual != 0:
            raise ValueError("an exact Equal verdict needs residual exactly 0")
        if self.method == MONTE_CARLO and self.verdict == EQUAL:
            raise ValueError("Monte Carlo cannot certify equality")

    @property
    def equal(self) -> bool:
        return self.verdict == EQUAL

    def to_json(self) -> dict:
        r = self.residual
        out = {
            "verdict": self.verdict,
            "method": self.method,
            "residual": format_rational(r) if isinstance(r, (Fraction, int)) else float(r),
            "sign_counts": list(self.sign_counts) if self.sign_counts is not None else None,
        }
        if self.details:
            out["details"] = self.details
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "RelationCertificate":
        r = obj["residual"]
        residual = parse_rational(r) if isinstance(r, str) else float(r)
        sc = obj.get("sign_counts")
        return cls(
            obj["verdict"],
            obj["method"],
            residual,
            tuple(sc) if sc is not None else None,
            obj.get("details", {}),
        )


# ---------------------------------------------------------------------------
# Identifiability certificates
# ---------------------------------------------------------------------------


def _totals_equal(params) -> bool:
    totals = [sum(p) for p in params]
    if all(is_exact_vector(p) for p in params):
        return len(set(totals)) == 1
    t = [float(v) for v in totals]
    ref = max(abs(v) for v in t)
    return max(t) - min(t) <= SLICE_TOL * ref


def _spreads(params, baseline: int) -> list:
    J = len(params[0])
    out = []
    for k in range(J):
        if k == baseline - 1:
            continue
        col = [p[k] for p in params]
        out.append((min(col), max(col)))
    return out


@dataclass(frozen=True)
class IdentifiabilityCertificate:
    """Base class: a regime on which finite Dirichlet mixtures are identifiable."""

    regime: ClassVar[str] = ""

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class FixedTotalSlice(IdentifiabilityCertificate):
    """All atoms share the total ``A = alpha_+``."""

    A: object
    params: tuple = field(repr=False)
    regime: ClassVar[str] = "fixed_total_slice"

    def __post_init__(self):
        if not self.params or not _totals_equal(self.params):
            raise ValueError("atoms do not share one total")

    def to_json(self) -> dict:
        A = format_rational(self.A) if isinstance(self.A, Fraction) else float(self.A)
        return {"regime": self.regime, "A": A}


@dataclass(frozen=True)
class BoxRegion(IdentifiabilityCertificate):
    """Every non-baseline coordinate varies by strictly less than 1 across atoms.

    ``baseline`` is 1-based and ``intervals`` lists ``(min, max)`` for the
    remaining coordinates in order.
    """

    baseline: int
    intervals: tuple
    params: tuple = field(repr=False)
    regime: ClassVar[str] = "box_region"

    def __post_init__(self):
        J = len(self.params[0])
        if not 1 <= self.baseline <= J:
            raise ValueError("baseline out of range")
        spans = _spreads(self.params, self.baseline)
        if tuple(spans) != tuple(self.intervals):
            raise ValueError("intervals do not match the atoms")
        if not all(hi - lo < 1 for lo, hi in spans):
            raise ValueError("a coordinate spread is not below 1")

    def to_json(self) -> dict:
        def num(v):
            return format_rational(v) if isinstance(v, Fraction) else float(v)

        return {
            "regime": self.regime,
            "baseline": self.baseline,
            "intervals": [[num(lo), num(hi)] for lo, hi in self.intervals],
        }


@dataclass(frozen=True)
class FewAtoms(IdentifiabilityCertificate):
    """At most ``J - 1`` atoms in every measure considered."""

    K: int
    J: int
    regime: ClassVar[str] = "few_atoms"

    def __post_init__(self):
        if not 1 <= self.K <= self.J - 1:
            raise ValueError(f"{self.K} atoms is not fewer than J = {self.J}")

    def to_json(self) -> dict:
        return {"regime": self.regime, "K": self.K, "J": self.J}


def _dirichlet_view(G: MixingMeasure) -> MixingMeasure | None:
    """``G`` rewritten in the Dirichlet or inverted Dirichlet family, if possible."""
    if G.family in (K.DIRICHLET, K.INVERTED_DIRICHLET):
        return G
    if G.family in K.DISCRETE_FAMILIES:
        return None
    atoms = []
    for params, w in G.atoms:
        alpha = pullback(params, G.family)
        if alpha is None:
            return None
        atoms.append((alpha, w))
    return MixingMeasure(tuple(atoms), source_family(G.family))


def certify(G: MixingMeasure, G2: MixingMeasure | None = None) -> list:
    """Every identifiable regime that contains ``G`` (and ``G2`` jointly).

    Applies to the Dirichlet and inverted Dirichlet families; the regimes
    depend only on the parameters, so they carry over verbatim.
    """
    measures = [G] if G2 is None else [G, G2]
    for M in measures:
        if M.family not in (K.DIRICHLET, K.INVERTED_DIRICHLET):
            raise ValueError(f"certify needs Dirichlet or inverted Dirichlet atoms, got {M.family}")
    if G2 is not None and G.J != G2.J:
        raise ValueError("measures live in different dimensions")
    params = []
    for M in measures:
        for p in M.params:
            if p not in params:
                params.append(p)
    params = tuple(params)
    J = G.J
    out = []
    if _totals_equal(params):
        out.append(FixedTotalSlice(sum(params[0]), params))
    for baseline in [J] + list(range(1, J)):
        spans = _spreads(params, baseline)
        if all(hi - lo < 1 for lo, hi in spans):
            out.append(BoxRegion(baseline, tuple(spans), params))
            break
    counts = [len(M) for M in measures]
    if max(counts) <= J - 1:
        out.append(FewAtoms(max(counts), J))
    return out


# ---------------------------------------------------------------------------
# Closed-form L2
# ---------------------------------------------------------------------------


def _check_pair(alpha, beta):
    a = [float(v) for v in positive_vector(alpha)]
    b = [float(v) for v in positive_vector(beta, name="beta")]
    if len(a) != len(b):
        raise ValueError("parameters have different dimensions")
    if not all(x + y > 1 for x, y in zip(a, b)):
        raise FeasibilityError(
            f"closed-form inner product needs alpha_j + beta_j > 1, got {a} and {b}"
        )
    return np.asarray(a), np.asarray(b)


def log_inner_product(alpha, beta) -> float:
    """``log c(alpha) + log c(beta) - log c(alpha + beta - 1)``."""
    a, b = _check_pair(alpha, beta)
    return log_normalizer(a) + log_normalizer(b) - log_normalizer(a + b - 1.0)


def inner_product(alpha, beta) -> float:
    """``int f_alpha f_beta`` over the simplex.

    Raises
    ------
    FeasibilityError
        Unless ``alpha_j + beta_j > 1`` for every j.
    """
    return math.exp(log_inner_product(alpha, beta))


def _mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(float(v))


def _mp_log_c(alpha) -> "mpmath.mpf":
    return mpmath.loggamma(mpmath.fsum(alpha)) - mpmath.fsum(mpmath.loggamma(a) for a in alpha)


def _mp_quadratic_form(pairs) -> tuple:
    """``sum_{i,k} c_i c_k <f_i, f_k>`` and the sum of absolute terms, at high precision."""
    for p, _ in pairs:
        for q, _ in pairs:
            _check_pair(p, q)
    with mpmath.workdps(MP_DPS):
        vecs = [[_mp(v) for v in p] for p, _ in pairs]
        coeffs = [_mp(c) for _, c in pairs]
        logc = [_mp_log_c(v) for v in vecs]
        total = mpmath.mpf(0)
        absolute = mpmath.mpf(0)
        for i, (vi, ci) in enumerate(zip(vecs, coeffs)):
            for k in range(i, len(vecs)):
                joint = [a + b - 1 for a, b in zip(vi, vecs[k])]
                term = ci * coeffs[k] * mpmath.exp(logc[i] + logc[k] - _mp_log_c(joint))
                if k != i:
                    term *= 2
                total += term
                absolute += abs(term)
        return total, absolute


def _signed_atoms(G: MixingMeasure, G2: MixingMeasure) -> list:
    """``G - G'`` as a list of (params, signed weight), coinciding atoms merged."""
    exact = G.exact and G2.exact
    out = [[p, w] for p, w in G.atoms]
    for p, w in G2.atoms:
        for entry in out:
            q = entry[0]
            if (p == q) if exact else max(abs(float(a) - float(b)) for a, b in zip(p, q)) <= ATOM_TOL:
                entry[1] = entry[1] - w
                break
        else:
            out.append([p, -w])
    return [(p, c) for p, c in out if c != 0]


def l2_norm(G: MixingMeasure) -> float:
    """``||m_G||_2`` by the closed form."""
    total, _ = _mp_quadratic_form(list(G.atoms))
    return float(mpmath.sqrt(max(total, 0)))


def l2_distance(G: MixingMeasure, G2: MixingMeasure) -> float:
    """``||m_G - m_G'||_2`` for Dirichlet mixtures by the closed form.

    The pairwise sum is formed in 40-digit arithmetic, so cancellation
    between nearly equal mixtures does not lose the answer to rounding.
    A negative sum within 1e-12 of zero (relative to the absolute terms)
    is clamped to 0.
    """
    if G.J != G2.J:
        raise ValueError("measures live in different dimensions")
    pairs = _signed_atoms(G, G2)
    if not pairs:
        return 0.0
    total, absolute = _mp_quadratic_form(pairs)
    if total < 0:
        if -total > CLAMP_TOL * absolute:
            raise ArithmeticError(f"squared distance is negative ({float(total)})")
        return 0.0
    return float(mpmath.sqrt(total))


def gram_matrix(params: Sequence) -> np.ndarray:
    """``G_ik = <f_{alpha_i}, f_{alpha_k}>``."""
    n = len(params)
    out = np.empty((n, n))
    for i in range(n):
        for k in range(i, n):
            out[i, k] = out[k, i] = inner_product(params[i], params[k])
    return out


def gram_spectrum(matrix) -> tuple:
    """Eigenvalues in ascending order and the condition number ``lambda_max / lambda_min``."""
    w = np.linalg.eigvalsh(np.asarray(matrix, dtype=float))
    cond = math.inf if w[0] <= 0 else float(w[-1] / w[0])
    return w, cond


def numerical_null_space(matrix, tol: float = RANK_TOL) -> list:
    """Eigenvectors whose eigenvalue is at most ``tol * lambda_max``.

    Each vector is scaled so that its entry of largest magnitude equals +1.
    """
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    if M.shape[0] == 0:
        return []
    w, V = np.linalg.eigh(M)
    lam_max = w[-1]
    out = []
    for val, vec in zip(w, V.T):
        if val <= tol * lam_max:
            pivot = vec[np.argmax(np.abs(vec))]
            out.append(vec / pivot)
    return out


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


def _log_mixture(G: MixingMeasure, pts: np.ndarray) -> np.ndarray:
    return np.asarray(K.mixture_log_density(G, None, pts))


def mc_discrepancy(
    G: MixingMeasure,
    G2: MixingMeasure,
    alpha0=None,
    n_samples: int = MC_SAMPLES,
    seed: int = 0,
    *,
    chunk_size: int = MC_CHUNK,
) -> tuple:
    """Statistics of ``|m_G(x) - m_G'(x)| / f_{alpha0}(x)`` for ``x ~ Dir(alpha0)``.

    Samples come from normalized gamma draws. Each chunk of ``chunk_size``
    samples has its own sub-seed spawned from ``seed`` and chunks are
    reduced in order, so the result depends only on
    ``(seed, n_samples, chunk_size)``. Orthant families are evaluated at
    the chart image ``y = x_{1:J-1} / x_J`` against the matching reference.

    Returns
    -------
    tuple
        ``(mean_abs_rel, max_abs_rel, std_err)``.
    """
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")
    if G.family != G2.family or G.J != G2.J:
        raise ValueError("measures must share family and dimension")
    family = G.family
    if family in K.DISCRETE_FAMILIES:
        raise TypeError("Monte Carlo applies to continuous families only")
    J = G.J
    if alpha0 is None:
        alpha0 = tuple(1.0 for _ in range(J))
    a0 = np.asarray([float(v) for v in positive_vector(alpha0)])
    if len(a0) != J:
        raise ValueError("reference alpha has the wrong dimension")
    orthant = family in K.ORTHANT_FAMILIES
    ref = K.InvertedDirichlet(tuple(a0)) if orthant else K.Dirichlet(tuple(a0))
    n_chunks = -(-n_samples // chunk_size)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    total = 0.0
    total_sq = 0.0
    largest = 0.0
    remaining = n_samples
    for child in children:
        m = min(chunk_size, remaining)
        remaining -= m
        rng = np.random.default_rng(child)
        g = rng.standard_gamma(a0, size=(m, J))
        x = g / g.sum(axis=1, keepdims=True)
        pts = x[:, :-1] / x[:, -1:] if orthant else x
        lf = np.asarray(kernel_log_density(ref, pts))
        l1 = _log_mixture(G, pts)
        l2 = _log_mixture(G2, pts)
        hi = np.maximum(l1, l2)
        lo = np.minimum(l1, l2)
        rel = np.exp(hi - lf) * -np.expm1(lo - hi)
        rel = np.where(np.isfinite(rel), rel, 0.0)
        total += float(rel.sum())
        total_sq += float((rel * rel).sum())
        largest = max(largest, float(rel.max()))
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0)
    std_err = math.sqrt(var / n_samples)
    return mean, largest, std_err


# ---------------------------------------------------------------------------
# Enumeration for discrete families
# ---------------------------------------------------------------------------


def _support(G: MixingMeasure, context: dict) -> list:
    if G.family == K.DIRICHLET_MULTINOMIAL:
        if "n" not in context:
            raise ValueError("Dirichlet-multinomial equality needs context['n']")
        return list(compositions(int(context["n"]), G.J))
    if "beta" not in context:
        raise ValueError("LDA equality needs context['beta']")
    V = len(context["beta"][0])
    N = int(context.get("length", len(context.get("document", ()))))
    if N < 1:
        raise ValueError("LDA equality needs a document length")
    docs = []
    for counts in compositions(N, V):
        doc = []
        for v, c in enumerate(counts):
            doc.extend([v + 1] * c)
        docs.append(tuple(doc))
    return docs


def _decide_by_enumeration(G, G2, context) -> RelationCertificate:
    support = _support(G, context)
    exact = G.exact and G2.exact
    kw = {k: v for k, v in context.items() if k in ("n", "beta")}
    if exact:
        worst = Fraction(0)
        for pt in support:
            worst = max(worst, abs(K.mixture_pmf_exact(G, pt, **kw) - K.mixture_pmf_exact(G2, pt, **kw)))
        verdict = EQUAL if worst == 0 else NOT_EQUAL
    else:
        worst = 0.0
        for pt in support:
            worst = max(worst, abs(K.mixture_pmf(G, pt, **kw) - K.mixture_pmf(G2, pt, **kw)))
        verdict = EQUAL if worst <= ENUM_TOL else NOT_EQUAL
    return RelationCertificate(verdict, ENUMERATION, worst, None, {"support_size": len(support)})


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def _decide_exact(G, G2) -> RelationCertificate:
    relations = relation_from_measures(G2, G)
    pos = neg = 0
    worst = Fraction(0)
    for rel in relations:
        sc = sign_counts(rel)
        pos += sc.positives
        neg += sc.negatives
        if not is_null_relation(rel):
            worst = max(worst, degree_elevate(rel).max_abs())
    verdict = EQUAL if worst == 0 else NOT_EQUAL
    counts = (pos, neg) if relations else None
    return RelationCertificate(
        verdict, EXACT_POLYNOMIAL, worst, counts, {"classes": len(relations)}
    )


def _l2_feasible(G, G2) -> bool:
    params = G.params + G2.params
    J = G.J
    mins = [min(float(p[j]) for p in params) for j in range(J)]
    return all(2 * m > 1 for m in mins)


def _decide_l2(G, G2) -> RelationCertificate:
    dist = l2_distance(G, G2)
    scale = l2_norm(G)
    verdict = EQUAL if dist <= L2_TOL * scale else NOT_EQUAL
    return RelationCertificate(verdict, CLOSED_FORM_L2, dist, None, {"norm": scale})


def _decide_mc(G, G2, seed, n_samples) -> RelationCertificate:
    params = G.params + G2.params
    alpha0 = tuple(min(float(p[j]) for p in params) for j in range(G.J))
    mean, largest, se = mc_discrepancy(G, G2, alpha0, n_samples, seed)
    verdict = NOT_EQUAL if largest > 10 * se + 1e-8 else INCONCLUSIVE
    return RelationCertificate(
        verdict,
        MONTE_CARLO,
        largest,
        None,
        {"mean_abs_rel": mean, "std_err": se, "n_samples": n_samples, "seed": seed},
    )


def decide_equality(
    G: MixingMeasure,
    G2: MixingMeasure,
    *,
    context: dict | None = None,
    method: str | None = None,
    seed: int = 0,
    n_samples: int = MC_SAMPLES,
    eps_int: float = DEFAULT_EPS_INT,
) -> RelationCertificate:
    """Decide whether two mixing measures induce the same mixture.

    Dirichlet and inverted Dirichlet measures use the exact path when all
    atoms are rational, else closed-form L2 when every pair is feasible,
    else Monte Carlo. Generalized Dirichlet and (inverted) Beta-Liouville
    measures whose atoms all come from the Dirichlet embedding are pulled
    back first; other atoms go to Monte Carlo. Discrete families need
    ``context`` and are decided by enumeration. ``method`` forces a route.
    On the float routes the number of congruence classes at tolerance
    ``eps_int`` is reported in ``details`` as a diagnostic.
    """
    if G.family != G2.family:
        raise ValueError(f"family mismatch: {G.family} vs {G2.family}")
    if G.J != G2.J:
        raise ValueError(f"dimension mismatch: {G.J} vs {G2.J}")
    if method is not None and method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if G.family in K.DISCRETE_FAMILIES:
        if method not in (None, ENUMERATION):
            raise ValueError(f"{G.family} is decided by enumeration only")
        return _decide_by_enumeration(G, G2, context or {})
    if method == ENUMERATION:
        raise ValueError("enumeration applies to discrete families only")

    D, D2 = _dirichlet_view(G), _dirichlet_view(G2)
    if D is None or D2 is None:
        if method not in (None, MONTE_CARLO):
            raise FeasibilityError(f"{method} needs atoms embedded from the Dirichlet family")
        return _decide_mc(G, G2, seed, n_samples)

    exact = D.exact and D2.exact
    if method == EXACT_POLYNOMIAL or (method is None and exact):
        if not exact:
            raise TypeError("the exact path needs rational atoms and weights")
        return _decide_exact(D, D2)
    if method == CLOSED_FORM_L2 or (method is None and _l2_feasible(D, D2)):
        cert = _decide_l2(D, D2)
    else:
        cert = _decide_mc(D, D2, seed, n_samples)
    cert.details["classes"] = _class_count(D.params + D2.params, eps_int)
    return cert


def _class_count(params, eps_int):
    unique = []
    for p in params:
        if p not in unique:
            unique.append(p)
    try:
        return len(congruence_partition(unique, eps_int))
    except AmbiguityError:
        return "ambiguous"
