"""Exact rational decision procedure for Dirichlet mixture equality.

Pipeline for two rational mixing measures G, G':

1. singleton-mass differences ``c_i = G({gamma_i}) - G'({gamma_i})``;
2. split the atoms into classes congruent modulo Z^J;
3. inside a class write ``gamma_i = r + n_i`` with ``r`` in (0,1]^J and
   ``n_i`` a nonnegative integer vector, so that the kernel combination
   becomes ``c(r) x^{r-1} sum_i d_i x^{n_i}`` with
   ``d_i = c_i (r_+)_{|n_i|} / prod_j (r_j)_{n_j}`` (``c(r)`` dropped);
4. degree-elevate the simplex polynomial ``sum_i d_i x^{n_i}`` to its top
   degree and test that every coefficient vanishes.

Monomials of one fixed total degree are linearly independent on the
simplex, so the top-degree test is complete.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import AmbiguityError, FeasibilityError
from .numeric_core import (
    as_exact,
    compositions,
    format_rational,
    is_exact_vector,
    multi_index,
    multinomial_coefficient,
    positive_vector,
    rising_factorial,
)

DEFAULT_EPS_INT = 1e-9
MAX_LATTICE = 200


@dataclass(frozen=True)
class MonomialRelation:
    """``sum_i d_i x^{n_i}`` on the simplex, attached to a residue ``r``."""

    J: int
    residue: tuple
    terms: tuple

    def __post_init__(self):
        J = int(self.J)
        if J < 2:
            raise ValueError("J must be at least 2")
        r = tuple(as_exact(v) for v in self.residue)
        if len(r) != J or not all(0 < v <= 1 for v in r):
            raise ValueError(f"residue must lie in (0,1]^{J}, got {r}")
        terms = []
        seen = set()
        for exponent, coeff in self.terms:
            e = multi_index(exponent, J)
            c = as_exact(coeff)
            if c == 0:
                raise ValueError("relation coefficients must be nonzero")
            if e in seen:
                raise ValueError(f"duplicate exponent {e}")
            seen.add(e)
            terms.append((e, c))
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "residue", r)
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def exponents(self) -> list:
        return [e for e, _ in self.terms]

    @property
    def coefficients(self) -> list:
        return [c for _, c in self.terms]

    @property
    def max_degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=0)

    def evaluate(self, x: Sequence) -> Fraction:
        """Exact value at a rational point given by all J coordinates."""
        xs = [as_exact(v) for v in x]
        if len(xs) != self.J:
            raise ValueError("point has the wrong dimension")
        total = Fraction(0)
        for e, c in self.terms:
            term = c
            for xv, k in zip(xs, e):
                term *= xv**k
            total += term
        return total

    def to_json(self) -> dict:
        return {
            "J": self.J,
            "residue": [format_rational(v) for v in self.residue],
            "terms": [
                {"exponent": list(e), "coefficient": format_rational(c)} for e, c in self.terms
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MonomialRelation":
        return cls(
            obj["J"],
            obj["residue"],
            tuple((t["exponent"], t["coefficient"]) for t in obj["terms"]),
        )


@dataclass(frozen=True)
class CongruencePartition:
    groups: tuple

    def __iter__(self):
        return iter(self.groups)

    def __len__(self):
        return len(self.groups)


@dataclass(frozen=True)
class ElevatedForm:
    N: int
    coefficients: dict

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.coefficients.values())

    def max_abs(self) -> Fraction:
        return max((abs(v) for v in self.coefficients.values()), default=Fraction(0))


class SignCounts(NamedTuple):
    positives: int
    negatives: int
    bound_check: bool


def shift_relation(J: int) -> MonomialRelation:
    """``x_1 + ... + x_J - 1``: the polynomial form of the unit-shift identity."""
    zero = (0,) * J
    terms = [(zero, Fraction(-1))]
    terms += [(tuple(1 if k == j else 0 for k in range(J)), Fraction(1)) for j in range(J)]
    return MonomialRelation(J, (Fraction(1),) * J, tuple(terms))


# ---------------------------------------------------------------------------
# Congruence classes and residues
# ---------------------------------------------------------------------------


def _integer_diff(p, q, eps: float, exact: bool) -> bool:
    if exact:
        return all((a - b).denominator == 1 for a, b in zip(p, q))
    for a, b in zip(p, q):
        d = float(a) - float(b)
        if abs(d - round(d)) > eps:
            return False
    return True


def congruence_partition(params: Sequence, eps_int: float | None = None) -> CongruencePartition:
    """Group parameters whose pairwise differences are integer vectors.

    Exact inputs are compared exactly. Float inputs use tolerance
    ``eps_int`` (default 1e-9, at most 0.1); if that tolerance relation is
    not transitive on the input an :class:`AmbiguityError` is raised.
    """
    vecs = [tuple(p) for p in params]
    if not vecs:
        return CongruencePartition(())
    exact = all(is_exact_vector(p) for p in vecs)
    if exact:
        vecs = [tuple(Fraction(v) for v in p) for p in vecs]
        eps = 0.0
    else:
        eps = DEFAULT_EPS_INT if eps_int is None else float(eps_int)
        if not 0 <= eps <= 0.1:
            raise ValueError(f"eps_int must lie in [0, 0.1], got {eps}")
    n = len(vecs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    related = [[False] * n for _ in range(n)]
    for i in range(n):
        related[i][i] = True
        for k in range(i):
            if _integer_diff(vecs[i], vecs[k], eps, exact):
                related[i][k] = related[k][i] = True
                parent[find(i)] = find(k)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    ordered = sorted(groups.values(), key=lambda g: g[0])
    for g in ordered:
        for a in g:
            for b in g:
                if not related[a][b]:
                    raise AmbiguityError(
                        f"integer-congruence at eps_int={eps} is not transitive: "
                        f"params {a + 1} and {b + 1} are linked only through others"
                    )
    return CongruencePartition(tuple(tuple(g) for g in ordered))


def residue_of(alpha) -> tuple:
    """``r_j = alpha_j - (ceil(alpha_j) - 1)``, which lies in (0, 1]."""
    return tuple(a - (math.ceil(a) - 1) for a in alpha)


def residue_decompose(params: Sequence) -> tuple:
    """Write each parameter of one congruence class as ``r + n_i``.

    Returns ``(r, [n_1, ..., n_M])`` with ``r`` in (0,1]^J and distinct
    nonnegative integer vectors ``n_i``.
    """
    vecs = [positive_vector(p) for p in params]
    if not vecs:
        raise ValueError("need at least one parameter")
    if not all(is_exact_vector(v) for v in vecs):
        raise TypeError("residue_decompose requires rational parameters")
    r = residue_of(vecs[0])
    exps = []
    for v in vecs:
        if len(v) != len(r):
            raise ValueError("parameters have mixed dimensions")
        if residue_of(v) != r:
            raise ValueError(f"parameters {vecs[0]} and {v} are not congruent modulo Z^J")
        n = tuple(int(a - rj) for a, rj in zip(v, r))
        exps.append(n)
    if len(set(exps)) != len(exps):
        raise ValueError("parameters within a class must be distinct")
    return r, exps


# ---------------------------------------------------------------------------
# From measures to relations
# ---------------------------------------------------------------------------


def singleton_differences(G, G2) -> list:
    """``[(gamma_i, G({gamma_i}) - G'({gamma_i}))]`` over the union of atoms, zeros dropped."""
    if not (G.exact and G2.exact):
        raise TypeError("exact relations need rational measures")
    if G.J != G2.J:
        raise ValueError(f"measures live in different dimensions ({G.J} vs {G2.J})")
    diffs: dict = {}
    for params, w in G.atoms:
        diffs[tuple(params)] = diffs.get(tuple(params), Fraction(0)) + w
    for params, w in G2.atoms:
        diffs[tuple(params)] = diffs.get(tuple(params), Fraction(0)) - w
    return [(p, c) for p, c in diffs.items() if c != 0]


def relation_from_coefficients(params: Sequence, coeffs: Sequence) -> list:
    """Monomial relations, one per congruence class, for ``sum_i c_i f_{params_i}``."""
    pairs = [(tuple(positive_vector(p)), as_exact(c)) for p, c in zip(params, coeffs)]
    pairs = [(p, c) for p, c in pairs if c != 0]
    if not pairs:
        return []
    if not all(is_exact_vector(p) for p, _ in pairs):
        raise TypeError("exact relations need rational parameters")
    J = len(pairs[0][0])
    if any(len(p) != J for p, _ in pairs):
        raise ValueError("parameters have mixed dimensions")
    relations = []
    for group in congruence_partition([p for p, _ in pairs]):
        members = [pairs[i] for i in group]
        r, exps = residue_decompose([p for p, _ in members])
        r_plus = sum(r)
        terms = []
        for (_, c), n in zip(members, exps):
            scale = rising_factorial(r_plus, sum(n))
            for rj, nj in zip(r, n):
                scale /= rising_factorial(rj, nj)
            terms.append((n, c * scale))
        relations.append(MonomialRelation(J, r, tuple(terms)))
    return relations


def relation_from_measures(G, G2) -> list:
    """Per-congruence-class monomial relations encoding ``m_G - m_G'``.

    An empty list means the singleton masses agree, i.e. G = G'.
    """
    diffs = singleton_differences(G, G2)
    return relation_from_coefficients([p for p, _ in diffs], [c for _, c in diffs])


# ---------------------------------------------------------------------------
# Degree elevation and the null test
# ---------------------------------------------------------------------------


def degree_elevate(rel: MonomialRelation, N: int | None = None) -> ElevatedForm:
    """Rewrite the relation in the degree-N monomial basis using ``sum x_j = 1``.

    ``A_u = sum_i d_i multinomial(N - |n_i|; u - n_i)``, with the
    multinomial coefficient zero unless ``u >= n_i`` coordinatewise.
    """
    top = rel.max_degree
    N = top if N is None else int(N)
    if N < top:
        raise ValueError(f"target degree {N} is below the relation degree {top}")
    coeffs = {u: Fraction(0) for u in compositions(N, rel.J)}
    for n, d in rel.terms:
        for beta in compositions(N - sum(n), rel.J):
            u = tuple(a + b for a, b in zip(n, beta))
            coeffs[u] += d * multinomial_coefficient(beta)
    return ElevatedForm(N, coeffs)


def is_null_relation(rel: MonomialRelation) -> bool:
    """True iff ``sum_i d_i x^{n_i}`` vanishes identically on the simplex."""
    if not rel.terms:
        return True
    return degree_elevate(rel).is_zero()


def sign_counts(rel: MonomialRelation) -> SignCounts:
    """Numbers of positive and negative coefficients.

    ``bound_check`` holds when the relation is not null or when one sign
    class has at least J members; it must never be False.
    """
    pos = sum(1 for c in rel.coefficients if c > 0)
    neg = sum(1 for c in rel.coefficients if c < 0)
    ok = (not is_null_relation(rel)) or max(pos, neg) >= rel.J
    return SignCounts(pos, neg, ok)


# ---------------------------------------------------------------------------
# Exact null space of the elevation map
# ---------------------------------------------------------------------------


def elevation_matrix(exponents: Sequence, J: int) -> tuple:
    """Integer matrix ``E[u][i] = multinomial(N - |n_i|; u - n_i)`` and the level-N monomials."""
    exps = [multi_index(e, J) for e in exponents]
    N = max(sum(e) for e in exps)
    level = list(compositions(N, J))
    index = {u: k for k, u in enumerate(level)}
    rows = [[0] * len(exps) for _ in level]
    for i, n in enumerate(exps):
        for beta in compositions(N - sum(n), J):
            u = tuple(a + b for a, b in zip(n, beta))
            rows[index[u]][i] = multinomial_coefficient(beta)
    return rows, level


def _row_gcd_normalize(row: list) -> list:
    g = 0
    for v in row:
        g = math.gcd(g, v)
    return [v // g for v in row] if g > 1 else row


def integer_null_space(rows: Sequence, ncols: int) -> list:
    """Rational basis of ``{v : A v = 0}`` for an integer matrix ``A``.

    Fraction-free Gauss-Jordan elimination: rows stay integral through
    cross-multiplication and are divided by their gcd after every update.
    Each basis vector is scaled to a primitive integer vector whose free
    coordinate is positive.
    """
    A = [list(map(int, r)) for r in rows]
    pivots: list = []
    rank = 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(A)) if A[i][c] != 0), None)
        if pivot is None:
            continue
        A[rank], A[pivot] = A[pivot], A[rank]
        p = A[rank][c]
        for i in range(len(A)):
            if i == rank or A[i][c] == 0:
                continue
            q = A[i][c]
            A[i] = _row_gcd_normalize([p * a - q * b for a, b in zip(A[i], A[rank])])
        pivots.append(c)
        rank += 1
        if rank == len(A):
            break
    pivot_set = set(pivots)
    basis = []
    for free in (c for c in range(ncols) if c not in pivot_set):
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            v[pc] = Fraction(-A[row_idx][free], A[row_idx][pc])
        lcm = 1
        for x in v:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        ints = [int(x * lcm) for x in v]
        g = 0
        for x in ints:
            g = math.gcd(g, x)
        basis.append([Fraction(x // g) for x in ints])
    return basis


def null_relation_basis(exponents: Sequence, J: int, *, max_monomials: int = MAX_LATTICE) -> list:
    """Basis of coefficient vectors ``d`` with ``sum_i d_i x^{n_i} = 0`` on the simplex.

    Every returned vector is re-checked with :func:`is_null_relation`.
    """
    exps = [multi_index(e, J) for e in exponents]
    if len(set(exps)) != len(exps):
        raise ValueError("exponents must be distinct")
    if len(exps) > max_monomials:
        raise FeasibilityError(f"{len(exps)} monomials exceed the cap of {max_monomials}")
    if not exps:
        return []
    rows, _ = elevation_matrix(exps, J)
    basis = integer_null_space(rows, len(exps))
    for vec in basis:
        rel = relation_from_vector(exps, vec, J)
        if not is_null_relation(rel):
            raise ArithmeticError("null-space vector failed the elevation check")
    return basis


def relation_from_vector(exponents: Sequence, coeffs: Sequence, J: int, residue=None) -> MonomialRelation:
    """Relation with the nonzero entries of ``coeffs`` (residue defaults to all ones)."""
    r = residue if residue is not None else (Fraction(1),) * J
    terms = tuple((tuple(e), as_exact(c)) for e, c in zip(exponents, coeffs) if c != 0)
    return MonomialRelation(J, r, terms)


def lattice(J: int, max_degree: int) -> list:
    """All exponent vectors of length J with total degree at most ``max_degree``."""
    out = []
    for deg in range(max_degree + 1):
        out.extend(sorted(compositions(deg, J)))
    return out
