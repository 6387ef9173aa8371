"""Mixing measures and the constructions showing non-identifiability.

The central fact is the unit-shift identity: every Dirichlet density is the
mixture ``sum_j (alpha_j/alpha_+) f_{alpha+e_j}``. :func:`shift_witness`
turns it into a pair of distinct mixing measures with the same density,
:func:`expand_atom` iterates it, and :func:`embed` carries Dirichlet
parameters into the generalized Dirichlet, Beta-Liouville and inverted
Beta-Liouville families where the same witnesses apply.

Iterated expansions are sufficient witnesses only; no claim is made that
they generate every pair of measures with equal mixture density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels as K
from .kernels import (
    BetaLiouville,
    GeneralizedDirichlet,
    InvertedBetaLiouville,
    family_tag,
    kernel_from_vector,
    kernel_log_density,
)
from .numeric_core import (
    as_exact,
    format_rational,
    is_exact,
    is_exact_vector,
    positive_vector,
)

WEIGHT_TOL = 1e-12
ATOM_TOL = 1e-9


def _shift(alpha: tuple, j: int) -> tuple:
    return tuple(a + 1 if k == j else a for k, a in enumerate(alpha))


def _close(p: tuple, q: tuple, exact: bool) -> bool:
    if exact:
        return p == q
    return max(abs(float(a) - float(b)) for a, b in zip(p, q)) <= ATOM_TOL


@dataclass(frozen=True)
class MixingMeasure:
    """Finite mixing measure ``sum_k pi_k delta_{theta_k}``.

    ``atoms`` is a tuple of ``(params, weight)`` pairs where ``params`` is the
    flattened parameter vector of the kernel family (see
    :func:`dirimix.kernels.kernel_from_vector`). A measure is *exact* when all
    parameters and weights are rationals; then the weights must sum to
    exactly 1. Atoms must be pairwise distinct.
    """

    atoms: tuple
    family: str = K.DIRICHLET

    def __post_init__(self):
        family = family_tag(self.family)
        if not self.atoms:
            raise ValueError("a mixing measure needs at least one atom")
        raw = [(tuple(p), w) for p, w in self.atoms]
        exact = all(is_exact_vector(p) and is_exact(w) for p, w in raw)
        atoms = []
        for params, weight in raw:
            params = positive_vector(params, min_length=2, name="atom")
            if exact:
                weight = Fraction(weight)
            else:
                params = tuple(float(v) for v in params)
                weight = float(weight)
                if not math.isfinite(weight):
                    raise ValueError("weights must be finite")
            if weight <= 0:
                raise ValueError(f"weights must be strictly positive, got {weight}")
            atoms.append((params, weight))
        lengths = {len(p) for p, _ in atoms}
        if len(lengths) != 1:
            raise ValueError(f"atoms have mixed dimensions {sorted(lengths)}")
        total = sum(w for _, w in atoms) if exact else math.fsum(w for _, w in atoms)
        if exact and total != 1:
            raise ValueError(f"weights sum to {total}, not exactly 1")
        if not exact and abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {total!r}, outside 1e-12 of 1")
        for i in range(len(atoms)):
            for k in range(i):
                if _close(atoms[i][0], atoms[k][0], exact):
                    raise ValueError(f"atoms {k + 1} and {i + 1} coincide: {atoms[i][0]}")
        object.__setattr__(self, "atoms", tuple(atoms))
        object.__setattr__(self, "family", family)

    @property
    def exact(self) -> bool:
        return isinstance(self.atoms[0][1], Fraction)

    @property
    def params(self) -> list[tuple]:
        return [p for p, _ in self.atoms]

    @property
    def weights(self) -> list:
        return [w for _, w in self.atoms]

    @property
    def J(self) -> int:
        return K.dimension_of(self.family, len(self.atoms[0][0]))

    def __len__(self) -> int:
        return len(self.atoms)

    def mass(self, params) -> object:
        """``G({params})``, zero when ``params`` is not an atom."""
        params = tuple(params)
        for p, w in self.atoms:
            if _close(p, params, self.exact):
                return w
        return Fraction(0) if self.exact else 0.0

    def same_as(self, other: "MixingMeasure", tol: float = ATOM_TOL) -> bool:
        """Equality as measures: same atoms carrying the same weights."""
        if self.family != other.family or len(self) != len(other):
            return False
        exact = self.exact and other.exact
        for p, w in self.atoms:
            hits = [v for q, v in other.atoms if (p == q if exact else _near(p, q, tol))]
            if len(hits) != 1:
                return False
            if exact and w != hits[0]:
                return False
            if not exact and abs(float(w) - float(hits[0])) > tol:
                return False
        return True

    def to_float(self) -> "MixingMeasure":
        return MixingMeasure(
            tuple((tuple(float(v) for v in p), float(w)) for p, w in self.atoms), self.family
        )

    def to_json(self) -> dict:
        return measure_to_json(self)

    @classmethod
    def from_json(cls, obj: dict, *, exact: bool | None = None) -> "MixingMeasure":
        return measure_from_json(obj, exact=exact)


def _near(p, q, tol):
    return max(abs(float(a) - float(b)) for a, b in zip(p, q)) <= tol


def dirac(params, family: str = K.DIRICHLET) -> MixingMeasure:
    params = positive_vector(params)
    one = Fraction(1) if is_exact_vector(params) else 1.0
    return MixingMeasure(((params, one),), family)


def merge_atoms(pairs: Sequence, exact: bool) -> tuple:
    """Merge coinciding atoms (exactly, or within 1e-9 in float mode) by adding weights."""
    merged: list = []
    for params, weight in pairs:
        for idx, (p, w) in enumerate(merged):
            if _close(p, params, exact):
                merged[idx] = (p, w + weight)
                break
        else:
            merged.append((tuple(params), weight))
    return tuple(merged)


# ---------------------------------------------------------------------------
# Witness pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessPair:
    """Two distinct mixing measures whose mixture densities coincide.

    ``context`` carries what the kernel family needs beyond the atoms:
    ``n`` for Dirichlet-multinomial, ``beta`` and ``document`` for LDA.
    """

    G0: MixingMeasure
    G1: MixingMeasure
    family: str
    provenance: str
    context: dict = field(default_factory=dict)

    def __post_init__(self):
        family = family_tag(self.family)
        if self.G0.family != family or self.G1.family != family:
            raise ValueError("both measures must belong to the witness family")
        if self.G0.same_as(self.G1):
            raise ValueError("a witness pair needs two distinct measures")
        object.__setattr__(self, "family", family)

    def to_json(self) -> dict:
        out = {
            "family": self.family,
            "provenance": self.provenance,
            "G0": measure_to_json(self.G0),
            "G1": measure_to_json(self.G1),
        }
        if self.context:
            out["context"] = context_to_json(self.context)
        return out

    @classmethod
    def from_json(cls, obj: dict, *, exact: bool | None = None) -> "WitnessPair":
        return cls(
            measure_from_json(obj["G0"], exact=exact),
            measure_from_json(obj["G1"], exact=exact),
            obj["family"],
            obj.get("provenance", ""),
            context_from_json(obj.get("context", {}), exact=exact),
        )


def shift_witness(alpha, family: str = K.DIRICHLET) -> WitnessPair:
    """``delta_alpha`` versus ``sum_j (alpha_j/alpha_+) delta_{alpha+e_j}``.

    Works for the Dirichlet and inverted Dirichlet families, and as the
    parameter-level witness for the Dirichlet-multinomial and LDA kernels.
    """
    a = positive_vector(alpha)
    total = sum(a) if is_exact_vector(a) else math.fsum(a)
    atoms = tuple((_shift(a, j), a[j] / total) for j in range(len(a)))
    if not is_exact_vector(a):
        # renormalize float weights so the sum-to-one audit is tight
        s = math.fsum(w for _, w in atoms)
        atoms = tuple((p, w / s) for p, w in atoms)
    family = family_tag(family)
    return WitnessPair(
        dirac(a, family),
        MixingMeasure(atoms, family),
        family,
        "shift identity: f_alpha = sum_j (alpha_j/alpha_+) f_{alpha+e_j}",
    )


def shift_residual(alpha, x):
    """``f_alpha(x) - sum_j (alpha_j/alpha_+) f_{alpha+e_j}(x)``; zero in exact arithmetic.

    ``x`` may be a batch of points.
    """
    a = tuple(float(v) for v in positive_vector(alpha))
    total = math.fsum(a)
    base = np.exp(np.asarray(kernel_log_density(K.Dirichlet(a), x)))
    mix = sum(
        (a[j] / total) * np.exp(np.asarray(kernel_log_density(K.Dirichlet(_shift(a, j)), x)))
        for j in range(len(a))
    )
    out = base - mix
    return float(out) if np.ndim(out) == 0 else out


def expand_atom(G: MixingMeasure, atom_index: int) -> MixingMeasure:
    """Replace one atom by its unit-shift expansion, merging coinciding atoms.

    ``atom_index`` is 0-based. The mixture density is unchanged.
    """
    if G.family not in (K.DIRICHLET, K.INVERTED_DIRICHLET):
        raise ValueError(f"expand_atom needs a Dirichlet-type measure, got {G.family}")
    if not 0 <= atom_index < len(G):
        raise IndexError(f"atom index {atom_index} out of range for {len(G)} atoms")
    params, weight = G.atoms[atom_index]
    total = sum(params) if G.exact else math.fsum(params)
    pairs = [a for i, a in enumerate(G.atoms) if i != atom_index]
    pairs.extend((_shift(params, j), weight * params[j] / total) for j in range(len(params)))
    merged = merge_atoms(pairs, G.exact)
    if not G.exact:
        s = math.fsum(w for _, w in merged)
        merged = tuple((p, w / s) for p, w in merged)
    return MixingMeasure(merged, G.family)


def expansion_witness(alpha, steps: Sequence[int]) -> WitnessPair:
    """Witness from ``delta_alpha`` and a chain of :func:`expand_atom` calls.

    ``steps`` lists the atom index expanded at each stage (taken modulo the
    current atom count). Needs at least one step.
    """
    if not steps:
        raise ValueError("at least one expansion step is needed")
    G0 = dirac(alpha)
    G = G0
    for s in steps:
        G = expand_atom(G, s % len(G))
    return WitnessPair(G0, G, K.DIRICHLET, f"iterated shift expansion, steps={list(steps)}")


# ---------------------------------------------------------------------------
# Embeddings into richer families
# ---------------------------------------------------------------------------


def embed(alpha, target: str):
    """Kernel of ``target`` family whose density equals the Dirichlet one.

    * generalized Dirichlet: ``a_j = alpha_j``, ``b_j = alpha_{j+1} + ... + alpha_J``;
    * Beta-Liouville: ``a_vec = alpha_{1:J-1}``, ``a = sum(a_vec)``, ``b = alpha_J``;
    * inverted Beta-Liouville: as Beta-Liouville with ``lambda = 1``; the
      density equals the inverted Dirichlet density with the same parameter.
    """
    a = positive_vector(alpha)
    target = family_tag(target)
    exact = is_exact_vector(a)
    head = a[:-1]
    s = sum(head) if exact else math.fsum(head)
    if target == K.GENERALIZED_DIRICHLET:
        b = tuple((sum(a[j + 1 :]) if exact else math.fsum(a[j + 1 :])) for j in range(len(a) - 1))
        return GeneralizedDirichlet(head, b)
    if target == K.BETA_LIOUVILLE:
        return BetaLiouville(head, s, a[-1])
    if target == K.INVERTED_BETA_LIOUVILLE:
        return InvertedBetaLiouville(head, s, a[-1], Fraction(1) if exact else 1.0)
    raise ValueError(f"unsupported embedding target {target!r}")


def source_family(target: str) -> str:
    """Family whose densities :func:`embed` reproduces for ``target``."""
    target = family_tag(target)
    return K.INVERTED_DIRICHLET if target == K.INVERTED_BETA_LIOUVILLE else K.DIRICHLET


def pullback(params, family: str):
    """Dirichlet parameter of an embedded atom, or ``None`` if not embedded.

    Checks the reduction condition exactly for rational atoms and to 1e-12
    relative otherwise.
    """
    family = family_tag(family)
    spec = kernel_from_vector(family, params)
    exact = is_exact_vector(spec.to_vector())

    def same(u, v):
        if exact:
            return u == v
        return abs(float(u) - float(v)) <= 1e-12 * max(1.0, abs(float(u)), abs(float(v)))

    if family in (K.DIRICHLET, K.INVERTED_DIRICHLET):
        return tuple(spec.alpha)
    if family == K.GENERALIZED_DIRICHLET:
        g = spec.gamma
        if all(same(gj, 0) for gj in g[:-1]):
            return tuple(spec.a) + (spec.b[-1],)
        return None
    s = sum(spec.a_vec) if exact else math.fsum(spec.a_vec)
    if not same(spec.a, s):
        return None
    if family == K.INVERTED_BETA_LIOUVILLE and not same(spec.lam, 1):
        return None
    if family in (K.BETA_LIOUVILLE, K.INVERTED_BETA_LIOUVILLE):
        return tuple(spec.a_vec) + (spec.b,)
    return None


def embed_measure(G: MixingMeasure, target: str) -> MixingMeasure:
    target = family_tag(target)
    atoms = tuple((embed(p, target).to_vector(), w) for p, w in G.atoms)
    return MixingMeasure(atoms, target)


def embed_witness(alpha, target: str) -> WitnessPair:
    """Shift witness carried into the ``target`` family via :func:`embed`."""
    base = shift_witness(alpha)
    target = family_tag(target)
    return WitnessPair(
        embed_measure(base.G0, target),
        embed_measure(base.G1, target),
        target,
        f"shift identity embedded into {target}",
    )


# ---------------------------------------------------------------------------
# Discrete kernels
# ---------------------------------------------------------------------------


def _rational_alpha(alpha):
    a = positive_vector(alpha)
    if not is_exact_vector(a):
        raise TypeError("exact residuals need rational alpha")
    return a


def dm_shift_residual(n: int, alpha, x) -> Fraction:
    """``p_{n,alpha}(x) - sum_j (alpha_j/alpha_+) p_{n,alpha+e_j}(x)``, exactly."""
    a = _rational_alpha(alpha)
    if len(x) != len(a):
        raise ValueError(f"count vector has {len(x)} entries, alpha has {len(a)}")
    total = sum(a)
    mix = sum(a[j] / total * K.dm_pmf_exact(n, _shift(a, j), x) for j in range(len(a)))
    return K.dm_pmf_exact(n, a, x) - mix


def lda_shift_residual(alpha, beta, document, **caps) -> Fraction:
    """``q_{alpha,beta}(w) - sum_k (alpha_k/alpha_+) q_{alpha+e_k,beta}(w)``, exactly."""
    a = _rational_alpha(alpha)
    total = sum(a)
    mix = sum(
        a[k] / total * K.lda_marginal_exact(_shift(a, k), beta, document, **caps)
        for k in range(len(a))
    )
    return K.lda_marginal_exact(a, beta, document, **caps) - mix


def dm_witness(alpha, n: int) -> WitnessPair:
    base = shift_witness(alpha, K.DIRICHLET_MULTINOMIAL)
    return WitnessPair(
        base.G0,
        base.G1,
        K.DIRICHLET_MULTINOMIAL,
        "shift identity integrated against the multinomial kernel",
        {"n": int(n)},
    )


def lda_witness(alpha, beta, document=()) -> WitnessPair:
    a = positive_vector(alpha)
    beta = K.topic_matrix(beta, exact=is_exact_vector(a))
    if len(beta) != len(a):
        raise ValueError(f"beta has {len(beta)} rows but alpha has {len(a)} topics")
    doc = K.check_document(document, len(beta[0]))
    base = shift_witness(a, K.LDA_MARGINAL)
    return WitnessPair(
        base.G0,
        base.G1,
        K.LDA_MARGINAL,
        "shift identity integrated against the LDA document likelihood",
        {"beta": beta, "document": doc},
    )


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

_ATOM_KEYS = {
    K.GENERALIZED_DIRICHLET: ("a", "b"),
    K.BETA_LIOUVILLE: ("a_vec", "a", "b"),
    K.INVERTED_BETA_LIOUVILLE: ("a_vec", "a", "b", "lambda"),
}


def _num_out(v):
    return format_rational(v) if isinstance(v, Fraction) else float(v)


def _num_in(v, exact: bool):
    if exact:
        return as_exact(v)
    if isinstance(v, str):
        return float(as_exact(v))
    return float(v)


def measure_to_json(G: MixingMeasure) -> dict:
    """``{"family": ..., "J": ..., "atoms": [{"alpha": [...], "weight": ...}, ...]}``.

    Exact measures write rationals as ``"p/q"`` strings; float measures use
    JSON numbers. Non-Dirichlet families use their own parameter names.
    """
    atoms = []
    for params, w in G.atoms:
        if G.family in _ATOM_KEYS:
            body = K.kernel_to_json(kernel_from_vector(G.family, params))
            body.pop("family")
            entry = {k: body[k] for k in _ATOM_KEYS[G.family]}
        else:
            entry = {"alpha": [_num_out(v) for v in params]}
        entry["weight"] = _num_out(w)
        atoms.append(entry)
    return {"family": G.family, "J": G.J, "atoms": atoms}


def _infer_exact(obj: dict) -> bool:
    def walk(v):
        if isinstance(v, dict):
            return all(walk(x) for x in v.values())
        if isinstance(v, list):
            return all(walk(x) for x in v)
        return isinstance(v, str) or (isinstance(v, int) and not isinstance(v, bool))

    return all(walk(a) for a in obj["atoms"])


def measure_from_json(obj: dict, *, exact: bool | None = None) -> MixingMeasure:
    family = family_tag(obj.get("family", K.DIRICHLET))
    if exact is None:
        exact = _infer_exact(obj)
    atoms = []
    for entry in obj["atoms"]:
        if family in _ATOM_KEYS:
            vec = []
            for key in _ATOM_KEYS[family]:
                v = entry[key]
                vec.extend(v if isinstance(v, list) else [v])
        else:
            vec = entry["alpha"]
        atoms.append(([_num_in(v, exact) for v in vec], _num_in(entry["weight"], exact)))
    G = MixingMeasure(tuple(atoms), family)
    if "J" in obj and int(obj["J"]) != G.J:
        raise ValueError(f"declared J={obj['J']} does not match atoms of dimension {G.J}")
    return G


def context_to_json(context: dict) -> dict:
    out = {}
    for key, v in context.items():
        if key == "beta":
            out[key] = [[_num_out(x) for x in row] for row in v]
        elif key == "document":
            out[key] = list(v)
        else:
            out[key] = v
    return out


def context_from_json(obj: dict, *, exact: bool | None = None) -> dict:
    out = {}
    for key, v in obj.items():
        if key == "beta":
            ex = exact if exact is not None else all(isinstance(x, str) for row in v for x in row)
            out[key] = K.topic_matrix([[_num_in(x, ex) for x in row] for row in v], exact=ex)
        elif key == "document":
            out[key] = tuple(int(w) for w in v)
        elif key == "n":
            out[key] = int(v)
        else:
            out[key] = v
    return out
