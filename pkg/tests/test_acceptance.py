"""Acceptance suite: one test per numbered criterion, each at its stated tolerance."""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from dirimix import kernels as K
from dirimix.equivalence import (
    CLOSED_FORM_L2,
    EQUAL,
    EXACT_POLYNOMIAL,
    decide_equality,
    gram_matrix,
    l2_distance,
    l2_norm,
    numerical_null_space,
)
from dirimix.exactpoly import (
    is_null_relation,
    lattice,
    null_relation_basis,
    relation_from_vector,
    shift_relation,
    sign_counts,
)
from dirimix.numeric_core import dirichlet_moment
from dirimix.series import h_series_eval
from dirimix.transports import (
    alr_jacobian_det,
    alr_jacobian_fd,
    chart_jacobian_det,
    chart_jacobian_fd,
    chart_transform,
)
from dirimix.witnesses import (
    MixingMeasure,
    dm_shift_residual,
    embed,
    expansion_witness,
    lda_shift_residual,
    shift_residual,
    shift_witness,
)


def rational_vector(rng, J, lo=1, hi=40, den=8):
    return tuple(Fraction(int(rng.integers(lo, hi)), int(rng.integers(1, den + 1))) for _ in range(J))


def rational_simplex_weights(rng, k):
    raw = [int(v) for v in rng.integers(1, 20, size=k)]
    total = sum(raw)
    return [Fraction(r, total) for r in raw]


def rational_topic_matrix(rng, K_, V):
    return tuple(tuple(rational_simplex_weights(rng, V)) for _ in range(K_))


@pytest.mark.criterion(1, "shift identity, relative residual <= 1e-10")
def test_shift_identity_relative_residual():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        J = int(rng.integers(2, 7))
        alpha = rng.uniform(0.2, 5.0, size=J)
        x = rng.dirichlet(np.ones(J), size=1000)
        res = shift_residual(alpha, x)
        f = np.exp(K.dirichlet_log_density(alpha, x))
        worst = max(worst, float(np.max(np.abs(res) / f)))
    elapsed = time.perf_counter() - start
    assert worst <= 1e-10
    assert elapsed < 10.0


@pytest.mark.criterion(2, "witness equality via the exact polynomial path")
def test_witness_equality_exact_path():
    rng = np.random.default_rng(202)
    start = time.perf_counter()
    for _ in range(50):
        J = int(rng.integers(2, 5))
        alpha = rational_vector(rng, J)
        pair = shift_witness(alpha)
        cert = decide_equality(pair.G0, pair.G1)
        assert cert.verdict == EQUAL and cert.method == EXACT_POLYNOMIAL
        assert cert.residual == 0 and isinstance(cert.residual, Fraction)
        steps = [int(s) for s in rng.integers(0, 100, size=int(rng.integers(1, 6)))]
        chain = expansion_witness(alpha, steps)
        cert = decide_equality(chain.G0, chain.G1)
        assert cert.verdict == EQUAL and cert.method == EXACT_POLYNOMIAL
        assert cert.residual == 0
    assert time.perf_counter() - start < 30.0


@pytest.mark.criterion(3, "witness equality via closed-form L2, <= 1e-10 relative")
def test_witness_equality_closed_form():
    rng = np.random.default_rng(303)
    for _ in range(50):
        J = int(rng.integers(2, 6))
        alpha = tuple(float(v) for v in rng.uniform(1.0, 6.0, size=J))
        pair = shift_witness(alpha)
        dist = l2_distance(pair.G0, pair.G1)
        assert dist <= 1e-10 * l2_norm(pair.G0)
        cert = decide_equality(pair.G0, pair.G1)
        assert cert.method == CLOSED_FORM_L2 and cert.verdict == EQUAL


@pytest.mark.criterion(4, "Dirichlet-multinomial shift identity holds exactly")
def test_dm_identity_exact():
    rng = np.random.default_rng(404)
    start = time.perf_counter()
    for trial in range(20):
        J = 2 + trial % 3
        alpha = rational_vector(rng, J)
        for n in range(6):
            for x in K.count_vectors(n, J):
                assert dm_shift_residual(n, alpha, x) == 0
    assert time.perf_counter() - start < 10.0


@pytest.mark.criterion(5, "LDA shift identity holds exactly")
def test_lda_identity_exact():
    rng = np.random.default_rng(505)
    start = time.perf_counter()
    for _ in range(20):
        K_ = int(rng.integers(2, 4))
        V = int(rng.integers(2, 5))
        alpha = rational_vector(rng, K_)
        beta = rational_topic_matrix(rng, K_, V)
        for N in range(7):
            doc = tuple(int(w) for w in rng.integers(1, V + 1, size=N))
            assert lda_shift_residual(alpha, beta, doc) == 0
    assert time.perf_counter() - start < 60.0


@pytest.mark.criterion(6, "embeddings reproduce the source log-density within 1e-12")
def test_embeddings_match_source():
    rng = np.random.default_rng(606)
    for target in ("gd", "bl", "ibl"):
        for _ in range(100):
            J = int(rng.integers(2, 6))
            alpha = tuple(float(v) for v in rng.uniform(0.3, 6.0, size=J))
            spec = embed(alpha, target)
            if target == "ibl":
                y = rng.exponential(2.0, size=J - 1)
                ref = K.kernel_log_density(K.InvertedDirichlet(alpha), y)
                got = K.kernel_log_density(spec, y)
            else:
                x = rng.dirichlet(np.ones(J))
                ref = K.dirichlet_log_density(alpha, x)
                got = K.kernel_log_density(spec, x)
            assert abs(got - ref) <= 1e-12


@pytest.mark.criterion(7, "analytic Jacobians match finite differences, relative 1e-6")
def test_jacobians_match_finite_differences():
    rng = np.random.default_rng(707)
    for J in (2, 3, 4):
        for _ in range(100):
            x = rng.dirichlet(np.full(J, 2.0))
            exact = alr_jacobian_det(x)
            assert abs(alr_jacobian_fd(x) - exact) <= 1e-6 * exact
            y = rng.exponential(1.0, size=J - 1)
            exact = chart_jacobian_det(y)
            assert abs(chart_jacobian_fd(y) - exact) <= 1e-6 * exact


@pytest.mark.criterion(8, "f(phi(y)) = x_J^-J h(y), relative 1e-12")
def test_transport_consistency():
    rng = np.random.default_rng(808)
    for _ in range(100):
        J = int(rng.integers(2, 6))
        alpha = rng.uniform(0.3, 5.0, size=J)
        y = rng.exponential(1.5, size=J - 1)
        x = chart_transform(y).x
        lhs = K.dirichlet_log_density(alpha, x)
        rhs = -J * math.log(x[-1]) + K.kernel_log_density(K.InvertedDirichlet(alpha), y)
        assert abs(math.expm1(lhs - rhs)) <= 1e-12


@pytest.mark.criterion(9, "series at order 40: error within tail bound, bound <= 1e-8 h")
def test_series_tail_bound():
    """Sampled where the bound can reach 1e-8 at order 40; large alpha_+ near Y = 1/2 cannot."""
    rng = np.random.default_rng(909)
    for _ in range(100):
        J = int(rng.integers(2, 4))
        alpha = rng.uniform(0.2, 2.0, size=J)
        Y = rng.uniform(0.05, 0.4)
        y = Y * rng.dirichlet(np.ones(J - 1))
        value, tail = h_series_eval(alpha, y, 40)
        h = math.exp(K.kernel_log_density(K.InvertedDirichlet(alpha), y))
        assert abs(value - h) <= tail
        assert tail <= 1e-8 * h


@pytest.mark.criterion(10, "sign bound over exhaustive null relations")
def test_sign_bound_exhaustive():
    rng = np.random.default_rng(1010)
    start = time.perf_counter()
    for J in (2, 3):
        exps = lattice(J, 3)
        basis = null_relation_basis(exps, J)
        assert basis
        for vec in basis:
            pos = sum(1 for c in vec if c > 0)
            neg = sum(1 for c in vec if c < 0)
            assert max(pos, neg) >= J
        B = np.array(basis, dtype=object)
        for _ in range(1000):
            coeffs = [Fraction(int(v), int(d)) for v, d in zip(rng.integers(-6, 7, size=len(basis)), rng.integers(1, 5, size=len(basis)))]
            if all(c == 0 for c in coeffs):
                coeffs[0] = Fraction(1)
            combo = [sum(c * b for c, b in zip(coeffs, col)) for col in B.T]
            rel = relation_from_vector(exps, combo, J)
            assert is_null_relation(rel)
            sc = sign_counts(rel)
            assert sc.bound_check and max(sc.positives, sc.negatives) >= J
        sc = sign_counts(shift_relation(J))
        assert (sc.positives, sc.negatives) == (J, 1)
    assert time.perf_counter() - start < 60.0


@pytest.mark.criterion(11, "fixed-total slice is linearly independent; shift null vector recovered")
def test_fixed_total_slice():
    rng = np.random.default_rng(1111)
    for _ in range(20):
        params = [tuple(1.0 + 7.0 * rng.dirichlet(np.ones(3))) for _ in range(6)]
        assert numerical_null_space(gram_matrix(params), 1e-10) == []
    base = (2.0, 2.0, 2.0)
    params = [base] + [tuple(b + (1.0 if k == j else 0.0) for k, b in enumerate(base)) for j in range(3)]
    null = numerical_null_space(gram_matrix(params), 1e-10)
    assert len(null) == 1
    np.testing.assert_allclose(null[0], [1, -1 / 3, -1 / 3, -1 / 3], atol=1e-8)


def _random_measure(rng, J, k):
    atoms = []
    while len(atoms) < k:
        alpha = tuple(Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 3))) for _ in range(J))
        if alpha not in atoms:
            atoms.append(alpha)
    return MixingMeasure(tuple(zip(atoms, rational_simplex_weights(rng, k))))


@pytest.mark.criterion(12, "fewer than J atoms: never judged equal")
def test_few_atoms_identifiable():
    rng = np.random.default_rng(1212)
    for J in (2, 3, 4):
        trials = 0
        while trials < 500:
            G = _random_measure(rng, J, int(rng.integers(1, J)))
            G2 = _random_measure(rng, J, int(rng.integers(1, J)))
            if G.same_as(G2):
                continue
            trials += 1
            assert decide_equality(G, G2).verdict != EQUAL


@pytest.mark.criterion(13, "Dirichlet moments match Monte Carlo and hand integrals")
def test_moment_oracle():
    rng = np.random.default_rng(1313)
    for _ in range(10):
        J = int(rng.integers(2, 5))
        alpha = rational_vector(rng, J, lo=1, hi=12, den=3)
        m = tuple(int(v) for v in rng.multinomial(int(rng.integers(1, 5)), np.ones(J) / J))
        x = rng.dirichlet([float(a) for a in alpha], size=100_000)
        vals = np.prod(x ** np.asarray(m), axis=1)
        se = vals.std(ddof=1) / math.sqrt(len(vals))
        assert abs(vals.mean() - float(dirichlet_moment(alpha, m))) <= 4 * se
    # Beta integrals done by hand
    assert dirichlet_moment((1, 1), (2, 0)) == Fraction(1, 3)
    assert dirichlet_moment((2, 3), (1, 1)) == Fraction(1, 5)
    assert dirichlet_moment((Fraction(1, 2), Fraction(1, 2)), (1, 0)) == Fraction(1, 2)
    # x_2 ~ Beta(2, 1) has density 2t, so E[x_2^3] = int 2 t^4 dt = 2/5
    assert dirichlet_moment((1, 2), (0, 3)) == Fraction(2, 5)
