import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from dirimix import kernels as K
from dirimix.equivalence import (
    CLOSED_FORM_L2,
    ENUMERATION,
    EQUAL,
    EXACT_POLYNOMIAL,
    INCONCLUSIVE,
    MONTE_CARLO,
    NOT_EQUAL,
    BoxRegion,
    FewAtoms,
    FixedTotalSlice,
    RelationCertificate,
    certify,
    decide_equality,
    gram_matrix,
    gram_spectrum,
    inner_product,
    l2_distance,
    l2_norm,
    mc_discrepancy,
    numerical_null_space,
)
from dirimix.errors import FeasibilityError
from dirimix.exactpoly import lattice, null_relation_basis, relation_from_vector, sign_counts
from dirimix.witnesses import (
    MixingMeasure,
    dirac,
    dm_witness,
    embed_witness,
    expansion_witness,
    lda_witness,
    shift_witness,
)

F = Fraction


def _beta_pdf(a, b, x):
    return math.exp(K.dirichlet_log_density((a, b), (x, 1 - x)))


class TestInnerProduct:
    @pytest.mark.parametrize(
        "alpha, beta, expected",
        [((1, 1), (1, 1), 1.0), ((2, 1), (1, 2), 2 / 3), ((2, 2), (2, 2), 6 / 5)],
    )
    def test_examples(self, alpha, beta, expected):
        assert inner_product(alpha, beta) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("alpha, beta", [((1.5, 2.5), (0.8, 3.0)), ((0.7, 0.9), (0.6, 1.2))])
    def test_matches_quadrature(self, alpha, beta):
        val, _ = integrate.quad(lambda x: _beta_pdf(*alpha, x) * _beta_pdf(*beta, x), 0, 1, limit=200)
        assert inner_product(alpha, beta) == pytest.approx(val, rel=1e-7)

    def test_infeasible(self):
        with pytest.raises(FeasibilityError):
            inner_product((0.4, 1.0), (0.5, 1.0))


class TestL2:
    def test_distance_against_trapezoid(self):
        x = np.linspace(0, 1, 400_001)
        diff = 6 * x * (1 - x) - 12 * x**2 * (1 - x)
        oracle = math.sqrt(np.trapezoid(diff**2, x))
        got = l2_distance(dirac((2.0, 2.0)), dirac((3.0, 2.0)))
        assert got == pytest.approx(oracle, abs=1e-4)

    def test_witness_distance_vanishes(self):
        w = shift_witness((2.5, 1.5, 3.0))
        assert l2_distance(w.G0, w.G1) <= 1e-10 * l2_norm(w.G0)

    def test_norm(self):
        assert l2_norm(dirac((2, 2))) == pytest.approx(math.sqrt(6 / 5))


class TestGram:
    def test_shift_null_vector(self):
        alpha = (1.5, 1.2, 2.0)
        params = [alpha] + [tuple(a + (k == j) for k, a in enumerate(alpha)) for j in range(3)]
        M = gram_matrix(params)
        (v,) = numerical_null_space(M)
        weights = np.array([1.0] + [-a / sum(alpha) for a in alpha])
        np.testing.assert_allclose(v, weights / weights[np.argmax(np.abs(weights))], atol=1e-6)
        eig, cond = gram_spectrum(M)
        assert eig.min() < 1e-10 * eig.max()

    def test_null_space_sign_structure(self):
        J = 3
        exps = lattice(J, 2)
        r = (F(3, 2), F(3, 4), F(2))
        params = [tuple(float(a + n) for a, n in zip(r, e)) for e in exps]
        vecs = numerical_null_space(gram_matrix(params))
        assert len(vecs) == len(null_relation_basis(exps, J))
        for v in vecs:
            pos, neg = int(np.sum(v > 1e-6)), int(np.sum(v < -1e-6))
            assert max(pos, neg) >= J

    def test_exact_basis_sign_bound(self):
        J = 3
        exps = lattice(J, 3)
        for v in null_relation_basis(exps, J):
            sc = sign_counts(relation_from_vector(exps, v, J))
            assert sc.bound_check and max(sc.positives, sc.negatives) >= J

    def test_full_rank_distinct(self):
        M = gram_matrix([(1.0, 1.0), (2.5, 1.0), (1.0, 3.7)])
        assert numerical_null_space(M) == []


class TestMonteCarlo:
    def test_witness_is_zero(self):
        w = shift_witness((1.5, 2.0, 0.8))
        mean, largest, se = mc_discrepancy(w.G0, w.G1, n_samples=20_000, seed=1)
        assert largest < 1e-12 and se < 1e-12

    def test_different_mixtures(self):
        mean, largest, se = mc_discrepancy(dirac((1.0, 1.0)), dirac((2.0, 1.0)), n_samples=20_000, seed=1)
        # |1 - 2 x_1| has mean 1/2 under the uniform reference
        assert mean == pytest.approx(0.5, abs=5 * se + 1e-3)
        assert largest > 10 * se

    def test_deterministic(self):
        G, H = dirac((1.5, 1.0)), dirac((1.0, 2.0))
        assert mc_discrepancy(G, H, n_samples=25_000, seed=4) == mc_discrepancy(G, H, n_samples=25_000, seed=4)

    def test_orthant(self):
        w = embed_witness((F(3, 2), F(2), F(1)), "ibl")
        mean, largest, _ = mc_discrepancy(w.G0, w.G1, n_samples=5_000, seed=0)
        assert largest < 1e-10

    def test_minimum_samples(self):
        with pytest.raises(ValueError):
            mc_discrepancy(dirac((1.0, 1.0)), dirac((2.0, 1.0)), n_samples=10)


class TestCertify:
    def test_single_atom(self):
        regimes = {c.regime for c in certify(dirac((1, 2, 3)))}
        assert regimes == {"fixed_total_slice", "box_region", "few_atoms"}

    def test_few_atoms(self):
        G = MixingMeasure((((1, 2, 3), F(1, 2)), ((5, 1, 1), F(1, 2))))
        (c,) = [c for c in certify(G) if isinstance(c, FewAtoms)]
        assert (c.K, c.J) == (2, 3)

    def test_shift_witness_pair(self):
        w = shift_witness((F(1), F(1), F(1)))
        assert certify(w.G0, w.G1) == []

    def test_box_region_baseline(self):
        G = MixingMeasure((((1, F(3, 2), 9), F(1, 2)), ((F(3, 2), 1, 2), F(1, 2))), K.DIRICHLET)
        boxes = [c for c in certify(G) if isinstance(c, BoxRegion)]
        assert boxes[0].baseline == 3
        assert boxes[0].to_json()["intervals"] == [["1", "3/2"], ["1", "3/2"]]

    def test_box_region_other_baseline(self):
        G = MixingMeasure((((5, 1, F(3, 2)), F(1, 2)), ((1, F(3, 2), 1), F(1, 2))))
        (box,) = [c for c in certify(G) if isinstance(c, BoxRegion)]
        assert box.baseline == 1

    def test_fixed_total(self):
        G = MixingMeasure((((1, 3), F(1, 2)), ((2, 2), F(1, 2))))
        (c,) = [c for c in certify(G) if isinstance(c, FixedTotalSlice)]
        assert c.A == 4

    def test_certificates_are_sound(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            J = int(rng.integers(2, 4))
            atoms = {tuple(F(int(k), 2) for k in rng.integers(1, 8, size=J)) for _ in range(int(rng.integers(1, 4)))}
            G = MixingMeasure(tuple((a, F(1, len(atoms))) for a in atoms))
            H = expansion_witness(next(iter(atoms)), [0]).G1
            if certify(G, H):
                assert not decide_equality(G, H).equal or G.same_as(H)

    def test_rejects_discrete(self):
        with pytest.raises(ValueError):
            certify(dm_witness((F(1), F(2)), 2).G0)


class TestDecideEquality:
    def test_shift_witness_exact(self):
        w = shift_witness((F(1, 2), F(3, 2), F(2)))
        cert = decide_equality(w.G0, w.G1)
        assert cert.verdict == EQUAL and cert.method == EXACT_POLYNOMIAL
        assert cert.residual == 0 and cert.sign_counts == (3, 1)

    def test_distinct_exact(self):
        cert = decide_equality(dirac((1, 1)), dirac((2, 1)))
        assert cert.verdict == NOT_EQUAL and cert.residual > 0

    def test_float_l2(self):
        w = shift_witness((1.5, 2.0, 0.8))
        cert = decide_equality(w.G0, w.G1)
        assert cert.verdict == EQUAL and cert.method == CLOSED_FORM_L2
        assert cert.details["classes"] == 1

    def test_float_mc(self):
        cert = decide_equality(dirac((0.3, 1.0)), dirac((0.4, 1.0)), n_samples=20_000)
        assert cert.method == MONTE_CARLO and cert.verdict == NOT_EQUAL

    def test_mc_never_equal(self):
        w = shift_witness((0.3, 0.4))
        cert = decide_equality(w.G0, w.G1, n_samples=20_000)
        assert cert.method == MONTE_CARLO and cert.verdict == INCONCLUSIVE

    @pytest.mark.parametrize("target", ["gd", "bl", "ibl"])
    def test_embedded_witness(self, target):
        w = embed_witness((F(1), F(2), F(3)), target)
        assert decide_equality(w.G0, w.G1).verdict == EQUAL

    def test_dm_witness(self):
        w = dm_witness((F(1, 2), F(3, 2), F(2)), 3)
        cert = decide_equality(w.G0, w.G1, context=w.context)
        assert cert.verdict == EQUAL and cert.method == ENUMERATION

    def test_lda_witness(self):
        w = lda_witness((F(1), F(2)), ((F(1, 2), F(1, 2)), (F(1, 3), F(2, 3))), (1, 2))
        assert decide_equality(w.G0, w.G1, context=w.context).verdict == EQUAL

    def test_discrete_needs_context(self):
        w = dm_witness((F(1), F(2)), 2)
        with pytest.raises(ValueError):
            decide_equality(w.G0, w.G1)

    def test_family_mismatch(self):
        with pytest.raises(ValueError):
            decide_equality(dirac((1, 1)), MixingMeasure((((1, 1), 1),), K.INVERTED_DIRICHLET))

    def test_forced_exact_on_floats(self):
        with pytest.raises(TypeError):
            decide_equality(dirac((1.5, 1.0)), dirac((1.5, 1.0)), method=EXACT_POLYNOMIAL)

    def test_expansion_chain(self):
        w = expansion_witness((F(1, 3), F(2), F(5, 4)), [0, 2, 1, 0])
        assert decide_equality(w.G0, w.G1).equal


class TestCertificateJSON:
    def test_round_trip_exact(self):
        w = shift_witness((F(1), F(2)))
        cert = decide_equality(w.G0, dirac((F(3), F(2))))
        back = RelationCertificate.from_json(cert.to_json())
        assert back == cert and isinstance(back.residual, Fraction)

    def test_round_trip_float(self):
        cert = decide_equality(dirac((1.5, 1.0)), dirac((2.5, 1.0)))
        assert RelationCertificate.from_json(cert.to_json()) == cert

    @pytest.mark.parametrize(
        "args",
        [
            ("maybe", EXACT_POLYNOMIAL, 0),
            (EQUAL, EXACT_POLYNOMIAL, F(1, 2)),
            (EQUAL, MONTE_CARLO, 0.0),
            (NOT_EQUAL, CLOSED_FORM_L2, -1.0),
        ],
    )
    def test_invariants(self, args):
        with pytest.raises(ValueError):
            RelationCertificate(*args)
