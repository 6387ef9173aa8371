import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate, stats

from dirimix import kernels as K
from dirimix.errors import DomainError, FeasibilityError
from dirimix.witnesses import MixingMeasure, embed, shift_witness


def _triangle_integral(spec, n=1000):
    """Midpoint rule on the unit triangle through x1 = u, x2 = (1 - u) v."""
    t = (np.arange(n) + 0.5) / n
    u, v = np.meshgrid(t, t, indexing="ij")
    pts = np.stack([u.ravel(), ((1 - u) * v).ravel()], axis=1)
    f = np.exp(K.kernel_log_density(spec, pts)) * (1 - u.ravel())
    return f.mean()


def _orthant_integral(spec, n=1000):
    """Midpoint rule on (0, inf)^2 through y = t / (1 - t)."""
    t = (np.arange(n) + 0.5) / n
    a, b = np.meshgrid(t, t, indexing="ij")
    y = np.stack([(a / (1 - a)).ravel(), (b / (1 - b)).ravel()], axis=1)
    jac = 1 / ((1 - a.ravel()) ** 2 * (1 - b.ravel()) ** 2)
    return (np.exp(K.kernel_log_density(spec, y)) * jac).mean()


class TestSimplexPoint:
    def test_free_coordinates(self):
        p = K.SimplexPoint([0.2, 0.3])
        np.testing.assert_allclose(p.x, [0.2, 0.3, 0.5])
        assert p.J == 3

    @pytest.mark.parametrize("coords", [[0.5, 0.5], [0.0, 0.3], [-0.1, 0.2], [np.nan, 0.1]])
    def test_boundary_rejected(self, coords):
        with pytest.raises(DomainError):
            K.SimplexPoint(coords)

    def test_full_coordinates_must_sum_to_one(self):
        with pytest.raises(DomainError):
            K.SimplexPoint.from_full([0.2, 0.3, 0.4])

    def test_batch(self):
        p = K.SimplexPoint(np.full((5, 2), 0.25))
        assert p.x.shape == (5, 3)


class TestDirichletDensity:
    def test_uniform_is_log_two(self):
        rng = np.random.default_rng(0)
        for x in rng.dirichlet(np.ones(3), size=5):
            assert K.kernel_log_density(K.Dirichlet((1, 1, 1)), x) == pytest.approx(math.log(2))

    def test_matches_scipy(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            J = int(rng.integers(2, 6))
            alpha = rng.uniform(0.3, 6.0, size=J)
            x = rng.dirichlet(np.ones(J))
            expected = stats.dirichlet.logpdf(x, alpha)
            assert K.dirichlet_log_density(alpha, x) == pytest.approx(expected, abs=1e-11)

    def test_vectorized(self):
        rng = np.random.default_rng(2)
        x = rng.dirichlet(np.ones(3), size=7)
        got = K.dirichlet_log_density((2.0, 0.5, 1.5), x)
        expected = [K.dirichlet_log_density((2.0, 0.5, 1.5), row) for row in x]
        np.testing.assert_allclose(got, expected, rtol=1e-14)

    def test_free_and_full_coordinates_agree(self):
        a = (2.0, 3.0, 4.0)
        assert K.dirichlet_log_density(a, [0.2, 0.3]) == K.dirichlet_log_density(a, [0.2, 0.3, 0.5])

    def test_boundary_rejected(self):
        with pytest.raises(DomainError):
            K.dirichlet_log_density((1, 1), [1.0, 0.0])

    @pytest.mark.parametrize("alpha", [(1.0, 1.0), (2.0, 3.0), (1.5, 4.0)])
    def test_normalization_trapezoid(self, alpha):
        x = np.linspace(1e-6, 1 - 1e-6, 200_001)
        f = np.exp(K.dirichlet_log_density(alpha, np.stack([x, 1 - x], axis=1)))
        assert np.trapezoid(f, x) == pytest.approx(1.0, abs=1e-3)


class TestInvertedDirichlet:
    def test_example(self):
        assert K.kernel_log_density(K.InvertedDirichlet((1, 1)), 1.0) == pytest.approx(math.log(0.25))

    def test_j2_is_beta_prime(self):
        a, b = 2.5, 1.7
        y = np.array([0.3, 1.0, 4.0])
        got = K.kernel_log_density(K.InvertedDirichlet((a, b)), y[:, None])
        np.testing.assert_allclose(got, stats.betaprime.logpdf(y, a, b), atol=1e-12)

    def test_normalization(self):
        spec = K.InvertedDirichlet((1.5, 2.0, 2.5))
        assert _orthant_integral(spec) == pytest.approx(1.0, abs=1e-4)


class TestRicherFamilies:
    def test_gd_embed_example(self):
        spec = embed((1, 2, 3), "gd")
        x = (0.2, 0.3, 0.5)
        assert K.kernel_log_density(spec, x) == pytest.approx(K.dirichlet_log_density((1, 2, 3), x), abs=1e-12)

    def test_gd_j2_is_beta(self):
        spec = K.GeneralizedDirichlet((2.0,), (3.5,))
        assert K.kernel_log_density(spec, [0.3]) == pytest.approx(stats.beta.logpdf(0.3, 2.0, 3.5), abs=1e-12)

    def test_gd_normalization_non_embedded(self):
        spec = K.GeneralizedDirichlet((1.5, 2.0), (4.0, 1.5))
        assert abs(spec.gamma[0]) > 0
        assert _triangle_integral(spec) == pytest.approx(1.0, abs=1e-4)

    def test_bl_j2_is_beta(self):
        spec = K.BetaLiouville((1.3,), 2.2, 3.1)
        assert K.kernel_log_density(spec, [0.4]) == pytest.approx(stats.beta.logpdf(0.4, 2.2, 3.1), abs=1e-12)

    def test_bl_normalization_non_embedded(self):
        spec = K.BetaLiouville((1.5, 2.5), 2.0, 1.5)
        assert _triangle_integral(spec) == pytest.approx(1.0, abs=1e-4)

    def test_ibl_normalization_non_embedded(self):
        spec = K.InvertedBetaLiouville((1.5,), 2.0, 2.5, 0.7)
        val, _ = integrate.quad(lambda y: math.exp(K.kernel_log_density(spec, [y])), 0, np.inf)
        assert val == pytest.approx(1.0, abs=1e-7)

    def test_bl_reduction(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a_vec = rng.uniform(0.5, 4.0, size=2)
            b = rng.uniform(0.5, 4.0)
            spec = K.BetaLiouville(tuple(a_vec), float(a_vec.sum()), float(b))
            x = rng.dirichlet(np.ones(3))
            ref = K.dirichlet_log_density((*a_vec, b), x)
            assert K.kernel_log_density(spec, x) == pytest.approx(ref, abs=1e-12)

    def test_discrete_rejected(self):
        with pytest.raises(TypeError):
            K.kernel_log_density(K.DirichletMultinomial(2, (1, 1)), (1, 1))


class TestDirichletMultinomial:
    def test_examples(self):
        a, b = Fraction(3, 2), Fraction(2, 5)
        assert K.dm_pmf_exact(1, (a, b), (1, 0)) == a / (a + b)
        assert K.dm_pmf_exact(2, (1, 1), (2, 0)) == Fraction(1, 3)

    def test_wrong_total(self):
        with pytest.raises(ValueError):
            K.dm_pmf_exact(3, (1, 1), (1, 1))

    @pytest.mark.parametrize("n, J", [(0, 2), (3, 3), (5, 4)])
    def test_sums_to_one(self, n, J):
        alpha = tuple(Fraction(k + 1, 3) for k in range(J))
        assert sum(K.dm_pmf_exact(n, alpha, x) for x in K.count_vectors(n, J)) == 1

    def test_matches_scipy(self):
        alpha = (0.7, 1.9, 3.2)
        for x in K.count_vectors(4, 3):
            expected = stats.dirichlet_multinomial.logpmf(x, alpha, 4)
            assert K.dm_log_pmf(4, alpha, x) == pytest.approx(expected, abs=1e-12)


class TestLDA:
    def test_examples(self):
        a1, a2 = Fraction(2), Fraction(3)
        eye = ((1, 0), (0, 1))
        assert K.lda_marginal_exact((a1, a2), eye, (1,)) == a1 / (a1 + a2)
        expected = a1 * (a1 + 1) / ((a1 + a2) * (a1 + a2 + 1))
        assert K.lda_marginal_exact((a1, a2), eye, (1, 1)) == expected

    def test_matches_quadrature(self):
        alpha = (Fraction(3, 2), Fraction(5, 2))
        beta = ((Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)), (Fraction(1, 5), Fraction(1, 5), Fraction(3, 5)))
        doc = (1, 3, 3, 2)
        b = np.array([[float(v) for v in row] for row in beta])

        def integrand(t):
            theta = np.array([t, 1 - t])
            return np.prod([theta @ b[:, w - 1] for w in doc]) * stats.beta.pdf(t, 1.5, 2.5)

        val, _ = integrate.quad(integrand, 0, 1, epsabs=1e-14, epsrel=1e-12)
        assert float(K.lda_marginal_exact(alpha, beta, doc)) == pytest.approx(val, rel=1e-9)
        assert K.lda_marginal(alpha, beta, doc) == pytest.approx(val, rel=1e-9)

    def test_empty_document(self):
        assert K.lda_marginal_exact((1, 2), ((1, 0), (0, 1)), ()) == 1

    def test_cap(self):
        with pytest.raises(FeasibilityError):
            K.lda_marginal_exact((1, 2), ((1, 0), (0, 1)), (1,) * 9)

    def test_rows_must_sum_to_one(self):
        with pytest.raises(ValueError):
            K.LDAMarginal((1, 2), ((Fraction(1, 2), Fraction(1, 3)), (0, 1)), (1,))

    def test_word_out_of_range(self):
        with pytest.raises(ValueError):
            K.LDAMarginal((1, 2), ((1, 0), (0, 1)), (3,))


class TestMixtureDensity:
    def test_single_atom(self):
        G = MixingMeasure((((2.0, 3.0, 1.5), 1.0),))
        x = (0.2, 0.5, 0.3)
        assert K.mixture_log_density(G, None, x) == pytest.approx(K.dirichlet_log_density((2.0, 3.0, 1.5), x))

    def test_shift_pair_is_uniform(self):
        G1 = shift_witness((1, 1)).G1
        assert K.mixture_log_density(G1, "dirichlet", (0.5, 0.5)) == pytest.approx(0.0, abs=1e-15)

    def test_duplicate_atoms_rejected(self):
        with pytest.raises(ValueError):
            MixingMeasure((((1, 1), Fraction(1, 2)), ((1, 1), Fraction(1, 2))))


class TestJSON:
    @pytest.mark.parametrize(
        "spec",
        [
            K.Dirichlet((Fraction(1, 2), Fraction(3))),
            K.InvertedDirichlet((1.5, 2.5)),
            K.GeneralizedDirichlet((Fraction(1), Fraction(2)), (Fraction(5), Fraction(3))),
            K.BetaLiouville((1.0, 2.0), 3.0, 3.0),
            K.InvertedBetaLiouville((Fraction(1), Fraction(2)), Fraction(3), Fraction(3), Fraction(1)),
            K.DirichletMultinomial(3, (Fraction(1), Fraction(2))),
        ],
    )
    def test_round_trip(self, spec):
        assert K.kernel_from_json(K.kernel_to_json(spec)) == spec

    def test_aliases(self):
        assert K.family_tag("GD") == K.GENERALIZED_DIRICHLET
        assert K.family_tag("ibl") == K.INVERTED_BETA_LIOUVILLE
        with pytest.raises(ValueError):
            K.family_tag("gaussian")
