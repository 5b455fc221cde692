import math
from fractions import Fraction

import numpy as np
import pytest

from carleson_admit import embedding as emb
from carleson_admit.errors import DomainError
from carleson_admit.laplace import laplace
from carleson_admit.measure import DiscreteMeasure, ImaginaryInterval, alpha_intensity, summability_functionals
from carleson_admit.orlicz import LINF, ExpAlphaYoung, ExpYoung, PowerYoung, indicator_norm, luxemburg_norm
from carleson_admit.signals import modulated_indicator


def geometric_measure(N, q):
    n = np.arange(1, N + 1)
    return DiscreteMeasure(2.0**n, 2.0 ** (n * q) / n**2)


@pytest.fixture
def intervals():
    rng = np.random.default_rng(2)
    return {n: ImaginaryInterval(rng.normal(0, 10), 2.0 ** (n + 1)) for n in range(-3, 7)}


class TestConstants:
    def test_step_one_lower(self):
        assert emb.STEP1_LOWER == pytest.approx(0.07312197, rel=1e-7)

    def test_carleson_constant_by_direct_sum(self):
        # block sum of the Poisson bound, truncated far out
        j = np.arange(1, 2_000_001, dtype=float)
        terms = np.minimum(1 / (3 * (2 * j - 1)), 3 / (1 + 9 * (j - 0.5) ** 2))
        direct = 3 / math.pi * (1 + 2 * math.fsum(terms))
        assert emb.KAPPA_CARLESON == pytest.approx(direct, rel=1e-6)

    def test_hausdorff_young(self):
        assert emb.hausdorff_young_constant(2) == pytest.approx(math.sqrt(2 * math.pi))
        assert emb.hausdorff_young_constant(math.inf) == 1.0


class TestTestFamilies:
    def test_fn_support_and_frequency(self, intervals):
        f = emb.test_family_fn(2, intervals[2])
        (p,) = f.pieces
        assert (p.a, p.b) == (0.125, 0.25)
        assert p.freq == intervals[2].center

    def test_fn_wrong_length(self):
        with pytest.raises(DomainError):
            emb.test_family_fn(2, ImaginaryInterval(0.0, 4.0))

    def test_step_one(self, intervals):
        rng = np.random.default_rng(0)
        for n, iv in intervals.items():
            z = emb.sample_right_half(n, iv, 100, rng)
            F = {m: np.abs(laplace(emb.test_family_fn(m, intervals[m]), z)) for m in intervals}
            assert np.all(F[n] >= emb.STEP1_LOWER * 2.0 ** (-n - 1))
            for m in intervals:
                assert np.all(F[m] <= 2.0 ** (-n - abs(n - m)))

    def test_step_two(self, intervals):
        rng = np.random.default_rng(1)
        G = {k: emb.test_family_gk("linf", k, intervals, 8) for k in range(8)}
        for n, iv in intervals.items():
            z = emb.sample_right_half(n, iv, 100, rng)
            Fn = np.abs(laplace(emb.test_family_fn(n, iv), z))
            assert np.all(np.abs(laplace(G[n % 8], z)) >= 0.5 * Fn)

    def test_smallness_condition(self, intervals):
        with pytest.raises(DomainError):
            emb.test_family_gk("linf", 0, intervals, 7)

    def test_linf_family_is_unimodular(self, intervals):
        g = emb.test_family_gk("linf", 3, intervals, 8)
        assert luxemburg_norm(g, LINF) == 1.0

    @pytest.mark.parametrize("k", [0, 1, 2])
    @pytest.mark.parametrize("N", [2, 3, 4])
    def test_exp_normalisation(self, k, N):
        ivs = {j: ImaginaryInterval(0.0, 2.0 ** (j + 1)) for j in range(0, 40)}
        g = emb.test_family_gk("exp", k, ivs, N)
        series = emb.exp_family_series(k, N)
        assert series == Fraction(1, 2 ** (k + 1)) / (1 - Fraction(2, 2**N))
        assert emb.exp_family_integral(g) <= float(series) <= 1

    def test_exp_alpha_family(self):
        ivs = {j: ImaginaryInterval(0.0, 2.0 ** (j + 1)) for j in range(0, 12)}
        g = emb.test_family_gk("exp_alpha", 0, ivs, 2, alpha=2.0)
        assert g.sup_norm() == pytest.approx(math.sqrt(math.log(2) * 5))


class TestLowerBound:
    def test_single_atom(self):
        mu = DiscreteMeasure([2.0 + 1j], [1.0])
        # the constant-phase indicator on (0, T/x] gets (1 - e^{-T})/x
        assert emb.embedding_lower_bound(mu, 2) >= (1 - math.exp(-4)) / 2.0 - 1e-15

    def test_is_attained_by_a_signal(self):
        mu = geometric_measure(5, 2)
        val, g = emb.embedding_lower_bound(mu, 2, return_signal=True)
        assert val == pytest.approx(emb.lq_mu_norm(g, mu, 2) / luxemburg_norm(g, LINF), rel=1e-15)

    def test_budget_needs_seed(self):
        with pytest.raises(DomainError):
            emb.embedding_lower_bound(geometric_measure(3, 2), 2, budget=4)

    def test_budget_is_reproducible_and_monotone(self):
        mu = geometric_measure(4, 2)
        base = emb.embedding_lower_bound(mu, 2)
        a = emb.embedding_lower_bound(mu, 2, budget=8, seed=7)
        assert a == emb.embedding_lower_bound(mu, 2, budget=8, seed=7)
        assert a >= base

    def test_empty(self):
        assert emb.embedding_lower_bound(DiscreteMeasure([], []), 2) == 0.0


class TestUpperBound:
    @pytest.mark.parametrize("q", [2.0, 3.0])
    def test_sandwich(self, q):
        mu = geometric_measure(6, q)
        est = emb.embedding_estimate(mu, q)
        assert est.lower_bound <= est.mc_estimate <= est.upper_bound

    def test_homogeneity(self):
        mu = geometric_measure(5, 2)
        big = DiscreteMeasure(mu.points, 9 * mu.weights)
        assert emb.embedding_upper_bound(big, 2) == pytest.approx(3 * emb.embedding_upper_bound(mu, 2), rel=1e-12)

    def test_constant_overrides(self):
        mu = geometric_measure(3, 2)
        base = emb.upper_bound_terms(mu, 2)
        scaled = emb.upper_bound_terms(mu, 2, kappa_carleson=4 * emb.KAPPA_CARLESON)
        assert scaled.value == pytest.approx(2 * base.value, rel=1e-12)
        assert base.constants["kappa_holder"] == 1.0

    def test_orlicz_space_costs_more(self):
        mu = geometric_measure(4, 2)
        assert emb.embedding_upper_bound(mu, 2, ExpYoung()) > emb.embedding_upper_bound(mu, 2)

    def test_needs_q_two(self):
        with pytest.raises(DomainError):
            emb.upper_bound_terms(geometric_measure(3, 2), 1.5)

    def test_as_composed(self):
        assert isinstance(emb.as_composed(ExpYoung(), 2), ExpAlphaYoung)
        assert emb.as_composed(ExpAlphaYoung(3.0), 2).alpha == 1.5
        assert emb.as_composed(PowerYoung(3.0), 3) == PowerYoung(2.0)
        with pytest.raises(DomainError):
            emb.as_composed(PowerYoung(1.5), 2)


class TestDecisionFunctionals:
    def test_strip_check(self):
        mu = DiscreteMeasure([1.0, 1.5 + 3j], [1.0, 2.0])
        est = emb.strip_embedding_check(mu, 2, 4, strip=(1.0, 2.0))
        assert est.functional_value == alpha_intensity(mu, 2.0)
        assert est.metadata["strip_ratio"] == 2.0
        assert emb.strip_embedding_check(mu, 2, 4).metadata["strip_ratio"] == 1.5
        with pytest.raises(DomainError):
            emb.strip_embedding_check(mu, 2, 4, strip=(1.2, 2.0))

    def test_strip_check_linf(self):
        mu = DiscreteMeasure([1.0], [1.0])
        assert emb.strip_embedding_check(mu, math.inf, 2).metadata["exponent"] == 2.0

    @pytest.mark.parametrize("tau0, M", [(1.0, 0), (2.5, 1), (0.3, -2)])
    def test_finite_time_horizon_index(self, tau0, M):
        est = emb.finite_time_check(geometric_measure(3, 2), 2, tau0)
        assert est.metadata["M"] == M
        assert est.metadata["horizon_independent"]

    def test_exp_check_single_atom(self):
        # the strip-0 atom only enters through the window term; depth is open
        mu = DiscreteMeasure([1.5, 3.0, 2.0 + 10j], [4.0, 8.0, 1.0])
        est = emb.exp_orlicz_embedding_check(mu)
        assert est.metadata["window_term"] == 4.0
        expected = alpha_intensity(mu.select(mu.re >= 2), 2.0) + 4.0
        assert est.functional_value == pytest.approx(expected, rel=1e-15)

    def test_exp_alpha_weights(self):
        mu = geometric_measure(5, 2)
        a = emb.exp_orlicz_embedding_check(mu, 1.0).functional_value
        b = emb.exp_orlicz_embedding_check(mu, 2.0).functional_value
        assert b < a


class TestPsiIntegral:
    def test_monotone_in_n(self):
        vals = [emb.psi_integral_limit_check(10.0, n) for n in (10, 15, 20)]
        assert vals[0] < vals[1] < vals[2] < emb.psi_limit(10.0)

    def test_quadrature_against_antiderivative(self):
        # int v^2 (L - v) e^v dv has an elementary antiderivative
        B, n = 10.0, 12
        V = (n + 1) * math.log(2) - math.log(B * n * n)
        L = V + math.log(2)

        def anti(v):
            p2 = (v * v - 2 * v + 2) * math.exp(v)
            p3 = (v**3 - 3 * v * v + 6 * v - 6) * math.exp(v)
            return L * p2 - p3

        exact = 2.0 ** (1 - n) * (anti(V) - anti(0.0))
        assert emb.psi_integral_limit_check(B, n) == pytest.approx(exact, rel=1e-12)

    def test_large_n_limits(self):
        # leading order: the displayed form tends to (1 + log 2) times the corrected one
        lim = emb.psi_limit(10.0)
        assert emb.psi_integral_limit_check(10.0, 20000, fubini_corrected=True) == pytest.approx(lim, rel=5e-3)
        assert emb.psi_integral_limit_check(10.0, 20000) == pytest.approx((1 + math.log(2)) * lim, rel=5e-3)

    def test_corrected_integrand_is_smaller(self):
        assert emb.psi_integral_limit_check(10, 20, fubini_corrected=True) < emb.psi_integral_limit_check(10, 20)

    def test_preconditions(self):
        with pytest.raises(DomainError):
            emb.psi_integral_limit_check(10, 3)
        with pytest.raises(DomainError):
            emb.psi_integral_limit_check(1e9, 5)


class TestZeroClass:
    def test_curve_nonincreasing(self):
        mu = geometric_measure(4, 2)
        curve = emb.zero_class_curve(mu, 2, ExpYoung(), [1e-3, 1.0, 0.1], 1.0)
        assert [t for t, _ in curve] == [1.0, 0.1, 1e-3]
        vals = [v for _, v in curve]
        assert all(b <= a for a, b in zip(vals, vals[1:]))

    def test_bound_factorises(self):
        mu = geometric_measure(3, 2)
        ub = emb.embedding_upper_bound(mu, 2, ExpYoung())
        assert emb.zero_class_bound(mu, 2, ExpYoung(), 0.5, 1.0, ub) == ub * indicator_norm(0.5, ExpYoung())

    def test_tau_range(self):
        with pytest.raises(DomainError):
            emb.zero_class_bound(geometric_measure(2, 2), 2, ExpYoung(), 2.0, 1.0, 1.0)


def test_lq_mu_norm_matches_definition():
    mu = DiscreteMeasure([1.0 + 1j, 3.0], [0.5, 2.0])
    f = modulated_indicator(0.0, 1.0, 0.5)
    vals = np.abs(laplace(f, mu.points))
    assert emb.lq_mu_norm(f, mu, 3) == pytest.approx((0.5 * vals[0] ** 3 + 2 * vals[1] ** 3) ** (1 / 3), rel=1e-15)


def test_unit_functional_is_reported():
    mu = geometric_measure(4, 2)
    assert emb.embedding_estimate(mu, 2, mc=False).functional_value == summability_functionals(mu, 2).value
