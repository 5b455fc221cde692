import math

import numpy as np
import pytest
from scipy import integrate

from carleson_admit.errors import DomainError, UnboundedNormError
from carleson_admit.laplace import (
    check_kernel_square_bounds,
    hardy_norm,
    kernel,
    kernel_norm,
    kernel_norm_quadrature,
    kernel_square_bounds,
    laplace,
    reproducing_residual,
)
from carleson_admit.measure import CarlesonSquare, ImaginaryInterval
from carleson_admit.signals import grid_signal, kernel_signal, modulated_indicator, zero_signal


def quad_laplace(f, z, upper):
    """Direct quadrature of ``int e^{-zt} f(t) dt`` (independent oracle)."""
    pts = [p for p in f.breakpoints() if 0 < p < upper]

    def part(fn):
        return integrate.quad(lambda t: fn(np.exp(-z * t) * f(np.array(t))), 0.0, upper, points=pts or None,
                              limit=400, epsabs=1e-14, epsrel=1e-13)[0]

    return complex(part(np.real), part(np.imag))


class TestLaplace:
    def test_unit_indicator(self):
        val = laplace(modulated_indicator(0, 1), 1.0)
        assert val == pytest.approx(1 - math.exp(-1), rel=1e-15)
        assert val == pytest.approx(quad_laplace(modulated_indicator(0, 1), 1.0, 1.0), rel=1e-12)

    @pytest.mark.parametrize("z", [0.3 + 2j, 2.0 - 5j, 1e-9 + 1j])
    def test_modulated_indicator_matches_quadrature(self, z):
        f = modulated_indicator(0.5, 2.0, c=1.5, coef=2 - 1j)
        assert laplace(f, z) == pytest.approx(quad_laplace(f, z, 2.0), rel=1e-11, abs=1e-14)

    def test_removable_singularity(self):
        f = modulated_indicator(0.5, 2.0, c=3.0)
        assert laplace(f, 3j) == pytest.approx(1.5, rel=1e-15)
        assert laplace(f, 3j + 1e-12) == pytest.approx(1.5, rel=1e-10)

    def test_compact_support_any_z(self):
        f = modulated_indicator(0, 1)
        assert laplace(f, -2.0) == pytest.approx((math.exp(2) - 1) / 2, rel=1e-14)

    @pytest.mark.parametrize("lam", [1.0, 2 + 3j, 0.1 - 1j])
    def test_kernel_transform(self, lam):
        z = np.array([0.5 + 1j, 3.0, 1e-3 - 7j])
        np.testing.assert_allclose(laplace(kernel_signal(lam), z), kernel(lam, z), rtol=1e-15)
        np.testing.assert_allclose(kernel(lam, z), 1 / (2 * np.pi * (z + np.conj(lam))), rtol=1e-15)

    def test_exponential_divergence(self):
        with pytest.raises(DomainError):
            laplace(kernel_signal(1.0), -2.0)

    def test_vectorised_and_linear(self):
        f = modulated_indicator(0, 1)
        g = grid_signal([0, 0.5, 3], [1j, -2.0])
        z = np.array([0.5 + 1j, 2.0, 1 - 3j])
        np.testing.assert_allclose(laplace(f + g.scaled(2), z), laplace(f, z) + 2 * laplace(g, z), rtol=1e-14)

    def test_contractive_on_right_half_plane(self):
        rng = np.random.default_rng(3)
        g = grid_signal(np.arange(6.0), rng.normal(size=5) + 1j * rng.normal(size=5))
        z = rng.uniform(0, 3, 50) + 1j * rng.normal(0, 10, 50)
        assert np.all(np.abs(laplace(g, z)) <= g.l1_norm() * (1 + 1e-12))


class TestKernelNorm:
    def test_examples(self):
        assert kernel_norm(1.0, 2) == pytest.approx(math.sqrt(1 / (8 * math.pi**2)), rel=1e-15)
        assert kernel_norm(1.0, 1) == pytest.approx(1 / (2 * math.pi), rel=1e-15)
        for p in (1, 2, 4):
            assert kernel_norm(2.0, p) == pytest.approx(2 ** (-1 / p) * kernel_norm(1.0, p), rel=1e-15)

    @pytest.mark.parametrize("lam", [1.0, 2 + 3j, 0.1])
    @pytest.mark.parametrize("p", [1, 2, 4])
    def test_quadrature(self, lam, p):
        assert kernel_norm_quadrature(lam, p) ** p == pytest.approx(kernel_norm(lam, p) ** p, rel=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            kernel_norm(-1.0, 2)
        with pytest.raises(DomainError):
            kernel_norm(1.0, 0.5)


class TestKernelSquareBounds:
    def test_length_two(self):
        lo, hi = kernel_square_bounds(ImaginaryInterval(0.0, 2.0))
        assert lo == pytest.approx(1 / (2 * math.sqrt(10) * math.pi))
        assert hi == pytest.approx(1 / (2 * math.pi))

    def test_centre_value(self):
        I = ImaginaryInterval(3.0, 4.0)
        c = CarlesonSquare(I).center
        val = abs(kernel(c, c))
        assert val == pytest.approx(1 / (2 * math.pi * I.length), rel=1e-15)
        lo, hi = kernel_square_bounds(I)
        assert lo <= val <= hi

    def test_scaling(self):
        a = kernel_square_bounds(ImaginaryInterval(0.0, 1.0))
        b = kernel_square_bounds(ImaginaryInterval(5.0, 8.0))
        assert b[0] == pytest.approx(a[0] / 8) and b[1] == pytest.approx(a[1] / 8)

    @pytest.mark.parametrize("L", [0.5, 2.0, 16.0])
    def test_sampled(self, L):
        chk = check_kernel_square_bounds(ImaginaryInterval(-1.0, L), samples=500, rng=11)
        assert chk.ok and chk.samples > 400


def plancherel(f, shift):
    """``2 pi int |e^{-shift t} f(t)|^2 dt`` evaluated on the time side."""
    return 2 * math.pi * integrate.quad(
        lambda t: abs(np.exp(-shift * t) * f(np.array(t))) ** 2, 0.0, f.support_end,
        points=list(f.breakpoints()[1:-1]) or None, limit=400, epsabs=1e-14,
    )[0] if math.isfinite(f.support_end) else None


class TestHardyNorm:
    @pytest.mark.parametrize("shift", [0.0, 0.5])
    def test_kernel_l2(self, shift):
        # time side: 2 pi int (1/2pi)^2 e^{-2(1+shift)t} dt
        exact = 1 / (4 * math.pi * (1 + shift))
        est = hardy_norm(kernel_signal(1.0), 2, shift=shift)
        assert est.converged
        assert est.value <= exact * (1 + 1e-9)
        assert est.value == pytest.approx(exact, rel=2e-4)

    @pytest.mark.parametrize("f", [modulated_indicator(0, 1), modulated_indicator(0.5, 1.5, 3.0, 1j)])
    def test_indicators_l2(self, f):
        for shift in (0.0, 0.5):
            exact = plancherel(f, shift)
            est = hardy_norm(f, 2, shift=shift)
            assert est.value <= exact * (1 + 1e-9)
            assert est.value + est.tail_bound >= exact * (1 - 5e-4)

    def test_shift_monotone(self):
        f = grid_signal([0, 0.5, 1.5], [1.0, 0.5])
        vals = [hardy_norm(f, 3, shift=s, max_nodes=1 << 16).value for s in (0.0, 0.5, 2.0)]
        assert vals[0] >= vals[1] >= vals[2]

    def test_zero(self):
        assert hardy_norm(zero_signal(), 2).value == 0.0

    def test_p_one_unbounded(self):
        with pytest.raises(UnboundedNormError):
            hardy_norm(modulated_indicator(0, 1), 1)

    def test_budget_exhaustion_is_reported(self):
        est = hardy_norm(modulated_indicator(0, 1), 2, epsilon_grid=(1e-3,), max_nodes=1 << 12)
        assert not est.converged
        assert est.tail_bound > 0


class TestReproducingFormula:
    def test_kernel_at_two(self):
        assert reproducing_residual(kernel_signal(1.0), 2.0) < 1e-6

    def test_random_pairs(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            lam = complex(rng.uniform(0.2, 3), rng.normal(0, 3))
            mu = complex(rng.uniform(0.2, 3), rng.normal(0, 3))
            F = lambda z, mu=mu: kernel(mu, z)  # noqa: E731
            assert reproducing_residual(F, lam, points=[-mu.imag]) < 1e-6

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    def test_indicator_transform(self):
        # the boundary values oscillate with 1/y^2 decay, so quad stalls near 1e-6
        assert reproducing_residual(modulated_indicator(0, 1), 1 + 1j) < 1e-5

    def test_domain(self):
        with pytest.raises(DomainError):
            reproducing_residual(kernel_signal(1.0), -1.0)
