import math

import mpmath as mp
import numpy as np
import pytest

from sl2prop import numerics as nm

# Frozen reference values, computed with the mpmath oracles below at 40 dps.
J1_AT_1 = 0.44005058574493352
J0_AT_1 = 0.76519768655796655
J1_AT_2 = 0.57672480775687339
I_HALF_AT_1 = 0.93767488824548765
GAMMA_HALF = 1.7724538509055160
SQRT_PI_OVER_2 = 0.88622692545275801


def series_j_oracle(n, x, terms=30):
    """High-precision ascending series, independent of the implementation."""
    with mp.workdps(40):
        s = mp.mpf(0)
        for k in range(terms):
            s += (-1) ** k * (mp.mpf(x) / 2) ** (2 * k) / (
                mp.factorial(k) * mp.gamma(n + k + 1)
            )
        return float((mp.mpf(x) / 2) ** n * s)


class TestBesselJ:
    def test_at_origin(self):
        assert nm.bessel_j(0, 0.0) == 1.0
        assert nm.bessel_j(1, 0.0) == 0.0
        assert nm.bessel_j(0.5, 0.0) == 0.0

    def test_half_order_closed_form(self):
        # J_{1/2}(x) = sqrt(2/(pi x)) sin x, exact at x = pi/2
        assert nm.bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-14)

    def test_order_one_against_series_oracle(self):
        assert series_j_oracle(1, 1) == pytest.approx(J1_AT_1, rel=1e-15)
        assert nm.bessel_j(1, 1.0) == pytest.approx(J1_AT_1, rel=1e-13)

    def test_matches_oracle_on_grid(self):
        # The alternating series loses ~5 digits to cancellation by x ~ 12,
        # so the comparison floor sits at the documented 1e-12 scale.
        xs = np.linspace(0.1, 11.5, 23)
        for n in (0.0, 1.0, 2.5, 3.7):
            for x in xs:
                ref = series_j_oracle(n, float(x), terms=60)
                assert nm.bessel_j(n, float(x)) == pytest.approx(ref, abs=2e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            nm.bessel_j(1.0, -0.5)
        with pytest.raises(ValueError):
            nm.bessel_j(-1.0, 0.5)

    @pytest.mark.parametrize("n", [0.0, 0.5, 1.0, 2.5])
    def test_crossover_continuity(self, n):
        x = np.array([nm.SERIES_CROSSOVER])
        lo = nm._bessel_j_series(n, x)[0]
        hi = nm._bessel_j_asymptotic(n, x)[0]
        assert abs(lo - hi) < 1e-9

    @pytest.mark.parametrize("n", [1.0, 1.5, 2.5])
    def test_recurrence_residual(self, n):
        x = 0.537 + 0.631 * np.arange(40)
        lhs = nm.bessel_j(n - 1, x) + nm.bessel_j(n + 1, x)
        rhs = (2 * n / x) * nm.bessel_j(n, x)
        scale = np.maximum.reduce([np.abs(lhs), np.abs(rhs), np.full_like(x, 1e-2)])
        assert np.max(np.abs(lhs - rhs) / scale) < 1e-8

    def test_vectorized_matches_scalar(self):
        x = np.array([0.3, 5.0, 20.0])
        vec = nm.bessel_j(2.5, x)
        assert vec.shape == (3,)
        for xi, vi in zip(x, vec):
            assert nm.bessel_j(2.5, float(xi)) == vi


class TestBesselI:
    def test_at_origin(self):
        assert nm.bessel_i_complex(0, 0.0) == 1.0 + 0.0j
        assert nm.bessel_i_complex(2.0, 0.0) == 0.0 + 0.0j

    def test_half_order_real(self):
        # I_{1/2}(z) = sqrt(2/(pi z)) sinh z
        v = nm.bessel_i_complex(0.5, 1.0)
        assert v.real == pytest.approx(I_HALF_AT_1, rel=1e-14)
        assert v.imag == 0.0
        # generic series path reproduces the closed form
        gen = nm._bessel_i_series_scaled(0.5, np.array([1.0 + 0j]))[0] * math.e
        assert gen == pytest.approx(I_HALF_AT_1, rel=1e-13)

    def test_imaginary_axis_example(self):
        v = nm.bessel_i_complex(1.0, 2j)
        assert v == pytest.approx(1j * J1_AT_2, rel=1e-13)

    @pytest.mark.parametrize("n", [0.0, 1.0, 2.5])
    def test_imaginary_axis_connection(self, n):
        y = np.linspace(0.05, 50.0, 211)
        lhs = nm.bessel_i_complex(n, 1j * y)
        rhs = np.exp(1j * n * np.pi / 2) * nm.bessel_j(n, y)
        assert np.max(np.abs(lhs - rhs) / (1 + np.abs(rhs))) <= 1e-10

    @pytest.mark.parametrize("n", [0.0, 0.5, 1.5, 3.0])
    def test_scaled_unscaled_consistency(self, n):
        rng = np.random.default_rng(7)
        z = rng.uniform(-30, 30, 50) + 1j * rng.uniform(-30, 30, 50)
        unscaled = nm.bessel_i_complex(n, z)
        scaled = nm.bessel_i_complex(n, z, scaled=True)
        assert np.allclose(unscaled, scaled * np.exp(np.abs(z.real)), rtol=1e-12)

    def test_scaled_finite_where_unscaled_overflows(self):
        z = 800.0 + 3.0j
        with pytest.raises(OverflowError):
            nm.bessel_i_complex(2.0, z)
        s = nm.bessel_i_complex(2.0, z, scaled=True)
        assert np.isfinite(s.real) and np.isfinite(s.imag)

    def test_series_asymptotic_crossover(self):
        # both I branches agree at |z| = crossover off the imaginary axis
        for n in (0.0, 1.0, 2.5):
            for phase in (0.3, 1.2, -0.8):
                z = np.array([nm.SERIES_CROSSOVER * np.exp(1j * phase)])
                lo = nm._bessel_i_series_scaled(n, z)[0]
                hi = nm._bessel_i_asymptotic_scaled(n, z)[0]
                assert abs(lo - hi) / abs(hi) < 1e-9


class TestGamma:
    def test_values(self):
        assert nm.gamma_real(1.0) == 1.0
        assert nm.gamma_real(0.5) == pytest.approx(GAMMA_HALF, rel=1e-15)
        assert nm.gamma_real(5.0) == 24.0

    def test_domain(self):
        with pytest.raises(ValueError):
            nm.gamma_real(0.0)
        with pytest.raises(ValueError):
            nm.gamma_real(-1.3)


class TestIntegrateOscillatory:
    def test_gaussian_sanity(self):
        spec = nm.QuadratureSpec(panel_count=16, k_max=12.0, epsilon=0.0,
                                 extrapolation_levels=1)
        res = nm.integrate_oscillatory(lambda k, eps: np.exp(-(k**2)), spec)
        assert res.value.real == pytest.approx(SQRT_PI_OVER_2, abs=1e-12)
        assert res.error_estimate < 1e-10

    def test_damped_fresnel_extrapolates(self):
        # integral of k e^{-i k^2 (1 - i eps)/2} over (0, k_max] equals
        # 1/(i (1 - i eps)) up to the truncated tail; the extrapolated value
        # must approach the undamped limit -i far better than any single
        # damping level does.
        spec = nm.QuadratureSpec(panel_count=600, k_max=80.0, epsilon=0.04,
                                 extrapolation_levels=3)

        def f(k, eps):
            tc = 1.0 - 1j * eps
            return k * np.exp(-1j * k**2 * tc / 2.0)

        res = nm.integrate_oscillatory(f, spec)
        raw = nm.integrate_oscillatory(f, spec, eps_schedule=[0.04])
        assert res.value == pytest.approx(-1j, abs=5e-5)
        assert abs(res.value + 1j) < abs(raw.value + 1j) / 100.0

    def test_truncation_failure_raised(self):
        spec = nm.QuadratureSpec(panel_count=8, k_max=5.0, epsilon=0.0,
                                 extrapolation_levels=1)
        with pytest.raises(nm.NonConvergenceError) as exc:
            nm.integrate_oscillatory(lambda k, eps: 1.0 / (1.0 + k**2), spec,
                                     tolerance=1e-6)
        assert exc.value.error_estimate > 1e-6

    def test_default_schedule(self):
        spec = nm.QuadratureSpec(panel_count=4, k_max=1.0)
        assert spec.epsilon_schedule() == [1e-2, 5e-3, 2.5e-3]

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            nm.QuadratureSpec(rule="simpson", panel_count=4, k_max=1.0)
        with pytest.raises(ValueError):
            nm.QuadratureSpec(panel_count=0, k_max=1.0)
        with pytest.raises(ValueError):
            nm.QuadratureSpec(panel_count=4, k_max=-1.0)
        with pytest.raises(ValueError):
            nm.QuadratureSpec(panel_count=4, k_max=1.0, epsilon=1.5)

    def test_trapezoid_rule(self):
        spec = nm.QuadratureSpec(rule="trapezoid", panel_count=64, k_max=12.0,
                                 epsilon=0.0, extrapolation_levels=1)
        res = nm.integrate_oscillatory(lambda k, eps: np.exp(-(k**2)), spec)
        assert res.value.real == pytest.approx(SQRT_PI_OVER_2, abs=1e-8)
