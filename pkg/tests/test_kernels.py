import math

import numpy as np
import pytest

from sl2prop import kernels as kn
from sl2prop.sl2rep import PhysParams

P_LINE = PhysParams(hbar=1.0, m=1.0, omega=1.0, n=0.5)
P_FREE = PhysParams(hbar=1.0, m=1.0, omega=0.0, n=0.5)

# sqrt(1/(2 pi)) e^{-i pi/4}, the coincident-point free kernel at t = 1
FREE_COINCIDENT = 0.28209479177387814 - 0.28209479177387814j
# (1/i) I_0(-i) e^{i}: the order-0 half-line kernel at x1 = x2 = t = 1
H0_N0_REF = 0.64389165088065622 - 0.41343807449223535j


def kv(name, x1, x2, t, params):
    return kn.kernel_values(name, x1, x2, t, params)


class TestFreeKernel:
    def test_coincident_point(self):
        v = kn.free_kernel(kn.KernelPoint(1.3, 1.3, 1.0), P_FREE).value
        assert v == pytest.approx(FREE_COINCIDENT, rel=1e-14)

    def test_modulus_independent_of_separation(self):
        want = math.sqrt(1.0 / (2.0 * math.pi))
        for dx_sep in (0.0, 0.7, 3.1):
            v = kv("free", 1.0 + dx_sep, 1.0, 1.0, P_FREE)
            assert abs(v) == pytest.approx(want, rel=1e-14)

    def test_time_reversal_conjugates(self):
        a = kv("free", 0.4, 1.9, 0.7, P_FREE)
        b = kv("free", 0.4, 1.9, -0.7, P_FREE)
        assert b == np.conj(a)

    def test_rejects_zero_time(self):
        with pytest.raises(ValueError):
            kn.free_kernel(kn.KernelPoint(1.0, 1.0, 0.0), P_FREE)


class TestShoKernel:
    def test_quarter_period_value(self):
        v = kn.sho_kernel(kn.KernelPoint(1.0, 1.0, math.pi / 2), P_LINE).value
        assert abs(v) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-13)
        assert np.angle(v) == pytest.approx(-math.pi / 4 - 1.0, abs=1e-13)

    def test_small_frequency_approaches_free(self):
        p = PhysParams(hbar=1.0, m=1.0, omega=1e-4, n=0.5)
        a = kn.sho_kernel(kn.KernelPoint(1.0, 0.5, 1.0), p).value
        b = kn.free_kernel(kn.KernelPoint(1.0, 0.5, 1.0), p).value
        assert abs(a - b) / abs(b) < 1e-8

    def test_caustic_refusal_reports_nearest(self):
        with pytest.raises(kn.CausticSingularity) as exc:
            kn.sho_kernel(kn.KernelPoint(1.0, 1.0, math.pi - 1e-12), P_LINE)
        assert exc.value.nearest_caustic_time == pytest.approx(math.pi)

    def test_near_caustic_branch_note(self):
        v = kn.sho_kernel(kn.KernelPoint(1.0, 1.0, math.pi - 1e-7), P_LINE)
        assert v.branch_note == "near_caustic"
        v = kn.sho_kernel(kn.KernelPoint(1.0, 1.0, 0.5), P_LINE)
        assert v.branch_note == "principal"

    def test_rejects_zero_frequency(self):
        with pytest.raises(ValueError):
            kn.sho_kernel(kn.KernelPoint(1.0, 1.0, 0.5), P_FREE)

    def test_symmetry_and_time_reversal(self):
        a = kv("sho", 0.3, 1.7, 0.9, P_LINE)
        assert kv("sho", 1.7, 0.3, 0.9, P_LINE) == a
        assert kv("sho", 0.3, 1.7, -0.9, P_LINE) == np.conj(a)


class TestRadialH0Kernel:
    def test_image_combination_is_bit_exact_at_half_order(self):
        for x1, x2, t in [(1.1, 0.8, 0.6), (0.5, 2.0, 1.3), (1.7, 1.7, -0.4)]:
            pub = kv("radial_h0", x1, x2, t, P_FREE)
            img = kn._free_value(x1, x2, t, P_FREE) - kn._free_value(x1, -x2, t, P_FREE)
            assert pub == complex(img)

    def test_bessel_route_reproduces_image_formula(self):
        # 50 samples; the generic order-n machinery at n = 1/2 must collapse
        # to the free-kernel difference.
        x1s = (0.5, 0.9, 1.3, 1.8, 2.4)
        x2s = (0.6, 1.0, 1.45, 1.9, 2.2)
        for x1 in x1s:
            for x2 in x2s:
                for t in (0.7, 1.9):
                    gen = kn._radial_h0_bessel_value(x1, x2, t, P_FREE)
                    img = kn._free_value(x1, x2, t, P_FREE) \
                        - kn._free_value(x1, -x2, t, P_FREE)
                    assert abs(gen - img) / abs(img) < 1e-12

    def test_order_zero_value(self):
        p = PhysParams(hbar=1.0, m=1.0, omega=0.0, n=0.0)
        v = kv("radial_h0", 1.0, 1.0, 1.0, p)
        assert v == pytest.approx(H0_N0_REF, rel=1e-13)

    def test_hermitian_symmetry_exact(self):
        p = PhysParams(n=2.5, omega=0.0)
        x = np.linspace(0.4, 2.6, 9)
        mat = kv("radial_h0", x[:, None], x[None, :], 0.8, p)
        assert np.array_equal(mat, mat.T)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            kn.radial_h0_kernel(kn.KernelPoint(0.0, 1.0, 0.5), P_FREE)
        with pytest.raises(ValueError):
            kn.radial_h0_kernel(kn.KernelPoint(1.0, -1.0, 0.5), P_FREE)
        with pytest.raises(ValueError):
            kn.radial_h0_kernel(kn.KernelPoint(1.0, 1.0, 0.0), P_FREE)


class TestRadialShoKernel:
    def test_small_frequency_approaches_h0(self):
        p = PhysParams(hbar=1.0, m=1.0, omega=1e-4, n=2.5)
        a = kv("radial_sho", 0.9, 1.2, 0.8, p)
        b = kv("radial_h0", 0.9, 1.2, 0.8, p)
        assert abs(a - b) / abs(b) < 1e-8

    def test_short_time_ratio_to_free(self):
        # Pointwise on the real-time axis the reflected saddle keeps unit
        # modulus, so the free-kernel limit is read off in the damped
        # half-plane, where the deviation is O(t) and halves with t.
        p = PhysParams(n=1.5, omega=1.0)
        eps = 0.35
        devs = []
        for t in [0.2 / 2**j for j in range(5)]:
            tc = t * (1.0 - 1j * eps)
            ratio = kn._radial_sho_bessel_value(1.5, 1.5, tc, p) \
                / kn._free_value(1.5, 1.5, tc, p)
            devs.append(abs(ratio - 1.0))
        for a, b in zip(devs, devs[1:]):
            assert 1.5 < a / b < 2.5

    def test_half_order_matches_oscillator_image(self):
        # generic Bessel machinery at n = 1/2, wt = pi/4 against the
        # oscillator image combination
        t = math.pi / 4
        for x1, x2 in [(1.0, 1.0), (0.7, 1.6), (2.1, 0.9)]:
            gen = kn._radial_sho_bessel_value(x1, x2, t, P_LINE)
            img = kn._sho_value(x1, x2, t, P_LINE) - kn._sho_value(x1, -x2, t, P_LINE)
            assert abs(gen - img) / abs(img) < 1e-12

    def test_effective_time_wrapping(self):
        # oscillator kernel = quadratic phases around the w = 0 kernel at
        # t_eff = sin(wt)/w, the package's central re-parameterization
        p = PhysParams(n=2.5, omega=1.0)
        t = 0.9
        te = kn.effective_time(t, p.omega)
        assert te == pytest.approx(math.sin(0.9), rel=1e-15)
        alpha = 0.5 * math.tan(t / 2)
        for x1, x2 in [(0.8, 1.1), (1.9, 0.6)]:
            wrapped = (
                np.exp(-1j * alpha * x1**2)
                * kn._radial_h0_bessel_value(x1, x2, te, p)
                * np.exp(-1j * alpha * x2**2)
            )
            direct = kn._radial_sho_bessel_value(x1, x2, t, p)
            assert abs(wrapped - direct) / abs(direct) < 1e-13

    def test_caustic_and_domain(self):
        p = PhysParams(n=1.5, omega=1.0)
        with pytest.raises(kn.CausticSingularity):
            kn.radial_sho_kernel(kn.KernelPoint(1.0, 1.0, math.pi), p)
        with pytest.raises(ValueError):
            kn.radial_sho_kernel(kn.KernelPoint(-1.0, 1.0, 0.5), p)

    def test_symmetry_and_time_reversal(self):
        p = PhysParams(n=2.5, omega=1.0)
        a = kv("radial_sho", 1.2, 0.7, 0.9, p)
        assert kv("radial_sho", 0.7, 1.2, 0.9, p) == a
        assert kv("radial_sho", 1.2, 0.7, -0.9, p) == np.conj(a)


class TestEffectiveTime:
    def test_zero_frequency_identity(self):
        assert kn.effective_time(0.8, 0.0) == 0.8

    def test_periodic_in_frequency(self):
        assert kn.effective_time(0.5, 2.0) == pytest.approx(math.sin(1.0) / 2.0)


class TestRoutes:
    def test_element_reproduces_oscillator_closed_form(self):
        # the cot(2 theta) = -tan(theta) + 1/sin(2 theta) recombination,
        # numerically: phases x free(t_eff) equals the single closed form
        for x1, x2, wt in [(1.0, 1.0, 0.8), (-0.7, 1.4, 0.45), (2.0, -1.1, 1.2)]:
            pt = kn.KernelPoint(x1, x2, wt)
            r = kn.kernel_via_route("ELEMENT", pt, P_LINE, halfline=False).value
            d = kn.sho_kernel(pt, P_LINE).value
            assert abs(r - d) / abs(d) < 1e-12

    def test_a1a_coupling_free(self):
        pt = kn.KernelPoint(1.1, 0.6, 0.4)
        r = kn.kernel_via_route("A1a", pt, P_LINE, halfline=False).value
        d = kn.sho_kernel(pt, P_LINE).value
        assert abs(r - d) / abs(d) < 1e-12

    def test_element_halfline_order_three_halves(self):
        p = PhysParams(n=1.5, omega=1.0)
        pt = kn.KernelPoint(1.3, 0.9, 0.6)
        r = kn.kernel_via_route("ELEMENT", pt, p).value
        d = kn.radial_sho_kernel(pt, p).value
        assert abs(r - d) / abs(d) < 1e-10

    @pytest.mark.parametrize("route", ["ELEMENT", "A1a", "A2a", "A3a"])
    def test_route_equivalence_grid_halfline(self, route):
        # 5 x 5 x 7 grid in (x1, x2, wt), order 5/2
        p = PhysParams(n=2.5, omega=1.0)
        x1s = np.linspace(0.5, 2.5, 5)
        x2s = np.linspace(0.4, 2.2, 5)
        wts = np.linspace(-1.4, 1.4, 7)
        for wt in wts:
            if abs(wt) < 0.05:
                continue  # t = 0 is the delta limit, not a kernel value
            pt = kn.KernelPoint(x1s[:, None], x2s[None, :], float(wt))
            r = kn.kernel_via_route(route, pt, p).value
            d = kn.radial_sho_kernel(pt, p).value
            assert np.max(np.abs(r - d) / np.abs(d)) < 1e-10

    @pytest.mark.parametrize("route", ["ELEMENT", "A1a", "A2a", "A3a"])
    def test_route_equivalence_grid_line(self, route):
        x1s = np.linspace(-2.0, 2.0, 5)
        x2s = np.linspace(-1.8, 2.2, 5)
        wts = np.linspace(-1.4, 1.4, 7)
        for wt in wts:
            if abs(wt) < 0.05:
                continue
            pt = kn.KernelPoint(x1s[:, None], x2s[None, :], float(wt))
            r = kn.kernel_via_route(route, pt, P_LINE, halfline=False).value
            d = kn.sho_kernel(pt, P_LINE).value
            assert np.max(np.abs(r - d) / np.abs(d)) < 1e-10

    def test_direct_route_is_the_closed_form(self):
        p = PhysParams(n=2.5, omega=1.0)
        pt = kn.KernelPoint(1.2, 0.8, 0.7)
        assert kn.kernel_via_route("DIRECT", pt, p).value == \
            kn.radial_sho_kernel(pt, p).value

    def test_route_validity_windows(self):
        p = PhysParams(n=2.5, omega=1.0)
        with pytest.raises(ValueError):
            kn.kernel_via_route("A1a", kn.KernelPoint(1.0, 1.0, 0.6 * math.pi), p)
        with pytest.raises(kn.CausticSingularity):
            kn.kernel_via_route("ELEMENT", kn.KernelPoint(1.0, 1.0, math.pi), p)
        with pytest.raises(ValueError):
            kn.kernel_via_route("ELEMENT", kn.KernelPoint(1.0, 1.0, 0.5), p,
                                halfline=False)  # needs lam = 0
        with pytest.raises(ValueError):
            kn.kernel_via_route("B9", kn.KernelPoint(1.0, 1.0, 0.5), p)


class TestSemigroup:
    """Composition law at damped complex time, where the half-line integral
    converges absolutely; the damped evolution obeys the same semigroup."""

    def test_radial_sho(self):
        p = PhysParams(n=1.5, omega=1.0)
        eps = 0.12
        t1, t2 = 0.35, 0.45
        y = np.linspace(1e-9, 25.0, 4000)
        w = np.full(y.size, y[1] - y[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        lhs = np.sum(
            w
            * kn._radial_sho_bessel_value(1.3, y, t1 * (1 - 1j * eps), p)
            * kn._radial_sho_bessel_value(y, 0.9, t2 * (1 - 1j * eps), p)
        )
        rhs = kn._radial_sho_bessel_value(1.3, 0.9, (t1 + t2) * (1 - 1j * eps), p)
        assert abs(lhs - rhs) / abs(rhs) < 1e-6

    def test_free_full_line(self):
        eps = 0.12
        t1, t2 = 0.35, 0.45
        y = np.linspace(-30.0, 30.0, 6000)
        w = np.full(y.size, y[1] - y[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        lhs = np.sum(
            w
            * kn._free_value(1.3, y, t1 * (1 - 1j * eps), P_FREE)
            * kn._free_value(y, 0.9, t2 * (1 - 1j * eps), P_FREE)
        )
        rhs = kn._free_value(1.3, 0.9, (t1 + t2) * (1 - 1j * eps), P_FREE)
        assert abs(lhs - rhs) / abs(rhs) < 1e-6
