import math

import numpy as np
import pytest
from scipy import integrate

from tumor_interface import spectral as sp
from tumor_interface.depth import DepthProfile, ExpSineProfile, LayeredData
from tumor_interface.errors import InvalidInputError
from tumor_interface.forcing import (ForcingBundle, i_tilde, k0_general, k1_tilde_1,
                                     k2_tilde_1, particular_forcing, pressure_order0, q_alpha,
                                     r1_operator)
from tumor_interface.oracles import exp_sine_moment_closed
from tumor_interface.params import ModelParams

from conftest import random_field

N = 32


def particular_params(**kw):
    base = dict(eps=0.1, eta=1.0, theta=1.0, rho=1.0, tau=1.0, n1=1.0, n2=1.0, n3=1.0,
                c_b=1.0, c_s=2.0)
    base.update(kw)
    return ModelParams(**base)


def profiles(p):
    return ExpSineProfile(p.c_s), ExpSineProfile(p.c_b)


def k0_closed(p, t):
    al = p.c_s - p.n3 * p.c_b * t
    return -(math.exp(-p.n * t) / 2) * p.rho * (al - p.c_b)


class ExpProfile(DepthProfile):
    """``e^{y}``; does not vanish at the surface, used only for pointwise checks."""

    def deriv(self, n, y):
        return np.exp(np.asarray(y, float))

    def envelope(self, n):
        return 1.0, 1.0


class TestK0:
    @pytest.mark.parametrize("t", [0.0, 0.5, 1.0, 5.0])
    def test_closed_form(self, t):
        p = particular_params()
        k0 = k0_general(*profiles(p), p, t, N)
        assert k0.coeffs[0].real == pytest.approx(k0_closed(p, t), abs=1e-8)
        assert np.all(k0.coeffs[1:] == 0)

    def test_no_forcing_without_theta_rho(self):
        p = particular_params(theta=0.0, rho=0.0)
        assert np.all(k0_general(*profiles(p), p, 0.7, N).coeffs == 0)

    def test_t0_value(self):
        p = particular_params(rho=2.0)
        assert k0_general(*profiles(p), p, 0.0, N).mean == pytest.approx(-1.0, abs=1e-12)

    def test_theta_independent(self):
        vals = []
        for th in np.linspace(0, 10, 11):
            p = particular_params(theta=th)
            vals.append(k0_general(*profiles(p), p, 0.9, N).mean)
        assert np.ptp(vals) < 1e-10

    def test_layered_mode_against_direct_quadrature(self):
        # one x1-mode of data, unequal rates: compare with an independent quad of the formula
        s = LayeredData(((ExpSineProfile(1.0), {0: 0.5, 2: 0.3 - 0.1j}),))
        b = LayeredData(((ExpSineProfile(0.8), {2: 0.2j}),))
        p = ModelParams(theta=0.7, rho=1.1, tau=0.6, n1=0.4, n2=0.9, n3=0.5)
        t = 0.8
        cc = p.n3 * math.expm1((p.n2 - p.n1) * t) / (p.n2 - p.n1)
        phi = lambda n, y: 2 ** (n / 2) * np.exp(y) * np.sin(y + n * np.pi / 4)  # noqa: E731
        m = 2
        sm, bm = 0.3 - 0.1j, 0.2j

        def integrand(y, part):
            lval = sm * phi(0, y) - cc * 0.8 * bm * phi(0, y)
            l2 = sm * phi(2, y) - cc * 0.8 * bm * phi(2, y)
            v = math.exp(m * y) * math.exp(-p.n2 * t) * (
                -p.theta * (l2 - m * m * lval) + p.rho * lval
                - p.rho * p.tau * math.exp((p.n2 - p.n1) * t) * 0.8 * bm * phi(0, y))
            return v.real if part == 0 else v.imag

        ref = sum((1j ** part) * integrate.quad(integrand, -60, 0, args=(part,),
                                                epsabs=1e-13, limit=200)[0] for part in (0, 1))
        ref += p.theta * math.exp(-p.n2 * t) * (sm - cc * 0.8 * bm) * phi(1, 0.0)
        k0 = k0_general(s, b, p, t, N)
        assert k0.coefficient(2) == pytest.approx(ref, abs=1e-9)
        assert np.all(np.isfinite(k0.coeffs))


class TestK1K2:
    @pytest.mark.parametrize("t", [0.0, 0.3, 2.0])
    def test_closed_forms(self, rng, t):
        p = particular_params(theta=0.8, rho=1.3, n3=0.4)
        g0 = random_field(rng, N, 0.05, 0.3)
        g = g0 + random_field(rng, N, 0.02, 0.3)
        pf = particular_forcing(g, g0, t, p)
        s, b = profiles(p)
        np.testing.assert_allclose(k1_tilde_1(g, g0, s, b, p, t).coeffs, pf["k1"].coeffs,
                                   atol=1e-8)
        np.testing.assert_allclose(k2_tilde_1(g, g0, s, b, p, t).coeffs, pf["k2"].coeffs,
                                   atol=1e-8)

    def test_vanish_at_start(self, rng):
        p = particular_params()
        g = random_field(rng, N, 0.1)
        s, b = profiles(p)
        assert np.max(np.abs(k1_tilde_1(g, g, s, b, p, 0.0).coeffs)) < 1e-12
        assert np.max(np.abs(k2_tilde_1(g, g, s, b, p, 0.0).coeffs)) < 1e-12

    def test_theta_zero(self, rng):
        p = particular_params(theta=0.0, rho=1.0)
        g0 = random_field(rng, N, 0.1)
        g = g0 + 0.01
        t = 0.6
        s, b = profiles(p)
        e = math.exp(-t)
        al = p.c_s - p.n3 * p.c_b * t
        k1 = k1_tilde_1(g, g0, s, b, p, t)
        assert k1.mean == pytest.approx(e * t * (p.c_b - al), abs=1e-10)
        assert np.max(np.abs(k1.coeffs[1:])) < 1e-12
        assert np.all(k2_tilde_1(g, g0, s, b, p, t).coeffs == 0)

    def test_cancellation_identity(self, rng):
        p = particular_params(theta=1.7, rho=0.9, n3=0.3)
        s, b = profiles(p)
        g0 = random_field(rng, N, 0.05)
        g = g0 + random_field(rng, N, 0.05)
        for t in (0.1, 1.0, 3.0):
            diff = k2_tilde_1(g, g0, s, b, p, t) - k1_tilde_1(g, g0, s, b, p, t)
            al = p.c_s - p.n3 * p.c_b * t
            ref = math.exp(-t) * p.rho * t * (al - p.c_b)
            assert diff.mean == pytest.approx(ref, abs=1e-10)
            assert np.max(np.abs(diff.coeffs[1:])) < 1e-10

    def test_trace_term_vanishes_depth_only(self, rng):
        bundle = ForcingBundle(particular_params(), *profiles(particular_params()))
        assert np.all(bundle.l1_trace(0.5, N).coeffs == 0)

    def test_full_extension_depth_only(self, rng):
        # full reading weights the (g-g0) terms with exp(|k| y)
        p = particular_params(theta=1.0, rho=0.0, n3=0.0, c_b=0.0, c_s=1.5)
        s, b = profiles(p)
        g0 = random_field(rng, 16, 0.1)
        g = g0 + random_field(rng, 16, 0.05)
        t = 0.4
        e = math.exp(-t)
        out = k1_tilde_1(g, g0, s, b, p, t, extension="full")
        dg = (g - g0).coeffs
        g11 = sp.derivative(g, 2).coeffs
        for k in range(8):
            ref = e * 1.5 * dg[k] * exp_sine_moment_closed(1.0, 3, k)
            ref += e * 1.5 * g11[k] * exp_sine_moment_closed(1.0, 1, k)
            if k == 0:
                ref += e * 1.5 * t * exp_sine_moment_closed(1.0, 4, 0)
            assert out.coeffs[k] == pytest.approx(ref, abs=1e-10)

    def test_extensions_agree_for_constant_factor(self, rng):
        s = LayeredData(((ExpSineProfile(1.0), {0: 1.0, 1: 0.4j}),))
        b = LayeredData(((ExpSineProfile(0.5), {1: 0.3}),))
        p = ModelParams(eps=0.1, theta=0.6, rho=0.7, n1=0.5, n2=0.8, n3=0.2, alpha_ratio=0.7)
        g0 = sp.from_modes(16, {0: 0.2})
        g = g0 + 0.05
        a = k1_tilde_1(g, g0, s, b, p, 0.5, "frozen")
        c = k1_tilde_1(g, g0, s, b, p, 0.5, "full")
        np.testing.assert_allclose(a.coeffs, c.coeffs, atol=1e-12)

    def test_bad_extension(self, rng):
        p = particular_params()
        g = random_field(rng, 8)
        with pytest.raises(InvalidInputError):
            k1_tilde_1(g, g, *profiles(p), p, 0.0, extension="other")


class TestPointwiseOperators:
    def test_q_alpha_zero(self, rng):
        g = random_field(rng, 16, 0.1)
        q = q_alpha(g, g, ExpSineProfile(1.0), 1.0, 0.0)
        assert np.all(q(np.linspace(-3, 3, 5), -0.7) == 0)

    def test_q_alpha_integral(self, rng):
        g0 = random_field(rng, 16, 0.1)
        g = g0 + random_field(rng, 16, 0.1)
        q = q_alpha(g, g0, ExpSineProfile(0.6), 1.0, 1.3)
        for x1 in (-2.0, 0.4):
            val = integrate.quad(lambda y: float(q(x1, y)), -60, 0, epsabs=1e-12)[0]
            assert val == pytest.approx(1.3 * 0.6, abs=1e-9)

    def test_q_alpha_single_mode(self, rng):
        ell = sp.from_modes(16, {3: 0.2 - 0.1j})
        ell0 = sp.zeros(16)
        q = q_alpha(ell, ell0, ExpProfile(), 0.7, 0.4)
        x1, x2 = np.linspace(-3, 3, 9), -0.3
        ref = ell.evaluate(x1) * np.exp(x2) + 0.7 * 0.4 * np.exp(x2)
        np.testing.assert_allclose(q(x1, x2), ref, atol=1e-14)

    def test_r1_constant(self):
        r = r1_operator(sp.from_modes(8, {0: 3.0}), ExpSineProfile(1.0))
        assert np.all(r(np.linspace(-3, 3, 5), -0.5) == 0)

    def test_r1_depth_only(self, rng):
        ell = random_field(rng, 16, 0.2)
        f = ExpSineProfile(1.0)
        r = r1_operator(ell, f)
        x1 = np.linspace(-3, 3, 7)
        ref = -sp.derivative(ell, 2).evaluate(x1) * f.deriv(1, -0.4)
        np.testing.assert_allclose(r(x1, -0.4), ref, atol=1e-13)

    def test_r1_integral_vanishes(self, rng):
        ell = random_field(rng, 16, 0.2)
        r = r1_operator(ell, ExpSineProfile(2.0))
        val = integrate.quad(lambda y: float(r(0.3, y)), -60, 0, epsabs=1e-12)[0]
        assert abs(val) < 1e-10


def _psi_nested(profile, coef, m, kappa, p, t):
    """int e^{kappa y} d/dy[int G_m(y, s) w(s) ds] dy by nested quadrature.

    Independent of the closed-form weights used in ``i_tilde``.
    """
    a = abs(m)
    e2, e1 = math.exp(-p.n2 * t), math.exp(-p.n1 * t)

    def w(s):
        f0, f2 = profile.deriv(0, s), profile.deriv(2, s)
        return p.theta * e2 * (f2 - a * a * f0) - p.rho * e2 * f0

    def dG(y, s):
        if a == 0:
            return 1.0 if y > s else 0.0
        return 0.5 * (math.copysign(1.0, y - s) * math.exp(-a * abs(y - s))
                      + math.exp(a * (y + s)))

    def inner(s):
        return integrate.quad(lambda y: math.exp(kappa * y) * dG(y, s), -40, 0,
                              points=[s], epsabs=1e-13, limit=200)[0] * w(s)

    return coef * integrate.quad(inner, -40, 0, epsabs=1e-12, limit=200)[0]


class TestITilde:
    def test_constant_g(self):
        p = particular_params()
        g = sp.from_modes(N, {0: 0.3})
        assert np.all(i_tilde(g, *profiles(p), p, 0.4).coeffs == 0)

    @pytest.mark.parametrize("t", [0.0, 0.7, 2.0])
    def test_depth_only_derived_value(self, rng, t):
        p = particular_params(rho=1.4, n3=0.5)
        g = random_field(rng, N, 0.1, 0.2)
        al = p.c_s - p.n3 * p.c_b * t
        ref = (p.rho / 2) * (al - p.c_b) * math.exp(-t) * sp.derivative(g, 2).coeffs
        np.testing.assert_allclose(i_tilde(g, *profiles(p), p, t).coeffs, ref, atol=1e-10)

    def test_gap_to_printed_closed_form(self, rng):
        # the printed exp-sine value -(rho/2) alpha e^{-Nt} g_11 differs from the
        # double sum by (rho/2)(2 alpha - c_B) e^{-Nt} g_11; see the decisions ledger
        p = particular_params(rho=2.0)
        g = random_field(rng, N, 0.1, 0.2)
        t = 0.5
        al = p.c_s - p.n3 * p.c_b * t
        gap = i_tilde(g, *profiles(p), p, t) - particular_forcing(g, g, t, p)["i"]
        ref = (p.rho / 2) * (2 * al - p.c_b) * math.exp(-t) * sp.derivative(g, 2).coeffs
        np.testing.assert_allclose(gap.coeffs, ref, atol=1e-10)

    def test_mode_cutoff(self, rng):
        p = particular_params()
        g = random_field(rng, N, 0.1)
        out = i_tilde(g, *profiles(p), p, 0.3, mode_cutoff=5)
        assert np.all(out.coeffs[6:] == 0)
        with pytest.raises(InvalidInputError):
            i_tilde(g, *profiles(p), p, 0.3, mode_cutoff=N)

    @pytest.mark.parametrize("extension", ["frozen", "full"])
    def test_layered_against_nested_quadrature(self, extension):
        prof = ExpSineProfile(1.0)
        coef = 0.4 - 0.2j
        s = LayeredData(((prof, {1: coef}),))
        b = LayeredData(((ExpSineProfile(0.0), {0: 1.0}),))
        p = ModelParams(theta=0.9, rho=0.6, tau=1.0, n1=0.5, n2=0.5, n3=0.0)
        t = 0.3
        g = sp.from_modes(16, {0: 0.1, 2: 0.05 + 0.02j})
        out = i_tilde(g, s, b, p, t, extension=extension)
        # output mode 3 comes only from j = 2, m = 1: weight -(j^2) - 2 j m = -8
        kappa = 1 if extension == "frozen" else 3
        ref = -8 * g.coefficient(2) * _psi_nested(prof, coef, 1, kappa, p, t)
        assert out.coefficient(3) == pytest.approx(ref, abs=1e-8)
        # output mode 1 from j = 2, m = -1: weight -4 + 4 = 0, and j = 0 has zero weight
        assert out.coefficient(1) == 0


class TestPressure:
    def test_trace(self, rng):
        p = particular_params(eta=1.7)
        g0 = random_field(rng, N, 0.1, 0.2)
        pr = pressure_order0(g0, *profiles(p), p, 0.4, 0.0)
        np.testing.assert_allclose(pr.coeffs, -p.eta * sp.derivative(g0, 2).coeffs, atol=1e-13)

    def test_harmonic_without_source(self):
        p = particular_params(theta=0.0, rho=0.0, eta=1.3)
        g0 = sp.from_modes(16, {1: 0.5})
        x1 = np.linspace(-3, 3, 7)
        for x2 in (-0.2, -1.5):
            pr = pressure_order0(g0, *profiles(p), p, 0.0, x2)
            np.testing.assert_allclose(pr.evaluate(x1), 1.3 * np.cos(x1) * np.exp(x2),
                                       atol=1e-14)

    def test_depth_only_ode(self):
        p = particular_params(theta=0.8, rho=1.2)
        s, b = profiles(p)
        g0 = sp.zeros(16)
        t, h = 0.5, 1e-3
        e = math.exp(-t)
        al = p.c_s - p.n3 * p.c_b * t
        for y in (-0.5, -2.0):
            vals = [pressure_order0(g0, s, b, p, t, y + d).mean for d in (-h, 0.0, h)]
            second = (vals[0] - 2 * vals[1] + vals[2]) / h**2
            w = (p.theta * e * al * s.deriv(2, y) / p.c_s
                 - p.rho * (e * al - e * p.c_b) * s.deriv(0, y) / p.c_s)
            assert second == pytest.approx(w, abs=1e-5)

    def test_layered_mode_ode(self):
        s = LayeredData(((ExpSineProfile(1.0), {2: 0.5}),))
        b = LayeredData(((ExpSineProfile(0.3), {2: 0.1}),))
        p = ModelParams(theta=0.4, rho=1.0, tau=0.5, n1=0.7, n2=0.9, n3=0.2)
        g0 = sp.zeros(16)
        t, y, h = 0.3, -0.8, 1e-3
        vals = [pressure_order0(g0, s, b, p, t, y + d).coefficient(2) for d in (-h, 0.0, h)]
        lhs = (vals[0] - 2 * vals[1] + vals[2]) / h**2 - 4 * vals[1]
        cc = p.n3 * math.expm1(0.2 * t) / 0.2
        phi = ExpSineProfile(1.0)
        l0 = 0.5 * phi(y) - cc * 0.03 * phi(y)
        l2 = 0.5 * phi.deriv(2, y) - cc * 0.03 * phi.deriv(2, y)
        w = (p.theta * math.exp(-0.9 * t) * (l2 - 4 * l0)
             - p.rho * (math.exp(-0.9 * t) * l0 - p.tau * math.exp(-0.7 * t) * 0.03 * phi(y)))
        assert lhs == pytest.approx(w, abs=1e-5)

    def test_positive_depth_rejected(self):
        p = particular_params()
        with pytest.raises(InvalidInputError):
            pressure_order0(sp.zeros(8), *profiles(p), p, 0.0, 0.1)


class TestBundle:
    def test_particular_requires_equal_rates(self):
        p = ModelParams(n1=1.0, n2=2.0)
        with pytest.raises(InvalidInputError):
            ForcingBundle(p, *profiles(p), mode="particular")

    def test_bad_mode(self):
        p = particular_params()
        with pytest.raises(InvalidInputError):
            ForcingBundle(p, *profiles(p), mode="x")

    def test_k1_tilde_composition(self, rng):
        p = particular_params()
        g0 = random_field(rng, N, 0.05)
        g = g0 + random_field(rng, N, 0.02)
        for mode in ("general", "particular"):
            bundle = ForcingBundle(p, *profiles(p), mode=mode)
            d = bundle.parts(g, g0, 0.4)
            np.testing.assert_allclose(bundle.k1_tilde(g, g0, 0.4).coeffs,
                                       (d["k2"] - d["k1"] - d["i"]).coeffs, atol=1e-15)

    def test_outputs_real(self, rng):
        s = LayeredData(((ExpSineProfile(1.0), {0: 1.0, 3: 0.2 + 0.1j}),))
        b = LayeredData(((ExpSineProfile(0.5), {1: 0.3j}),))
        p = ModelParams(eps=0.1, theta=0.6, rho=0.7, n1=0.5, n2=0.8, n3=0.2)
        g0 = random_field(rng, 16, 0.05)
        g = g0 + random_field(rng, 16, 0.02)
        bundle = ForcingBundle(p, s, b, extension="full")
        for f in (bundle.k0(0.3, 16), bundle.k1_tilde(g, g0, 0.3)):
            assert f.coeffs[0].imag == 0
            assert np.all(np.isfinite(f.to_samples()))
