import math

import numpy as np
import pytest
from scipy import integrate

from tumor_interface import oracles as orc
from tumor_interface import spectral as sp
from tumor_interface.errors import InvalidInputError
from tumor_interface.params import ModelParams

from conftest import random_field


class TestRefusals:
    def test_convolve_too_many_modes(self):
        f = sp.zeros(256)
        with pytest.raises(InvalidInputError):
            orc.convolve_direct(f, f)

    def test_commutator_too_many_modes(self):
        with pytest.raises(InvalidInputError):
            orc.commutator_direct(sp.zeros(256))

    def test_grid_mismatch(self):
        with pytest.raises(InvalidInputError):
            orc.convolve_direct(sp.zeros(8), sp.zeros(16))

    @pytest.mark.parametrize("a,trig", [(0.0, "sin"), (-1.0, "cos"), (1.0, "tan")])
    def test_depth_closed_bad(self, a, trig):
        with pytest.raises(InvalidInputError):
            orc.depth_integral_closed(a, trig)


class TestClosedValues:
    @pytest.mark.parametrize("a", [0.5, 1.0, 3.0])
    def test_depth_vs_quad(self, a):
        for trig, fn in (("sin", np.sin), ("cos", np.cos)):
            ref = integrate.quad(lambda y: math.exp(a * y) * fn(y), -60, 0, limit=200)[0]
            assert orc.depth_integral_closed(a, trig) == pytest.approx(ref, abs=1e-12)

    def test_known(self):
        assert orc.depth_integral_closed(1.0, "sin") == -0.5
        assert orc.depth_integral_closed(1.0, "cos") == 0.5

    @pytest.mark.parametrize("n", range(4))
    @pytest.mark.parametrize("beta,power", [(0.0, 0), (1.0, 0), (2.0, 1), (0.5, 2)])
    def test_moment_vs_quad(self, n, beta, power):
        def f(y):
            # d^n/dy^n e^y sin y = 2^{n/2} e^y sin(y + n pi/4)
            return 2 ** (n / 2) * math.exp(y) * math.sin(y + n * math.pi / 4)
        ref = integrate.quad(lambda y: y**power * math.exp(beta * y) * 1.3 * f(y), -80, 0,
                             limit=200)[0]
        assert orc.exp_sine_moment_closed(1.3, n, beta, power) == pytest.approx(ref, abs=1e-11)

    def test_convolution_single_modes(self):
        # cos x * cos x = 1/2 + cos(2x)/2
        c = sp.from_modes(16, {1: 0.5})
        out = orc.convolve_direct(c, c).coeffs
        assert out[0] == pytest.approx(0.5) and out[2] == pytest.approx(0.25)
        assert np.sum(np.abs(out)) == pytest.approx(0.75)

    def test_commutator_single_mode_zero(self):
        assert np.allclose(orc.commutator_direct(sp.from_modes(16, {3: 0.2})).coeffs, 0)


class TestParticularForms:
    def test_trivial_params(self, rng):
        g = random_field(rng, 16, 0.1)
        forms = orc.particular_closed_forms(g, g, 0.3, ModelParams())
        for v in forms.values():
            assert np.all(v == 0)

    def test_k0_mean_only(self, rng):
        p = ModelParams(rho=1.0, c_s=2.0, c_b=1.0, n3=0.5)
        g = random_field(rng, 16, 0.1)
        k0 = orc.particular_closed_forms(g, g, 1.0, p)["k0"]
        assert np.all(k0[1:] == 0)
        assert k0[0] == pytest.approx(-(math.exp(-1) / 2) * (2.0 - 0.5 - 1.0))

    def test_depth_only_gap(self, rng):
        p = ModelParams(rho=0.7, c_s=2.0, c_b=1.0)
        g = random_field(rng, 16, 0.1)
        printed = orc.particular_closed_forms(g, g, 0.4, p)["i"]
        derived = orc.i_tilde_depth_only_closed(g, 0.4, p)
        e = math.exp(-0.4)
        gap = derived + printed
        g11 = -(np.arange(8) ** 2) * g.coeffs
        assert np.allclose(gap, -(0.7 / 2) * 1.0 * e * g11, atol=1e-15)


def test_suite_passes():
    reports = orc.run_oracle_suite()
    assert len(reports) == 8
    for r in reports:
        assert r.passed, r.line()
        assert r.line().startswith("PASS")


def test_report_line():
    r = orc.OracleReport("x", 2e-3, 1e-3)
    assert not r.passed and r.line().startswith("FAIL x")
