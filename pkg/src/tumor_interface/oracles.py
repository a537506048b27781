"""Brute-force reference implementations used by the tests and ``--verify``.

Nothing here calls the fast paths it certifies: convolutions are double
loops over coefficients, depth integrals come from antiderivatives, and the
exp-sine forcing is transcribed from its closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "OracleReport",
    "convolve_direct",
    "commutator_direct",
    "depth_integral_closed",
    "exp_sine_moment_closed",
    "particular_closed_forms",
    "i_tilde_depth_only_closed",
    "run_oracle_suite",
]

MAX_ORACLE_MODES = 64


@dataclass(frozen=True)
class OracleReport:
    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_error <= self.tolerance)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name}: max error {self.max_error:.3e} (tol {self.tolerance:.0e})"


def _full_dict(field):
    kmax = field.grid_size // 2 - 1
    if kmax + 1 > MAX_ORACLE_MODES:
        raise InvalidInputError(f"oracle refuses more than {MAX_ORACLE_MODES} modes")
    c = np.asarray(field.coeffs)
    d = {0: complex(c[0])}
    for k in range(1, kmax + 1):
        d[k] = complex(c[k])
        d[-k] = complex(np.conj(c[k]))
    return kmax, d


def _wrap(template, coeffs):
    return type(template)(np.asarray(coeffs), template.grid_size)


def convolve_direct(f, g):
    """Coefficients of ``f g`` truncated to ``K_max`` by an explicit double loop."""
    if f.grid_size != g.grid_size:
        raise InvalidInputError("grid mismatch")
    kmax, fd = _full_dict(f)
    _, gd = _full_dict(g)
    out = np.zeros(kmax + 1, dtype=complex)
    for k in range(kmax + 1):
        acc = 0j
        for m in range(-kmax, kmax + 1):
            j = k - m
            if -kmax <= j <= kmax:
                acc += fd[m] * gd[j]
        out[k] = acc
    out[0] = out[0].real
    return _wrap(f, out)


def commutator_direct(g):
    """Symbol form ``C(k) = k sum_m (sgn m - sgn k) |m|^3 g(m) g(k-m)``."""
    kmax, gd = _full_dict(g)
    out = np.zeros(kmax + 1, dtype=complex)
    sgn = lambda v: (v > 0) - (v < 0)  # noqa: E731
    for k in range(kmax + 1):
        acc = 0j
        for m in range(-kmax, kmax + 1):
            j = k - m
            if -kmax <= j <= kmax:
                acc += (sgn(m) - sgn(k)) * abs(m) ** 3 * gd[m] * gd[j]
        out[k] = k * acc
    out[0] = out[0].real
    return _wrap(g, out)


def depth_integral_closed(a: float, trig: str) -> float:
    """``int_{-inf}^0 e^{a y} trig(y) dy`` from the antiderivative."""
    if not a > 0:
        raise InvalidInputError("a must be positive for convergence")
    if trig == "sin":
        # e^{ay}(a sin y - cos y)/(a^2+1) evaluated at 0
        return -1.0 / (a * a + 1)
    if trig == "cos":
        # e^{ay}(a cos y + sin y)/(a^2+1)
        return a / (a * a + 1)
    raise InvalidInputError("trig must be 'sin' or 'cos'")


def exp_sine_moment_closed(c: float, n: int, beta: float, power: int = 0) -> float:
    """``int_{-inf}^0 y^p e^{beta y} d^n/dy^n [c e^y sin y] dy`` exactly."""
    z = complex(beta + 1, 1)
    val = (1 + 1j) ** n * (-1) ** power * math.factorial(power) / z ** (power + 1)
    return c * val.imag


def _dx2(field):
    k = np.arange(field.grid_size // 2)
    return -(k**2) * np.asarray(field.coeffs)


def particular_closed_forms(g, g0, t: float, p) -> dict:
    """``K0, K1, K2, I`` of the exp-sine case as coefficient arrays (``k >= 0``)."""
    e = math.exp(-p.n1 * t)
    al = p.c_s - p.n3 * p.c_b * t
    dg = np.asarray(g.coeffs) - np.asarray(g0.coeffs)
    unit = np.zeros_like(dg)
    unit[0] = 1.0
    k0 = unit * (-(e / 2) * p.rho * (al - p.c_b))
    k1 = 2 * p.theta * e * al * dg + unit * (e * al * (2 * p.theta - p.rho) * t
                                             + p.rho * e * t * p.c_b)
    k2 = p.theta * e * 2 * al * (dg + unit * t)
    i = -(p.rho / 2) * al * e * _dx2(g)
    return {"k0": k0, "k1": k1, "k2": k2, "i": i}


def i_tilde_depth_only_closed(g, t: float, p) -> np.ndarray:
    """Depth-only exp-sine value obtained by summing the Green-function integrals
    by hand: ``(rho/2)(alpha - c_B) e^{-N t} g_11``."""
    e = math.exp(-p.n1 * t)
    al = p.c_s - p.n3 * p.c_b * t
    return (p.rho / 2) * (al - p.c_b) * e * _dx2(g)


def run_oracle_suite(seed: int = 0) -> list[OracleReport]:
    """Compare fast paths against the oracles on small random cases."""
    from . import spectral as sp
    from .depth import ExpSineProfile, depth_integral
    from .forcing import i_tilde, k0_general, k1_tilde_1, k2_tilde_1, pressure_order0
    from .model import commutator_term
    from .params import ModelParams

    rng = np.random.default_rng(seed)
    reports = []

    def rand_field(n, amp=1.0, decay=1.0):
        k = np.arange(n // 2)
        c = amp * (rng.standard_normal(n // 2) + 1j * rng.standard_normal(n // 2))
        c *= np.exp(-decay * k)
        c[0] = c[0].real
        return sp.SpectralField(c, n)

    err = 0.0
    for n in (16, 32, 64):
        f, g = rand_field(n), rand_field(n)
        err = max(err, np.max(np.abs(sp.multiply(f, g).coeffs - convolve_direct(f, g).coeffs)))
    reports.append(OracleReport("multiply vs direct convolution", err, 1e-13))

    err = 0.0
    for n in (16, 32, 64):
        g = rand_field(n, 0.5, 0.5)
        err = max(err, np.max(np.abs(commutator_term(g).coeffs - commutator_direct(g).coeffs)))
    reports.append(OracleReport("commutator vs symbol sum", err, 1e-12))

    err = 0.0
    for a in (1.0, 2.0, 3.0, 5.5):
        err = max(err, abs(depth_integral(lambda y: np.exp(y) * np.sin(y), a - 1)
                           - depth_integral_closed(a, "sin")))
        err = max(err, abs(depth_integral(lambda y: np.exp(y) * np.cos(y), a - 1)
                           - depth_integral_closed(a, "cos")))
    reports.append(OracleReport("depth integrals vs antiderivative", err, 1e-10))

    prof = ExpSineProfile(1.7)
    err = 0.0
    for n in range(5):
        for beta in (0.0, 1.0, 4.0):
            for pw in (0, 1):
                err = max(err, abs(prof.moment(n, beta, pw)
                                   - exp_sine_moment_closed(1.7, n, beta, pw)))
    reports.append(OracleReport("exp-sine moments vs closed form", err, 1e-10))

    p = ModelParams(eps=0.1, eta=1.0, theta=1.3, rho=0.8, tau=1.0, n1=0.7, n2=0.7, n3=0.4,
                    c_b=1.0, c_s=2.0)
    s, b = ExpSineProfile(p.c_s), ExpSineProfile(p.c_b)
    n = 32
    g0 = rand_field(n, 0.05)
    g = g0 + rand_field(n, 0.02)
    err_k0 = err_k12 = err_i = 0.0
    for t in (0.0, 0.5, 1.0, 5.0):
        cf = particular_closed_forms(g, g0, t, p)
        err_k0 = max(err_k0, np.max(np.abs(k0_general(s, b, p, t, n).coeffs - cf["k0"])))
        err_k12 = max(err_k12, np.max(np.abs(k1_tilde_1(g, g0, s, b, p, t).coeffs - cf["k1"])))
        err_k12 = max(err_k12, np.max(np.abs(k2_tilde_1(g, g0, s, b, p, t).coeffs - cf["k2"])))
        err_i = max(err_i, np.max(np.abs(i_tilde(g, s, b, p, t).coeffs
                                         - i_tilde_depth_only_closed(g, t, p))))
    reports.append(OracleReport("order-zero forcing vs closed form", err_k0, 1e-8))
    reports.append(OracleReport("order-one forcing vs closed forms", err_k12, 1e-8))
    reports.append(OracleReport("pressure correction vs hand-summed integrals", err_i, 1e-8))

    pr = pressure_order0(g0, s, b, p, 0.5, 0.0)
    err = float(np.max(np.abs(pr.coeffs + p.eta * sp.derivative(g0, 2).coeffs)))
    reports.append(OracleReport("pressure trace", err, 1e-8))
    return reports
