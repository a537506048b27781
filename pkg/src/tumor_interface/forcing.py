"""Order-zero and order-one forcing of the interface equation.

Initial nutrient ``S`` and inhibitor ``B`` are :class:`~.depth.LayeredData`
(a plain :class:`~.depth.DepthProfile` is promoted to depth-only data).  In
x1-mode ``m`` the Laplacian acts as ``D**2 - m**2`` with ``D = d/dx2`` and the
kernel ``L = S - c(t) B`` (see :func:`~.params.kernel_L`).

Extension convention
--------------------
Terms such as ``(g - g0) * f(x1, x2)`` are pushed to the interface through
``int exp(y Lambda)(.) dy``.  Two readings are offered:

``"frozen"`` (default)
    interface factors are treated as frozen coefficients and the semigroup
    only sees the data's own x1-mode, i.e. the weight is ``exp(|m| y)``.
``"full"``
    the semigroup acts on the product, so output mode ``k`` gets
    ``exp(|k| y)``.

Both agree whenever the interface factor is constant in x1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import spectral as sp
from .depth import DepthProfile, LayeredData, depth_only
from .errors import ConvergenceError, InvalidInputError
from .params import ModelParams, alpha_of_t, c_of_t, m_of_t
from .spectral import SpectralField

__all__ = [
    "as_layered",
    "q_alpha",
    "r1_operator",
    "k0_general",
    "k1_tilde_1",
    "k2_tilde_1",
    "i_tilde",
    "pressure_order0",
    "ForcingBundle",
    "particular_forcing",
    "EXTENSIONS",
]

EXTENSIONS = ("frozen", "full")


def as_layered(data) -> LayeredData:
    if isinstance(data, LayeredData):
        return data
    if isinstance(data, DepthProfile):
        return depth_only(data)
    raise InvalidInputError(f"expected DepthProfile or LayeredData, got {type(data).__name__}")


def _check_ext(extension):
    if extension not in EXTENSIONS:
        raise InvalidInputError(f"extension must be one of {EXTENSIONS}, got {extension!r}")


class _Kernels:
    """Mode-wise moments of ``L``, ``B`` and the order-zero source ``w`` at a fixed time."""

    def __init__(self, s, b, p: ModelParams, t: float):
        self.s = as_layered(s)
        self.b = as_layered(b)
        self.p = p
        self.t = float(t)
        self.c = c_of_t(p, t)
        self.e2 = math.exp(-p.n2 * t)
        self.e1 = math.exp(-p.n1 * t)
        self.modes = sorted(set(self.s.modes) | set(self.b.modes)) or [0]

    # raw moments ----------------------------------------------------------
    def L(self, m, n, beta, power=0):
        return self.s.moment(m, n, beta, power) - self.c * self.b.moment(m, n, beta, power)

    def B(self, m, n, beta, power=0):
        return self.b.moment(m, n, beta, power)

    def L0(self, m, n):
        return self.s.trace(m, n) - self.c * self.b.trace(m, n)

    def B0(self, m, n):
        return self.b.trace(m, n)

    # Laplacian combinations in mode m --------------------------------------
    def lap(self, f, m, beta, shift=0, power=0):
        """Moment of ``D**shift (D**2 - m**2) f``."""
        return f(m, shift + 2, beta, power) - m * m * f(m, shift, beta, power)

    def bilap(self, f, m, beta, power=0):
        return (f(m, 4, beta, power) - 2 * m * m * f(m, 2, beta, power)
                + m**4 * f(m, 0, beta, power))

    def w(self, m, beta, power=0):
        """Moment of the order-zero source ``theta Delta S0 - rho (S0 - tau B0)``."""
        p = self.p
        return (p.theta * self.e2 * self.lap(self.L, m, beta, power=power)
                - p.rho * (self.e2 * self.L(m, 0, beta, power)
                           - p.tau * self.e1 * self.B(m, 0, beta, power)))

    def w_value(self, m, y):
        p = self.p
        lval = (self.s.mode_value(m, 0, y) - self.c * self.b.mode_value(m, 0, y))
        l2 = (self.s.mode_value(m, 2, y) - self.c * self.b.mode_value(m, 2, y))
        bval = self.b.mode_value(m, 0, y)
        return (p.theta * self.e2 * (l2 - m * m * lval)
                - p.rho * (self.e2 * lval - p.tau * self.e1 * bval))

    def w_envelope(self, m):
        bs, rs = self.s.envelope(m, 0)
        bs2, _ = self.s.envelope(m, 2)
        bb, rb = self.b.envelope(m, 0)
        bb2, _ = self.b.envelope(m, 2)
        p = self.p
        bound = (p.theta * (bs2 + m * m * bs + abs(self.c) * (bb2 + m * m * bb))
                 + p.rho * (bs + abs(self.c) * bb + p.tau * bb)) + 1e-300
        rate = min(r for r in (rs, rb) if r != math.inf) if (rs, rb) != (math.inf, math.inf) else 1.0
        return bound, rate


def _mode_field(grid_size: int, values: dict) -> SpectralField:
    """Field from ``{m: coef}`` over both signs; keeps ``m >= 0`` entries."""
    c = np.zeros(grid_size // 2, dtype=complex)
    for m, v in values.items():
        if 0 <= m < c.size:
            c[m] += v
    if abs(c[0].imag) < 1e-12 * max(1.0, abs(c[0].real)):
        c[0] = c[0].real
    return SpectralField(c, grid_size)


def _to_field(coeffs, grid_size):
    c = np.asarray(coeffs, dtype=complex).copy()
    c[0] = c[0].real
    return SpectralField(c, grid_size)


def q_alpha(ell: SpectralField, ell0: SpectralField, f, alpha: float, t: float):
    """Pointwise evaluator of ``(ell - ell0) f_2 + alpha t Delta f``.

    ``f`` is layered data; the returned callable takes ``(x1, x2)``.
    """
    f = as_layered(f)
    if ell.grid_size != ell0.grid_size:
        raise InvalidInputError("ell and ell0 must share a grid")
    diff = ell - ell0

    def evaluate(x1, x2):
        lap = f.evaluate(x1, x2, d1=2) + f.evaluate(x1, x2, d2=2)
        return diff.evaluate(x1) * f.evaluate(x1, x2, d2=1) + alpha * t * lap

    return evaluate


def r1_operator(ell: SpectralField, f):
    """Pointwise evaluator of ``-(ell_11 F + 2 ell_1 F_1)_2``."""
    f = as_layered(f)
    l1 = sp.derivative(ell, 1)
    l11 = sp.derivative(ell, 2)

    def evaluate(x1, x2):
        return -(l11.evaluate(x1) * f.evaluate(x1, x2, d2=1)
                 + 2.0 * l1.evaluate(x1) * f.evaluate(x1, x2, d1=1, d2=1))

    return evaluate


def k0_general(s, b, p: ModelParams, t: float, grid_size: int) -> SpectralField:
    """Order-zero forcing at the interface.

    ``K0 = int e^{y Lambda} e^{-N2 t} [-theta Delta L + rho (L - tau e^{(N2-N1)t} B)] dy
    + theta e^{-N2 t} L_2(x1, 0, t)``.
    """
    kn = _Kernels(s, b, p, t)
    vals = {}
    for m in kn.modes:
        if m < 0:
            continue
        beta = abs(m)
        v = kn.e2 * (-p.theta * kn.lap(kn.L, m, beta) + p.rho * kn.L(m, 0, beta)
                     + p.theta * kn.L0(m, 1))
        v -= p.rho * p.tau * kn.e1 * kn.B(m, 0, beta)
        vals[m] = v
    return _mode_field(grid_size, vals)


def k1_tilde_1(g: SpectralField, g0: SpectralField, s, b, p: ModelParams, t: float,
               extension: str = "frozen") -> SpectralField:
    """First-order depth-integrated forcing, the sum of six terms.

    With ``Q_a[g](f) = (g - g0) f_2 + a t Delta f`` and
    ``R1[g](F) = -(g_11 F + 2 g_1 F_1)_2``::

        theta e^{-N2 t} Q_1(Delta L) + theta M Delta^2 B
        - rho e^{-N2 t} Q_1(L) - rho M Delta B
        + rho tau e^{-N1 t} Q_alpha(B) - e^{-N2 t} R1(L)

    each integrated as ``int e^{y Lambda}(.) dy``.
    """
    _check_ext(extension)
    if g.grid_size != g0.grid_size:
        raise InvalidInputError("g and g0 must share a grid")
    kn = _Kernels(s, b, p, t)
    n = g.grid_size
    dg = g - g0
    one = sp.from_modes(n, {0: 1.0})
    g1 = sp.derivative(g, 1)
    g11 = sp.derivative(g, 2)
    mm = m_of_t(p, t)
    th, rh, tau, a = p.theta, p.rho, p.tau, p.alpha_ratio
    e1, e2 = kn.e1, kn.e2
    out = np.zeros(n // 2, dtype=complex)
    for m in kn.modes:
        # terms proportional to (g - g0)
        def w_dg(beta, m=m):
            return (th * e2 * kn.lap(kn.L, m, beta, shift=1)
                    - rh * e2 * kn.L(m, 1, beta)
                    + rh * tau * e1 * kn.B(m, 1, beta))

        # data-only terms
        def w_one(beta, m=m):
            return (th * e2 * t * kn.bilap(kn.L, m, beta)
                    + th * mm * kn.bilap(kn.B, m, beta)
                    - rh * e2 * t * kn.lap(kn.L, m, beta)
                    - rh * mm * kn.lap(kn.B, m, beta)
                    + rh * tau * e1 * a * t * kn.lap(kn.B, m, beta))

        # -e^{-N2 t} R1[g](L) = e^{-N2 t} (g_11 + 2 i m g_1) L_2
        def w_r1(beta, m=m):
            return e2 * kn.L(m, 1, beta)

        r1_factor = _RawField(g11, g1, 2j * m)
        out += _apply(dg, m, w_dg, extension, n)
        out += _apply(one, m, w_one, extension, n)
        out += _apply(r1_factor, m, w_r1, extension, n)
    return _to_field(out, n)


class _RawField:
    """``a(x) + z b(x)`` for complex ``z``; only coefficient lookup is needed."""

    def __init__(self, a, b, z):
        self.a, self.b, self.z = a, b, z
        self.k_max = a.k_max

    def coefficient(self, k):
        return self.a.coefficient(k) + self.z * self.b.coefficient(k)


def _apply(factor, m, weight, extension, n):
    """Coefficients of ``int exp(y Lambda) [factor(x1) w(y) e^{i m x1}] dy``.

    ``weight(beta)`` is the depth moment of ``w`` at semigroup rate ``beta``.
    """
    kmax = n // 2 - 1
    out = np.zeros(kmax + 1, dtype=complex)
    cache = {}
    for k in range(kmax + 1):
        a = factor.coefficient(k - m)
        if a == 0:
            continue
        beta = abs(m) if extension == "frozen" else k
        if beta not in cache:
            cache[beta] = weight(beta)
        out[k] = a * cache[beta]
    return out


def k2_tilde_1(g: SpectralField, g0: SpectralField, s, b, p: ModelParams,
               t: float) -> SpectralField:
    """Boundary-trace forcing ``theta e^{-N2 t} Q_1[g](L_2) + theta M Delta B_2
    - theta g_1 e^{-N2 t} L_1`` at ``x2 = 0``."""
    if g.grid_size != g0.grid_size:
        raise InvalidInputError("g and g0 must share a grid")
    kn = _Kernels(s, b, p, t)
    n = g.grid_size
    dg = g - g0
    g1 = sp.derivative(g, 1)
    mm = m_of_t(p, t)
    th, e2 = p.theta, kn.e2
    out = np.zeros(n // 2, dtype=complex)
    if th == 0:
        return sp.zeros(n)
    for m in kn.modes:
        c_dg = th * e2 * kn.L0(m, 2)
        c_one = (th * e2 * t * (kn.L0(m, 3) - m * m * kn.L0(m, 1))
                 + th * mm * (kn.B0(m, 3) - m * m * kn.B0(m, 1)))
        c_g1 = -th * e2 * 1j * m * kn.L0(m, 0)
        for k in range(n // 2):
            out[k] += dg.coefficient(k - m) * c_dg + g1.coefficient(k - m) * c_g1
            if k == m:
                out[k] += c_one
    return _to_field(out, n)


def _phi_moment(kn: _Kernels, m: int, kappa: float) -> complex:
    """``int w_m(s) Phi_{kappa,|m|}(s) ds`` for the Green-function weight ``Phi``."""
    a = abs(m)
    if a == 0:
        if kappa == 0:
            return -kn.w(m, 0.0, power=1)
        return (kn.w(m, 0.0) - kn.w(m, kappa)) / kappa
    if kappa == a:
        return -0.5 * kn.w(m, a, power=1)
    ia = kn.w(m, a)
    ik = kn.w(m, kappa)
    return 0.5 * (-ik / (kappa + a) + (ia - ik) / (kappa - a) + ia / (kappa + a))


def i_tilde(g: SpectralField, s, b, p: ModelParams, t: float, mode_cutoff: int | None = None,
            extension: str = "frozen") -> SpectralField:
    """Pressure-correction forcing as a truncated double sum.

    ``I(k) = sum_m [-(k-m)**2 - 2 (k-m) m] g(k-m) Psi(m)`` where ``Psi`` integrates
    the order-zero source of data mode ``m`` against the Dirichlet Green function
    of ``D**2 - m**2`` on the half line, weighted by ``exp(kappa y)`` with
    ``kappa = |m|`` (frozen) or ``|k|`` (full).  Cost is O(K * #data modes).
    """
    _check_ext(extension)
    kn = _Kernels(s, b, p, t)
    n = g.grid_size
    kmax = n // 2 - 1
    cutoff = kmax if mode_cutoff is None else int(mode_cutoff)
    if not 0 <= cutoff <= kmax:
        raise InvalidInputError(f"mode_cutoff must lie in [0, {kmax}]")
    out = np.zeros(kmax + 1, dtype=complex)
    for m in kn.modes:
        if abs(m) > cutoff:
            continue
        psi_cache = {}
        for k in range(cutoff + 1):
            j = k - m
            if abs(j) > cutoff:
                continue
            gj = g.coefficient(j)
            if gj == 0:
                continue
            wt = -(j * j) - 2 * j * m
            if wt == 0:
                continue
            kappa = abs(m) if extension == "frozen" else abs(k)
            if kappa not in psi_cache:
                psi_cache[kappa] = _phi_moment(kn, m, float(kappa))
            out[k] += wt * gj * psi_cache[kappa]
    return _to_field(out, n)


def _green(a: float, x: float, s):
    s = np.asarray(s, dtype=float)
    if a == 0:
        return np.maximum(x, s)
    return -(np.exp(-a * np.abs(x - s)) - np.exp(a * (x + s))) / (2.0 * a)


def pressure_order0(g0: SpectralField, s, b, p: ModelParams, t: float,
                    x2: float) -> SpectralField:
    """Order-zero pressure on the line ``x2``.

    Mode ``k`` solves ``P'' - k**2 P = w_k`` on ``(-inf, 0]`` with
    ``P(0) = eta k**2 g0(k)`` and bounded derivative at depth, so at the
    interface it reduces to ``-eta g0_11``.
    """
    x2 = float(x2)
    if x2 > 0:
        raise InvalidInputError("x2 must be <= 0")
    kn = _Kernels(s, b, p, t)
    n = g0.grid_size
    k = g0.wavenumbers
    out = p.eta * k.astype(float) ** 2 * g0.coeffs * np.exp(k * x2)
    out = out.astype(complex)
    if x2 < 0:
        for m in kn.modes:
            if m < 0 or m > g0.k_max:
                continue
            a = float(m)
            bound, rate = kn.w_envelope(m)
            x_cut = max(-x2, 0.0) + 40.0 / rate

            def f_re(y, part):
                v = _green(a, x2, y) * kn.w_value(m, y)
                return float(np.real(v)) if part == 0 else float(np.imag(v))

            total = 0j
            for part in (0, 1):
                val = 0.0
                for lo, hi in ((-x_cut, x2), (x2, 0.0)):
                    r, err = integrate.quad(f_re, lo, hi, args=(part,), epsabs=1e-12,
                                            epsrel=1e-12, limit=400)
                    if err > 1e-9:
                        raise ConvergenceError(f"pressure quadrature error {err:.2e}")
                    val += r
                total += val if part == 0 else 1j * val
            out[m] += total
    return _to_field(out, n)


@dataclass(frozen=True)
class ForcingBundle:
    """Time-dependent forcing evaluators for either model mode.

    ``mode="general"`` uses the depth-integral machinery; ``mode="particular"``
    uses the exp-sine closed forms and requires ``n1 == n2``.
    """

    params: ModelParams
    s: object
    b: object
    mode: str = "general"
    extension: str = "frozen"

    def __post_init__(self):
        if self.mode not in ("general", "particular"):
            raise InvalidInputError(f"mode must be general or particular, got {self.mode!r}")
        _check_ext(self.extension)
        if self.mode == "particular" and self.params.n1 != self.params.n2:
            raise InvalidInputError("particular mode requires n1 == n2")

    def k0(self, t: float, grid_size: int) -> SpectralField:
        if self.mode == "particular":
            return particular_forcing(sp.zeros(grid_size), sp.zeros(grid_size), t,
                                      self.params)["k0"]
        return k0_general(self.s, self.b, self.params, t, grid_size)

    def parts(self, g: SpectralField, g0: SpectralField, t: float) -> dict:
        """``{"k1": ..., "k2": ..., "i": ...}`` at time ``t``."""
        if self.mode == "particular":
            pf = particular_forcing(g, g0, t, self.params)
            return {"k1": pf["k1"], "k2": pf["k2"], "i": pf["i"]}
        return {
            "k1": k1_tilde_1(g, g0, self.s, self.b, self.params, t, self.extension),
            "k2": k2_tilde_1(g, g0, self.s, self.b, self.params, t),
            "i": i_tilde(g, self.s, self.b, self.params, t, extension=self.extension),
        }

    def k1_tilde(self, g: SpectralField, g0: SpectralField, t: float) -> SpectralField:
        """``-I - K1 + K2``."""
        d = self.parts(g, g0, t)
        return d["k2"] - d["k1"] - d["i"]

    def l1_trace(self, t: float, grid_size: int) -> SpectralField:
        """``L_1(x1, 0, t)``; zero for profiles vanishing at the interface."""
        if self.mode == "particular":
            return sp.zeros(grid_size)
        kn = _Kernels(self.s, self.b, self.params, t)
        return _mode_field(grid_size, {m: 1j * m * kn.L0(m, 0) for m in kn.modes if m > 0})


def particular_forcing(g: SpectralField, g0: SpectralField, t: float, p: ModelParams) -> dict:
    """Closed-form forcing for exp-sine depth-only data with ``N1 = N2 = N``.

    Returns ``k0``, ``k1``, ``k2`` and ``i`` fields as written for that case.
    """
    nn = p.n
    e = math.exp(-nn * t)
    al = alpha_of_t(p, t)
    n = g.grid_size
    dg = g - g0
    k0 = sp.from_modes(n, {0: -(e / 2) * p.rho * (al - p.c_b)})
    k1 = (2 * p.theta * e * al) * dg + (e * al * (2 * p.theta - p.rho) * t + p.rho * e * t * p.c_b)
    k2 = (p.theta * e * 2 * al) * dg + p.theta * e * 2 * al * t
    i = (-(p.rho / 2) * al * e) * sp.derivative(g, 2)
    return {"k0": k0, "k1": k1, "k2": k2, "i": i}
