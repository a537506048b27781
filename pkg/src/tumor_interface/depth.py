"""Depth profiles on ``x2 in (-inf, 0]`` and their semi-infinite integrals.

The harmonic-extension semigroup ``exp(y Lambda)`` acts on Fourier mode ``k``
as ``exp(|k| y)``, so every forcing term reduces to moments

    int_{-inf}^0  y**p * exp(beta*y) * f^(n)(y) dy

of a profile ``f`` and its depth derivatives.  Moments are evaluated by
adaptive Gauss-Kronrod quadrature (QUADPACK through :func:`scipy.integrate.quad`)
on a finite window whose length follows from the profile's declared
exponential envelope, and are cached since they do not depend on time.
"""

from __future__ import annotations

import csv
import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, interpolate

from .errors import ConvergenceError, InvalidInputError

__all__ = [
    "depth_integral",
    "DepthProfile",
    "ExpSineProfile",
    "TableProfile",
    "LayeredData",
    "depth_only",
    "load_profile_csv",
]

TAIL_TOL = 1e-12


def _tail_window(rate: float, bound: float, power: int) -> float:
    """Smallest X with ``bound * int_X^inf y**p exp(-rate*y) dy <= TAIL_TOL``."""
    x = 1.0
    while True:
        if power == 0:
            tail = bound * math.exp(-rate * x) / rate
        else:
            tail = bound * math.exp(-rate * x) * (x / rate + 1.0 / rate**2)
        if tail <= TAIL_TOL:
            return x
        x *= 1.25


def depth_integral(kernel, k: float = 0, *, rate: float = 1.0, bound: float = 1.0,
                   power: int = 0, tol: float = 1e-10) -> float:
    """``int_{-inf}^0 exp(|k| y) y**power kernel(y) dy``.

    Parameters
    ----------
    kernel:
        Vectorised callable on ``y <= 0``.
    k:
        Semigroup wavenumber; only ``|k|`` matters.
    rate, bound:
        Envelope ``|kernel(y)| <= bound * exp(rate * y)`` used to truncate
        the domain with a tail below ``1e-12``.
    power:
        Polynomial weight ``y**power`` (0 or 1 is what the forcing needs).
    tol:
        Required absolute accuracy of the finite part.

    Raises
    ------
    ConvergenceError
        If the kernel does not decay (``rate + |k| <= 0``), violates its
        envelope far out, or quadrature misses ``tol``.
    """
    beta = abs(float(k))
    decay = float(rate) + beta
    if not decay > 0:
        raise ConvergenceError(f"kernel does not decay: rate + |k| = {decay}")
    x_cut = _tail_window(decay, max(float(bound), 1e-300), int(power))
    probe = np.array([-x_cut, -1.5 * x_cut])
    vals = np.abs(np.asarray(kernel(probe), dtype=float))
    if np.any(vals > 10.0 * bound * np.exp(rate * probe) + 1e-300):
        raise ConvergenceError("kernel exceeds its declared exponential envelope")

    def integrand(y):
        return math.exp(beta * y) * y**power * float(kernel(y))

    # split the window so each piece sees a few oscillations at most
    edges = np.linspace(-x_cut, 0.0, max(2, int(x_cut / 8.0) + 2))
    total, err = 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(integrand, a, b, epsabs=tol * 1e-2, epsrel=1e-13, limit=200)
        total += val
        err += e
    if err > tol:
        raise ConvergenceError(f"quadrature error estimate {err:.3e} exceeds {tol:.1e}")
    return total


class DepthProfile:
    """A function of depth with derivatives and cached semi-infinite moments.

    Subclasses implement :meth:`deriv` and :meth:`envelope`.
    """

    def __init__(self):
        self._cache: dict = {}
        self._lock = threading.Lock()

    def deriv(self, n: int, y):
        raise NotImplementedError

    def __call__(self, y):
        return self.deriv(0, y)

    def envelope(self, n: int):
        """``(bound, rate)`` with ``|f^(n)(y)| <= bound * exp(rate*y)`` on ``y <= 0``."""
        raise NotImplementedError

    def trace(self, n: int) -> float:
        """``f^(n)(0)``."""
        return float(self.deriv(n, 0.0))

    def moment(self, n: int, beta: float = 0.0, power: int = 0) -> float:
        """``int_{-inf}^0 y**power exp(beta*y) f^(n)(y) dy`` (cached)."""
        key = (int(n), float(beta), int(power))
        val = self._cache.get(key)
        if val is None:
            val = self._compute_moment(*key)
            with self._lock:
                self._cache.setdefault(key, val)
        return val

    def _compute_moment(self, n, beta, power):
        bound, rate = self.envelope(n)
        return depth_integral(lambda y: self.deriv(n, y), beta, rate=rate, bound=bound,
                              power=power)

    def describe(self) -> dict:
        raise NotImplementedError


class ExpSineProfile(DepthProfile):
    """``c * exp(y) * sin(y)``, the preset used for the particular case."""

    def __init__(self, amplitude: float):
        super().__init__()
        self.amplitude = float(amplitude)

    def deriv(self, n, y):
        # d^n/dy^n Im(exp((1+i)y)) = 2**(n/2) exp(y) sin(y + n*pi/4)
        y = np.asarray(y, dtype=float)
        return self.amplitude * 2.0 ** (n / 2) * np.exp(y) * np.sin(y + n * np.pi / 4)

    def envelope(self, n):
        return abs(self.amplitude) * 2.0 ** (n / 2), 1.0

    def describe(self):
        return {"kind": "exp-sine", "amplitude": self.amplitude}

    def __repr__(self):
        return f"ExpSineProfile({self.amplitude!r})"


class TableProfile(DepthProfile):
    """Tabulated profile, quintic-spline interpolated, with an exponential tail.

    Below the first tabulated depth ``y0`` the profile continues as
    ``f(y0) * exp(tail_rate * (y - y0))``.
    """

    def __init__(self, x2, values, tail_rate: float, *, source: str | None = None):
        super().__init__()
        x = np.asarray(x2, dtype=float)
        v = np.asarray(values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape:
            raise InvalidInputError("x2 and values must be 1-D arrays of equal length")
        if x.size < 6:
            raise InvalidInputError("a table needs at least 6 rows for quintic interpolation")
        if np.any(np.diff(x) <= 0):
            raise InvalidInputError("x2 must be strictly increasing")
        if x[-1] != 0.0:
            raise InvalidInputError("last row must have x2 = 0")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("table values must be finite")
        if abs(v[-1]) > 1e-10:
            raise InvalidInputError(f"profile must vanish at x2 = 0, got {v[-1]:.3e}")
        if not tail_rate > 0:
            raise InvalidInputError("tail_rate must be positive")
        self.x2 = x
        self.values = v
        self.tail_rate = float(tail_rate)
        self.source = source
        self._spline = interpolate.make_interp_spline(x, v, k=5)
        self._derivs = [self._spline]
        for _ in range(4):
            self._derivs.append(self._derivs[-1].derivative())

    def _spl(self, n):
        while len(self._derivs) <= n:
            self._derivs.append(self._derivs[-1].derivative())
        return self._derivs[n]

    def deriv(self, n, y):
        y = np.asarray(y, dtype=float)
        y0 = self.x2[0]
        inside = self._spl(n)(np.clip(y, y0, 0.0))
        tail = self.values[0] * self.tail_rate**n * np.exp(self.tail_rate * (y - y0))
        return np.where(y >= y0, inside, tail)

    def envelope(self, n):
        grid = np.linspace(self.x2[0], 0.0, 2000)
        peak = float(np.max(np.abs(self._spl(n)(grid))))
        peak = max(peak, abs(self.values[0]) * self.tail_rate**n)
        return peak * math.exp(-self.tail_rate * self.x2[0]), self.tail_rate

    def _compute_moment(self, n, beta, power):
        y0 = self.x2[0]
        spl = self._spl(n)
        val, err = integrate.quad(lambda y: y**power * math.exp(beta * y) * float(spl(y)),
                                  y0, 0.0, points=list(self.x2[1:-1][:: max(1, self.x2.size // 40)]),
                                  epsabs=1e-12, epsrel=1e-12, limit=400)
        if err > 1e-10:
            raise ConvergenceError(f"table moment quadrature error {err:.3e}")
        amp = self.values[0] * self.tail_rate**n
        a = beta + self.tail_rate
        if power == 0:
            tail = amp * math.exp(beta * y0) / a
        else:
            tail = amp * math.exp(beta * y0) * (y0 / a - 1.0 / a**2)
        return val + tail

    def describe(self):
        return {"kind": "table", "source": self.source, "tail_rate": self.tail_rate}


def load_profile_csv(path, tail_rate: float) -> TableProfile:
    """Read a two-column ``x2,value`` CSV (header optional)."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if rows:
                    raise InvalidInputError(f"bad row in {path}: {row}")
                continue  # header
    if not rows:
        raise InvalidInputError(f"no data rows in {path}")
    x, v = zip(*rows)
    return TableProfile(x, v, tail_rate, source=str(path))


@dataclass(frozen=True)
class LayeredData:
    """Initial concentration ``sum_j f_j(x2) * sum_m a_jm exp(i m x1)``.

    ``terms`` holds ``(profile, {m: a_m})`` pairs with ``m >= 0``; negative
    modes are implied by ``a_{-m} = conj(a_m)`` so the field is real.
    """

    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        clean = []
        for prof, coefs in self.terms:
            if not isinstance(prof, DepthProfile):
                raise InvalidInputError("LayeredData terms need DepthProfile instances")
            cc = {}
            for m, a in dict(coefs).items():
                m = int(m)
                if m < 0:
                    raise InvalidInputError("give non-negative x1 modes only")
                a = complex(a)
                if m == 0 and abs(a.imag) > 1e-14:
                    raise InvalidInputError("x1 mean coefficient must be real")
                cc[m] = a
            clean.append((prof, cc))
        object.__setattr__(self, "terms", tuple(clean))

    @property
    def modes(self) -> list[int]:
        """All x1 wavenumbers carried by the data, both signs."""
        ms = set()
        for _, cc in self.terms:
            for m, a in cc.items():
                if a != 0:
                    ms.update({m, -m})
        return sorted(ms)

    @property
    def depth_only(self) -> bool:
        return all(m == 0 for m in self.modes)

    def _coef(self, cc, m):
        a = cc.get(abs(m), 0j)
        return a.conjugate() if m < 0 else a

    def moment(self, m: int, n: int, beta: float = 0.0, power: int = 0) -> complex:
        """Mode-``m`` coefficient of ``int y**p exp(beta*y) d^n/dy^n (.) dy``."""
        return sum(self._coef(cc, m) * prof.moment(n, beta, power)
                   for prof, cc in self.terms if self._coef(cc, m) != 0)

    def trace(self, m: int, n: int) -> complex:
        return sum(self._coef(cc, m) * prof.trace(n)
                   for prof, cc in self.terms if self._coef(cc, m) != 0)

    def mode_value(self, m: int, n: int, y):
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y, dtype=complex)
        for prof, cc in self.terms:
            a = self._coef(cc, m)
            if a != 0:
                out = out + a * prof.deriv(n, y)
        return out

    def evaluate(self, x1, x2, d1: int = 0, d2: int = 0):
        """Pointwise value of ``d1``-th x1 / ``d2``-th x2 derivative."""
        x1 = np.asarray(x1, dtype=float)
        out = 0.0
        for m in self.modes:
            out = out + np.real((1j * m) ** d1 * np.exp(1j * m * x1) * self.mode_value(m, d2, x2))
        return np.asarray(out, dtype=float) + np.zeros(np.broadcast(x1, np.asarray(x2)).shape)

    def envelope(self, m: int, n: int):
        bound, rate = 0.0, math.inf
        for prof, cc in self.terms:
            a = self._coef(cc, m)
            if a != 0:
                b, r = prof.envelope(n)
                bound += abs(a) * b
                rate = min(rate, r)
        return bound, rate

    def describe(self):
        return [{"profile": p.describe(), "modes": {str(m): [a.real, a.imag] for m, a in cc.items()}}
                for p, cc in self.terms]


def depth_only(profile: DepthProfile) -> LayeredData:
    return LayeredData(((profile, {0: 1.0}),))
