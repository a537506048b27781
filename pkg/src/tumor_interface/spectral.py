"""Real periodic fields on the torus and their Fourier multipliers.

A field ``g`` on ``[-pi, pi)`` is stored through its coefficients

    g_hat(k) = (1/2pi) * int g(x) exp(-i k x) dx,      g(x) = sum_k g_hat(k) exp(i k x),

for ``0 <= k <= K_max`` only; negative modes follow from Hermitian symmetry.
With ``N`` collocation points ``K_max = N/2 - 1`` and the Nyquist mode is
always zero.

Conventions
-----------
* Hilbert transform: multiplier ``-i sgn(k)``.
* ``Lambda = H d/dx`` has multiplier ``|k|``; ``Lambda**s`` has ``|k|**s``.
* Products are dealiased by 3/2 zero padding, so every retained mode of a
  product equals the exact convolution of the two coefficient sequences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "SpectralField",
    "from_samples",
    "from_modes",
    "zeros",
    "hilbert",
    "lambda_pow",
    "derivative",
    "multiply",
    "wiener_norm",
]


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Truncated Fourier representation of a real function on the torus.

    Parameters
    ----------
    coeffs:
        Complex coefficients for ``k = 0, 1, ..., grid_size//2 - 1``.
    grid_size:
        Number of collocation points (even, at least 4).
    """

    coeffs: np.ndarray
    grid_size: int

    def __post_init__(self):
        n = self.grid_size
        if not isinstance(n, (int, np.integer)) or n < 4 or n % 2:
            raise InvalidInputError(f"grid_size must be an even integer >= 4, got {n!r}")
        c = np.array(self.coeffs, dtype=np.complex128).ravel()
        if c.size != n // 2:
            raise InvalidInputError(
                f"expected {n // 2} coefficients for grid_size={n}, got {c.size}"
            )
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("coefficients must be finite")
        if abs(c[0].imag) > 1e-12 * max(1.0, abs(c[0].real)):
            raise InvalidInputError("mean mode of a real field must be real")
        c[0] = c[0].real
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "grid_size", int(n))

    @property
    def k_max(self) -> int:
        return self.grid_size // 2 - 1

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(self.k_max + 1)

    @property
    def mean(self) -> float:
        return float(self.coeffs[0].real)

    def full(self):
        """Return ``(k, g_hat)`` over ``-K_max..K_max`` in increasing ``k``."""
        c = self.coeffs
        k = np.arange(-self.k_max, self.k_max + 1)
        return k, np.concatenate([np.conj(c[:0:-1]), c])

    def coefficient(self, k: int) -> complex:
        """``g_hat(k)`` for any integer ``k`` (zero beyond ``K_max``)."""
        if abs(k) > self.k_max:
            return 0j
        c = self.coeffs[abs(k)]
        return complex(np.conj(c)) if k < 0 else complex(c)

    def to_samples(self) -> np.ndarray:
        """Values at ``x_j = -pi + 2 pi j / N``."""
        n = self.grid_size
        spec = np.zeros(n // 2 + 1, dtype=np.complex128)
        spec[:-1] = self.coeffs * _shift_phase(n)
        return np.fft.irfft(spec * n, n)

    def evaluate(self, x) -> np.ndarray:
        """Evaluate the truncated Fourier series at arbitrary points."""
        x = np.asarray(x, dtype=float)
        k = self.wavenumbers[1:]
        phase = np.exp(1j * np.multiply.outer(x, k))
        return self.mean + 2.0 * np.real(phase @ self.coeffs[1:])

    def with_coeffs(self, coeffs) -> "SpectralField":
        return SpectralField(coeffs, self.grid_size)

    # arithmetic -----------------------------------------------------------
    def _check(self, other: "SpectralField"):
        if not isinstance(other, SpectralField):
            return NotImplemented
        if other.grid_size != self.grid_size:
            raise InvalidInputError(
                f"grid mismatch: {self.grid_size} vs {other.grid_size}"
            )
        return None

    def __add__(self, other):
        if isinstance(other, (int, float, np.floating)):
            c = self.coeffs.copy()
            c[0] += other
            return self.with_coeffs(c)
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self.with_coeffs(self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return self + (-other)
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self.with_coeffs(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, SpectralField):
            return multiply(self, other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self.with_coeffs(self.coeffs * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self.with_coeffs(self.coeffs / float(other))
        return NotImplemented

    def __repr__(self):
        return f"SpectralField(grid_size={self.grid_size}, mean={self.mean:.6g})"


def _shift_phase(n: int) -> np.ndarray:
    # samples start at x = -pi rather than 0
    k = np.arange(n // 2)
    return np.exp(-1j * np.pi * k)


def collocation_points(grid_size: int) -> np.ndarray:
    return -np.pi + 2.0 * np.pi * np.arange(grid_size) / grid_size


def from_samples(values) -> SpectralField:
    """Transform samples at :func:`collocation_points` into a field.

    The Nyquist coefficient is discarded, so the round trip is exact only for
    samples without Nyquist content.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise InvalidInputError("samples must be one-dimensional")
    n = v.size
    if n < 4 or n % 2:
        raise InvalidInputError(f"number of samples must be even and >= 4, got {n}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("samples must be finite")
    spec = np.fft.rfft(v)[: n // 2] / n
    return SpectralField(spec / _shift_phase(n), n)


def zeros(grid_size: int) -> SpectralField:
    return SpectralField(np.zeros(grid_size // 2, dtype=complex), grid_size)


def from_modes(grid_size: int, modes: dict) -> SpectralField:
    """Build a field from ``{k: g_hat(k)}`` with ``k >= 0``."""
    c = np.zeros(grid_size // 2, dtype=complex)
    for k, v in modes.items():
        k = int(k)
        if k < 0:
            raise InvalidInputError("give non-negative wavenumbers only")
        if k >= c.size:
            raise InvalidInputError(f"mode {k} exceeds K_max={c.size - 1}")
        c[k] = v
    return SpectralField(c, grid_size)


def hilbert(g: SpectralField) -> SpectralField:
    """Hilbert transform, multiplier ``-i sgn(k)``."""
    c = -1j * g.coeffs
    c[0] = 0.0
    return g.with_coeffs(c)


def lambda_pow(g: SpectralField, s: float) -> SpectralField:
    """Fractional Laplacian ``Lambda**s`` (multiplier ``|k|**s``)."""
    s = float(s)
    if not np.isfinite(s) or s < 0:
        raise InvalidInputError(f"order must be finite and non-negative, got {s}")
    if s == 0:
        return g
    return g.with_coeffs(g.coeffs * g.wavenumbers.astype(float) ** s)


def derivative(g: SpectralField, order: int = 1) -> SpectralField:
    """``d^order/dx^order`` (multiplier ``(ik)**order``)."""
    if int(order) != order or order < 1:
        raise InvalidInputError(f"order must be a positive integer, got {order!r}")
    return g.with_coeffs(g.coeffs * (1j * g.wavenumbers) ** int(order))


def multiply(f: SpectralField, g: SpectralField) -> SpectralField:
    """Dealiased pointwise product truncated to ``K_max``."""
    if not isinstance(f, SpectralField) or not isinstance(g, SpectralField):
        raise InvalidInputError("multiply expects two SpectralField arguments")
    if f.grid_size != g.grid_size:
        raise InvalidInputError(f"grid mismatch: {f.grid_size} vs {g.grid_size}")
    return f.with_coeffs(_product_coeffs(f.coeffs, g.coeffs))


def _product_coeffs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # padding to M > 3*K_max keeps every retained mode alias-free
    kh = a.size
    m = 3 * kh
    fa = np.zeros(m // 2 + 1, dtype=complex)
    fb = np.zeros(m // 2 + 1, dtype=complex)
    fa[:kh] = a
    fb[:kh] = b
    ua = np.fft.irfft(fa * m, m)
    ub = np.fft.irfft(fb * m, m)
    return np.fft.rfft(ua * ub)[:kh] / m


def wiener_norm(g: SpectralField, s: float = 0.0, homogeneous: bool = False) -> float:
    """``sum_k |k|**s |g_hat(k)|`` over all stored modes of both signs.

    With ``homogeneous=True`` the ``k = 0`` term is excluded.
    """
    s = float(s)
    if s < 0:
        raise InvalidInputError("Wiener order must be non-negative")
    mod = np.abs(g.coeffs)
    k = g.wavenumbers[1:].astype(float)
    total = 2.0 * float(np.sum(k**s * mod[1:]))
    if not homogeneous and s == 0:
        total += float(mod[0])
    return total
