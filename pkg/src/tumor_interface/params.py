"""Dimensionless model parameters and the time-only kernels built from them."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

from .errors import InvalidInputError

__all__ = [
    "ModelParams",
    "nondimensionalize",
    "phi1",
    "psi",
    "c_of_t",
    "m_of_t",
    "alpha_of_t",
    "kernel_L",
]

# below this |(N2 - N1) t| the divided differences switch to their Taylor series
SERIES_THRESHOLD = 1e-2


@dataclass(frozen=True)
class ModelParams:
    """All dimensionless groups of the interface model.

    Attributes
    ----------
    eps : aspect ratio, ``>= 0``.
    eta : surface tension group, ``> 0``.
    theta : chemotaxis group, ``>= 0``.
    rho : proliferation group, ``>= 0``.
    tau : inhibitor kill rate, ``>= 0``.
    n1, n2 : decay groups of inhibitor and nutrient, ``> 0``.
    n3 : cross coupling, ``>= 0``.
    alpha_ratio : diffusion ratio ``D_i / D_n``, ``> 0``.
    c_b, c_s : amplitudes of the exp-sine inhibitor and nutrient profiles.
    omega, m1, m2 : source groups; the asymptotic regime requires them to vanish.
    """

    eps: float = 0.0
    eta: float = 1.0
    theta: float = 0.0
    rho: float = 0.0
    tau: float = 1.0
    n1: float = 1.0
    n2: float = 1.0
    n3: float = 0.0
    alpha_ratio: float = 1.0
    c_b: float = 0.0
    c_s: float = 0.0
    omega: float = 0.0
    m1: float = 0.0
    m2: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            try:
                v = float(v)
            except (TypeError, ValueError):
                raise InvalidInputError(f"{f.name} must be a real number, got {v!r}") from None
            if not math.isfinite(v):
                raise InvalidInputError(f"{f.name} must be finite")
            object.__setattr__(self, f.name, v)
        if not self.eta > 0:
            raise InvalidInputError(f"eta must be positive, got {self.eta}")
        for name in ("eps", "theta", "rho", "tau", "n3"):
            if getattr(self, name) < 0:
                raise InvalidInputError(f"{name} must be non-negative")
        for name in ("n1", "n2", "alpha_ratio"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"{name} must be positive")
        for name in ("omega", "m1", "m2"):
            if getattr(self, name) != 0.0:
                raise InvalidInputError(f"{name} must be 0 in the asymptotic regime")

    @property
    def n(self) -> float:
        """Common decay rate; only meaningful when ``n1 == n2``."""
        if self.n1 != self.n2:
            raise InvalidInputError("n is defined only when n1 == n2")
        return self.n1

    def replace(self, **changes) -> "ModelParams":
        d = asdict(self)
        d.update(changes)
        return ModelParams(**d)

    def as_dict(self) -> dict:
        return asdict(self)


def nondimensionalize(*, d_n, d_i, delta_n, delta_i, lambda_n, lambda_i, gamma_n, chi, mu, nu,
                      sigma_tilde, length, height, tau=1.0, sigma_d=None, sigma_b=None,
                      beta_d=None, beta_b=None, c_b=0.0, c_s=0.0) -> ModelParams:
    """Map dimensional rates and scales to :class:`ModelParams`.

    The source groups ``M1``, ``M2`` and ``omega`` are evaluated only when all
    four of ``sigma_d, sigma_b, beta_d, beta_b`` are supplied; otherwise they
    are taken to be negligible, as the asymptotic regime assumes.  Supplied
    values that make them nonzero are rejected by :class:`ModelParams`.
    """
    for name, v in (("d_n", d_n), ("length", length), ("height", height),
                    ("sigma_tilde", sigma_tilde)):
        if not float(v) > 0:
            raise InvalidInputError(f"{name} must be positive, got {v}")
    lh = length * height
    groups = dict(
        eps=height / length,
        alpha_ratio=d_i / d_n,
        n1=lh * (delta_i + lambda_i) / d_n,
        n2=lh * (delta_n + lambda_n) / d_n,
        n3=gamma_n * lh / d_n,
        theta=chi * sigma_tilde / d_n,
        rho=mu * sigma_tilde * length**2 / d_n,
        eta=nu * height / (length**2 * d_n),
        tau=tau,
        c_b=c_b,
        c_s=c_s,
    )
    extra = (sigma_d, sigma_b, beta_d, beta_b)
    if all(v is not None for v in extra):
        pref = lh / (d_n * sigma_tilde)
        groups["m1"] = pref * (-(delta_i + lambda_i) * beta_d + delta_i * beta_b)
        groups["m2"] = pref * (-sigma_d * (delta_n + lambda_n) + sigma_b * delta_n
                               - gamma_n * beta_d)
        groups["omega"] = mu * length**2 / d_n * (sigma_d - tau * beta_d - sigma_tilde)
    elif any(v is not None for v in extra):
        raise InvalidInputError("give all of sigma_d, sigma_b, beta_d, beta_b or none")
    return ModelParams(**groups)


def phi1(x: float) -> float:
    """``(exp(x) - 1) / x``, stable near 0."""
    if abs(x) < SERIES_THRESHOLD:
        # sum_{n>=0} x^n/(n+1)!
        term, total = 1.0, 1.0
        for n in range(1, 10):
            term *= x / (n + 1)
            total += term
        return total
    return math.expm1(x) / x


def psi(x: float) -> float:
    """``(x exp(x) - exp(x) + 1) / x**2``, stable near 0."""
    if abs(x) < SERIES_THRESHOLD:
        # sum_{n>=2} (n-1) x^(n-2) / n!
        total, fact = 0.0, 2.0
        for n in range(2, 12):
            total += (n - 1) * x ** (n - 2) / fact
            fact *= n + 1
        return total
    return (x * math.exp(x) - math.expm1(x)) / x**2


def c_of_t(p: ModelParams, t: float) -> float:
    """Coefficient of the inhibitor profile inside ``L``.

    ``N3 (exp((N2-N1) t) - 1) / (N2 - N1)``, which tends to ``N3 t``.
    """
    d = p.n2 - p.n1
    return p.n3 * t * phi1(d * t)


def m_of_t(p: ModelParams, t: float) -> float:
    """``M(t) = N3 (1-alpha) e^{-N2 t} [t e^{dt} - (e^{dt}-1)/d] / d`` with ``d = N2 - N1``.

    Written as ``N3 (1-alpha) e^{-N2 t} t^2 psi(d t)`` so the equal-rate limit
    ``N3 (1-alpha) t^2 e^{-N2 t} / 2`` needs no special case.
    """
    if t < 0:
        raise InvalidInputError("t must be non-negative")
    d = p.n2 - p.n1
    return p.n3 * (1.0 - p.alpha_ratio) * math.exp(-p.n2 * t) * t * t * psi(d * t)


def alpha_of_t(p: ModelParams, t: float) -> float:
    """``c_S - N3 c_B t``, the nutrient amplitude of ``L`` for exp-sine data."""
    return p.c_s - p.n3 * p.c_b * t


def kernel_L(s_profile, b_profile, p: ModelParams, x2, t: float, n: int = 0):
    """``d^n/dx2^n`` of ``S(x2) - c(t) B(x2)``."""
    if t < 0:
        raise InvalidInputError("t must be non-negative")
    return s_profile.deriv(n, x2) - c_of_t(p, t) * b_profile.deriv(n, x2)
