"""Right-hand side of the interface evolution equation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import spectral as sp
from .depth import ExpSineProfile
from .errors import InvalidInputError
from .forcing import ForcingBundle, as_layered
from .params import ModelParams, alpha_of_t
from .spectral import SpectralField

__all__ = ["commutator_term", "commutator_alt", "rhs_particular", "rhs_general", "RhsConfig"]


def commutator_term(g: SpectralField) -> SpectralField:
    """``d/dx ( H(g q) - g H q )`` with ``q = H g_xxx``."""
    q = sp.hilbert(sp.derivative(g, 3))
    inner = sp.hilbert(sp.multiply(g, q)) - sp.multiply(g, sp.hilbert(q))
    return sp.derivative(inner, 1)


def commutator_alt(g: SpectralField) -> SpectralField:
    """Same quantity written as ``-Lambda(g Lambda^3 g) + g Lambda^4 g - g_x (Lambda^2 g)_x``."""
    l3 = sp.lambda_pow(g, 3)
    l4 = sp.lambda_pow(g, 4)
    l2x = sp.derivative(sp.lambda_pow(g, 2), 1)
    return (-sp.lambda_pow(sp.multiply(g, l3), 1) + sp.multiply(g, l4)
            - sp.multiply(sp.derivative(g, 1), l2x))


def _particular_terms(g, g0, t, p: ModelParams):
    """The forcing groups of the exp-sine model, in the order they are written."""
    nn = p.n
    e = math.exp(-nn * t)
    al = alpha_of_t(p, t)
    dg = g - g0
    g11 = sp.derivative(g, 2)
    return [
        -p.eps * ((2 * p.theta * e * al) * dg
                  + (e * al * (2 * p.theta - p.rho) * t + p.rho * e * t * p.c_b)),
        (2 * p.theta * p.eps * e * al) * (dg + t),
        (-p.eps * (p.rho / 2) * al * e) * g11,
        sp.zeros(g.grid_size) + (-(e / 2) * p.rho * (al - p.c_b)),
    ]


def rhs_particular(g: SpectralField, g0: SpectralField, t: float, p: ModelParams, *,
                   collapsed: bool = False, stiff: bool = True) -> SpectralField:
    """Exp-sine model right-hand side.

    ``collapsed=True`` evaluates the algebraically simplified forcing
    ``eps e^{-Nt} [rho t (alpha - c_B) - (rho/2) alpha g_11]`` instead of the
    term-by-term sum; both must agree.  ``stiff=False`` omits ``-eta Lambda^3 g``.
    """
    if g.grid_size != g0.grid_size:
        raise InvalidInputError("g and g0 must share a grid")
    out = p.eps * p.eta * commutator_term(g) if p.eps else sp.zeros(g.grid_size)
    if collapsed:
        e = math.exp(-p.n * t)
        al = alpha_of_t(p, t)
        out = out + (p.eps * e * p.rho * t * (al - p.c_b) - (e / 2) * p.rho * (al - p.c_b))
        out = out + (-p.eps * e * (p.rho / 2) * al) * sp.derivative(g, 2)
    else:
        for term in _particular_terms(g, g0, t, p):
            out = out + term
    if stiff:
        out = out - p.eta * sp.lambda_pow(g, 3)
    return out


@dataclass(frozen=True)
class RhsConfig:
    """Everything the right-hand side needs besides the state.

    In ``particular`` mode the exp-sine regime is enforced: ``n1 == n2``,
    ``alpha_ratio == 1``, ``tau == 1`` and, if profiles are given, exp-sine
    profiles whose amplitudes equal ``c_s`` and ``c_b``.
    """

    mode: str
    params: ModelParams
    s: object = None
    b: object = None
    g0: SpectralField | None = None
    extension: str = "frozen"
    bundle: ForcingBundle = field(init=False, repr=False)

    def __post_init__(self):
        p = self.params
        if self.mode == "particular":
            if p.n1 != p.n2 or p.alpha_ratio != 1.0 or p.tau != 1.0:
                raise InvalidInputError("particular mode needs n1 == n2, alpha_ratio == 1, tau == 1")
            for prof, amp, name in ((self.s, p.c_s, "s"), (self.b, p.c_b, "b")):
                if prof is None:
                    continue
                if not isinstance(prof, ExpSineProfile) or prof.amplitude != amp:
                    raise InvalidInputError(
                        f"particular mode needs an exp-sine {name} profile with amplitude {amp}")
            s = self.s if self.s is not None else ExpSineProfile(p.c_s)
            b = self.b if self.b is not None else ExpSineProfile(p.c_b)
        elif self.mode == "general":
            if self.s is None or self.b is None:
                raise InvalidInputError("general mode needs both profiles")
            s, b = as_layered(self.s), as_layered(self.b)
        else:
            raise InvalidInputError(f"mode must be general or particular, got {self.mode!r}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "bundle",
                           ForcingBundle(p, s, b, mode=self.mode, extension=self.extension))

    @property
    def eta(self) -> float:
        return self.params.eta

    def nonstiff(self, g: SpectralField, t: float) -> SpectralField:
        """All terms except ``-eta Lambda^3 g``; the form the integrators consume."""
        if self.g0 is None:
            raise InvalidInputError("RhsConfig.g0 is required for time stepping")
        if self.mode == "particular":
            return rhs_particular(g, self.g0, t, self.params, stiff=False)
        return rhs_general(g, self.g0, t, self, stiff=False)

    def __call__(self, g, t):
        return self.nonstiff(g, t) - self.eta * sp.lambda_pow(g, 3)


def rhs_general(g: SpectralField, g0: SpectralField, t: float, cfg: RhsConfig, *,
                stiff: bool = True) -> SpectralField:
    """General model right-hand side.

    ``-eta Lambda^3 g + eps eta C(g) - eps theta g e^{-N2 t} L_1(., 0, t)
    + eps K1 + K0`` with ``K1 = -I - K1_1 + K2_1``.
    """
    p = cfg.params
    n = g.grid_size
    bundle = cfg.bundle
    if cfg.mode != "general":
        bundle = ForcingBundle(p, cfg.s, cfg.b, mode="general", extension=cfg.extension)
    out = bundle.k0(t, n)
    if p.eps:
        out = out + p.eps * p.eta * commutator_term(g)
        out = out + p.eps * bundle.k1_tilde(g, g0, t)
        if p.theta:
            l1 = bundle.l1_trace(t, n)
            out = out - (p.eps * p.theta * math.exp(-p.n2 * t)) * sp.multiply(g, l1)
    if stiff:
        out = out - p.eta * sp.lambda_pow(g, 3)
    return out
