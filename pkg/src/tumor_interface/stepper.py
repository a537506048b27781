"""Exponential integrators for ``g_t = -eta Lambda^3 g + N(g, t)``.

The stiff diagonal part is propagated exactly by ``exp(-eta |k|^3 dt)``; the
remainder ``N`` is treated explicitly by one of three schemes:

``if-euler``   integrating-factor Euler, order 1
``if-rk2``     integrating-factor Heun, order 2
``etdrk2``     Cox-Matthews exponential time differencing, order 2
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import spectral as sp
from .errors import BlowUpError, InvalidInputError
from .spectral import SpectralField

__all__ = ["SCHEMES", "StepperConfig", "SimState", "SplitRhs", "RunResult", "step", "run",
           "default_dt", "phi_functions"]

SCHEMES = ("if-euler", "if-rk2", "etdrk2")
BLOWUP_A1 = 1e6


@dataclass(frozen=True)
class SplitRhs:
    """Minimal split right-hand side: ``eta`` and a callable ``nonstiff(g, t)``."""

    eta: float
    func: Callable

    def nonstiff(self, g, t):
        return self.func(g, t)


@dataclass(frozen=True)
class StepperConfig:
    scheme: str = "etdrk2"
    t_end: float = 1.0
    dt: float | None = None
    cfl_safety: float = 1.0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise InvalidInputError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise InvalidInputError("t_end must be finite and >= 0")
        if self.dt is not None and not (math.isfinite(self.dt) and self.dt > 0):
            raise InvalidInputError("dt must be positive")
        if not 0 < self.cfl_safety <= 1:
            raise InvalidInputError("cfl_safety must lie in (0, 1]")


@dataclass(frozen=True)
class SimState:
    g: SpectralField
    t: float
    g0: SpectralField
    step_index: int = 0

    def __post_init__(self):
        if self.g.grid_size != self.g0.grid_size:
            raise InvalidInputError("g and g0 must share a grid")
        if not self.t >= 0:
            raise InvalidInputError("t must be >= 0")


@dataclass
class RunResult:
    state: SimState
    outputs: list = field(default_factory=list)
    dt: float = 0.0


def default_dt(eta: float, grid_size: int, cfl_safety: float = 1.0) -> float:
    """``0.5 / (eta K_max^3)`` scaled by ``cfl_safety``."""
    kmax = grid_size // 2 - 1
    return 0.5 / (eta * kmax**3) * cfl_safety


def phi_functions(z: np.ndarray):
    """``phi1(z) = (e^z - 1)/z`` and ``phi2(z) = (e^z - 1 - z)/z^2``, stable near 0."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-3
    zs = np.where(small, 1.0, z)
    p1 = np.where(small, 1 + z / 2 + z**2 / 6 + z**3 / 24 + z**4 / 120,
                  np.expm1(zs) / zs)
    p2 = np.where(small, 0.5 + z / 6 + z**2 / 24 + z**3 / 120 + z**4 / 720,
                  (np.expm1(zs) - zs) / zs**2)
    return p1, p2


def _norms(g: SpectralField) -> dict:
    hom = sp.wiener_norm(g, 1, homogeneous=True)
    return {"a1": abs(g.mean) + hom, "a1_hom": hom}


def step(state: SimState, cfg: StepperConfig, rhs, dt: float | None = None) -> SimState:
    """Advance one step of size ``dt`` (``cfg.dt`` or the default when omitted).

    Raises
    ------
    BlowUpError
        If the new coefficients are non-finite or ``|g(0)| + ||g||_{A^1}``
        exceeds ``1e6``.
    """
    g = state.g
    if dt is None:
        dt = cfg.dt if cfg.dt is not None else default_dt(rhs.eta, g.grid_size, cfg.cfl_safety)
    lin = -rhs.eta * g.wavenumbers.astype(float) ** 3
    z = lin * dt
    e = np.exp(z)
    t = state.t
    c = g.coeffs
    n0 = rhs.nonstiff(g, t).coeffs
    with np.errstate(all="ignore"):
        if cfg.scheme == "if-euler":
            new = e * (c + dt * n0)
        elif cfg.scheme == "if-rk2":
            a = _field_or_blowup(e * (c + dt * n0), state)
            na = rhs.nonstiff(a, t + dt).coeffs
            new = e * c + 0.5 * dt * (e * n0 + na)
        else:
            p1, p2 = phi_functions(z)
            a_c = e * c + dt * p1 * n0
            a = _field_or_blowup(a_c, state)
            na = rhs.nonstiff(a, t + dt).coeffs
            new = a_c + dt * p2 * (na - n0)
    g_new = _field_or_blowup(new, state)
    norms = _norms(g_new)
    if norms["a1"] > BLOWUP_A1:
        raise BlowUpError(f"||g||_A1 = {norms['a1']:.3e} exceeds {BLOWUP_A1:g}",
                          state.step_index + 1, state.t, _norms(state.g))
    return SimState(g_new, t + dt, state.g0, state.step_index + 1)


def _field_or_blowup(coeffs, state: SimState) -> SpectralField:
    if not np.all(np.isfinite(coeffs)):
        raise BlowUpError("non-finite coefficients", state.step_index + 1, state.t,
                          _norms(state.g))
    coeffs = np.array(coeffs, dtype=complex)
    coeffs[0] = coeffs[0].real
    return SpectralField(coeffs, state.g.grid_size)


def run(initial: SimState, cfg: StepperConfig, rhs, observers=()) -> RunResult:
    """Integrate from ``initial.t`` to ``cfg.t_end``.

    The step count is ``ceil((t_end - t0) / dt)`` and the step is shrunk
    uniformly so the last step lands on ``t_end``.  Every observer is called
    on the initial and on each accepted state; its return values are
    collected in ``RunResult.outputs`` (one list per observer).  On blow-up
    the partial outputs are attached to the raised :class:`BlowUpError`.
    """
    observers = list(observers)
    outputs = [[obs(initial)] for obs in observers]
    span = cfg.t_end - initial.t
    if span <= 0:
        return RunResult(initial, outputs, 0.0)
    dt0 = cfg.dt if cfg.dt is not None else default_dt(rhs.eta, initial.g.grid_size,
                                                       cfg.cfl_safety)
    nsteps = max(1, math.ceil(span / dt0 - 1e-9))
    dt = span / nsteps
    state = initial
    for i in range(nsteps):
        try:
            state = step(state, cfg, rhs, dt)
        except BlowUpError as exc:
            exc.partial = outputs
            raise
        # pin time to the grid to avoid drift
        state = replace(state, t=initial.t + (i + 1) * dt if i + 1 < nsteps else cfg.t_end)
        for obs, out in zip(observers, outputs):
            out.append(obs(state))
    return RunResult(state, outputs, dt)
