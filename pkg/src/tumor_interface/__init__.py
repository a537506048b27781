"""Pseudospectral solver for a nonlocal tumor-interface evolution equation."""

from .depth import (DepthProfile, ExpSineProfile, LayeredData, TableProfile, depth_integral,
                    depth_only, load_profile_csv)
from .diagnostics import DiagnosticsRecord, dissipation_monitor, record
from .errors import BlowUpError, ConfigError, ConvergenceError, InvalidInputError
from .forcing import (ForcingBundle, i_tilde, k0_general, k1_tilde_1, k2_tilde_1,
                      pressure_order0, q_alpha, r1_operator)
from .model import RhsConfig, commutator_term, rhs_general, rhs_particular
from .params import ModelParams, kernel_L, m_of_t, nondimensionalize
from .spectral import (SpectralField, derivative, from_modes, from_samples, hilbert, lambda_pow,
                       multiply, wiener_norm)
from .stepper import SimState, StepperConfig, run, step

__version__ = "0.1.0"
