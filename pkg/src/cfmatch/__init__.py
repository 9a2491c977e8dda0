"""Complex-frequency matching of purely reactive loads on a transmission line."""
from .errors import CfmatchError, ValidationError
from .excitation import SignalSpec, synthesize
from .load_model import LineParams, LoadKind, LoadTopology, Regime, derive_params
from .scattering import ZeroChoice, analytic_singularities, gamma, select_excitable_zero
from .timedomain import energy_audit, simulate

__all__ = [
    "CfmatchError", "ValidationError", "SignalSpec", "synthesize", "LineParams", "LoadKind",
    "LoadTopology", "Regime", "derive_params", "ZeroChoice", "analytic_singularities", "gamma",
    "select_excitable_zero", "energy_audit", "simulate",
]
__version__ = "0.1.0"
