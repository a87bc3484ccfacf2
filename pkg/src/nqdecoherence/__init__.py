"""Decoherence functions of an N-qubit charge-qubit register coupled to a
common acoustic phonon bath and to independent metallic gates."""

__version__ = "0.1.0"

from .core import (DeformationBath, OhmicFermionicBath, PiezoBath, RegisterGeometry, Units,
                   coth_factor, eta_from_gate)
from .decay import (DecayProfile, decay_profile, e_factor, e_tilde_factor, q1_r, q2_r,
                    q_fermionic, toeplitz_quadratic)
from .errors import ConvergenceError, DomainError, ResourceCapError
from .paths import PiecewisePath, gate_durations, influence_functional, split_path
from .quadrature import OscillationHints, QuadratureConfig, integrate_oscillatory
from .register import BasisPair, bounds, evolve_element, static_element
from .spectral import SpectralFunction, eval_J, eval_J_ohmic

__all__ = [
    "BasisPair", "ConvergenceError", "DecayProfile", "DeformationBath", "DomainError",
    "OhmicFermionicBath", "OscillationHints", "PiecewisePath", "PiezoBath",
    "QuadratureConfig", "RegisterGeometry", "ResourceCapError", "SpectralFunction", "Units",
    "bounds", "coth_factor", "decay_profile", "e_factor", "e_tilde_factor", "eta_from_gate",
    "eval_J", "eval_J_ohmic", "evolve_element", "gate_durations", "influence_functional",
    "integrate_oscillatory", "q1_r", "q2_r", "q_fermionic", "split_path", "static_element",
    "toeplitz_quadratic",
]
