"""Constants, register geometry and bath parameter models.

All frequencies are angular (rad/s), lengths in metres, times in seconds
and temperatures in kelvin.  Every type here is an immutable dataclass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .errors import DomainError

PLANCK_EV_S = 4.135667696e-15


@dataclass(frozen=True)
class Units:
    """Thermal unit convention.

    ``hbar_over_kB`` is the product beta*T in s*K, so that
    ``beta(T) = hbar_over_kB / T``.
    """

    hbar_over_kB: float = 7.64e-12

    def beta(self, temperature: float) -> float:
        """Inverse temperature in seconds; ``math.inf`` at T = 0."""
        if temperature < 0 or not math.isfinite(temperature):
            raise DomainError(f"temperature must be finite and >= 0, got {temperature}")
        if temperature == 0:
            return math.inf
        return self.hbar_over_kB / temperature


UNITS = Units()


@dataclass(frozen=True)
class RegisterGeometry:
    """Linear chain of ``n_qubits`` double dots.

    Parameters
    ----------
    n_qubits : int
        Number of qubits N.
    q0 : float
        Half separation of the two dots of one qubit (m).
    d : float
        Distance between neighbouring qubits (m).
    c_L : float
        Longitudinal sound velocity (m/s).
    """

    n_qubits: int
    q0: float
    d: float
    c_L: float

    def __post_init__(self):
        if int(self.n_qubits) != self.n_qubits or self.n_qubits < 1:
            raise DomainError(f"n_qubits must be a positive integer, got {self.n_qubits}")
        for name in ("q0", "d", "c_L"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be positive and finite, got {value}")

    @classmethod
    def from_nm(cls, n_qubits, q0_nm, d_nm, c_L):
        return cls(int(n_qubits), q0_nm * 1e-9, d_nm * 1e-9, float(c_L))

    @property
    def alpha(self) -> float:
        """Qubit size over qubit spacing, 2*q0/d."""
        return 2.0 * self.q0 / self.d

    @property
    def tau_s(self) -> float:
        """Phonon transit time between neighbours, d/c_L."""
        return self.d / self.c_L

    @property
    def omega_q(self) -> float:
        """c_L / (2 q0), equal to 1/(alpha*tau_s)."""
        return self.c_L / (2.0 * self.q0)

    def with_n(self, n_qubits: int) -> "RegisterGeometry":
        return replace(self, n_qubits=int(n_qubits))


def _check_positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value}")


def _check_temperature(value):
    if not (value >= 0 and math.isfinite(value)):
        raise DomainError(f"temperature must be finite and >= 0, got {value}")


@dataclass(frozen=True)
class BathModel:
    """Common base: every bath carries a temperature in kelvin."""

    temperature: float = 0.0

    @property
    def beta(self) -> float:
        return UNITS.beta(self.temperature)

    def with_temperature(self, temperature: float):
        return replace(self, temperature=float(temperature))


@dataclass(frozen=True)
class PiezoBath(BathModel):
    """Piezoelectric phonon coupling, c1|g|^2 = (g/w) exp(-w/omega_c)."""

    g: float = 0.03
    omega_c: float = 5e10

    def __post_init__(self):
        _check_temperature(self.temperature)
        if not (self.g >= 0 and math.isfinite(self.g)):
            raise DomainError(f"g must be >= 0, got {self.g}")
        _check_positive("omega_c", self.omega_c)

    def coupling(self, omega):
        """c1 |g(w/c_L)|^2 as a function of angular frequency."""
        omega = np.asarray(omega, dtype=float)
        return self.g / omega * np.exp(-omega / self.omega_c)


@dataclass(frozen=True)
class DeformationBath(BathModel):
    """Deformation-potential coupling, c1|g|^2 = (w/omega_s^2) exp(-w/omega_c)."""

    omega_s_sq: float = 1e25
    omega_c: float = 5e10

    def __post_init__(self):
        _check_temperature(self.temperature)
        _check_positive("omega_s_sq", self.omega_s_sq)
        _check_positive("omega_c", self.omega_c)

    def coupling(self, omega):
        omega = np.asarray(omega, dtype=float)
        return omega / self.omega_s_sq * np.exp(-omega / self.omega_c)


@dataclass(frozen=True)
class OhmicFermionicBath(BathModel):
    """Electron gas of a gate, equivalent to an ohmic bosonic bath
    J(w) = eta * w * exp(-w/omega_c_f)."""

    eta: float = 9.3e-8
    omega_c_f: float = 1.3e15

    def __post_init__(self):
        _check_temperature(self.temperature)
        if not (self.eta >= 0 and math.isfinite(self.eta)):
            raise DomainError(f"eta must be >= 0, got {self.eta}")
        _check_positive("omega_c_f", self.omega_c_f)

    @classmethod
    def from_gate(cls, E_F_eV, V0_eV, temperature=0.0, omega_c_f=None):
        """Build from the gate Fermi energy and the dot charging energy (eV).

        The cutoff defaults to E_F/h.
        """
        eta = eta_from_gate(E_F_eV, V0_eV)
        if omega_c_f is None:
            omega_c_f = E_F_eV / PLANCK_EV_S
        return cls(temperature=float(temperature), eta=eta, omega_c_f=float(omega_c_f))


PhononBath = Union[PiezoBath, DeformationBath]


def is_phonon_bath(bath) -> bool:
    return isinstance(bath, (PiezoBath, DeformationBath))


def eta_from_gate(E_F, V0):
    """Dimensionless ohmic coupling of a gate with a constant density of states.

    eta = (2/pi^2) * arctan(pi * V0 / E_F)^2.  Only the ratio V0/E_F enters,
    so any common energy unit works.
    """
    if not (E_F > 0 and math.isfinite(E_F)):
        raise DomainError(f"E_F must be positive, got {E_F}")
    if not (V0 >= 0 and math.isfinite(V0)):
        raise DomainError(f"V0 must be >= 0, got {V0}")
    return 2.0 / math.pi**2 * math.atan(math.pi * (V0 / E_F)) ** 2


_COTH_SERIES_BELOW = 1e-4


def coth_factor(temperature, omega, units: Units = UNITS):
    """Thermal weight coth(beta*w/2); identically 1 at zero temperature."""
    omega_arr = np.asarray(omega, dtype=float)
    if np.any(~(omega_arr > 0)):
        raise DomainError("omega must be strictly positive")
    beta = units.beta(temperature)
    if beta == math.inf:
        out = np.ones_like(omega_arr)
    else:
        x = 0.5 * beta * omega_arr
        small = x < _COTH_SERIES_BELOW
        tiny = np.where(small, x, 1.0)
        large = np.where(small, 1.0, x)
        out = np.where(small, 1.0 / tiny + x / 3.0, 1.0 / np.tanh(large))
    if np.ndim(omega) == 0:
        return float(out)
    return out
