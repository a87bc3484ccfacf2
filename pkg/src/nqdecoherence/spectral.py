"""Distance-resolved spectral functions J_r(w) of the phonon bath.

For two qubits r sites apart the common bath enters through

    J_r(w) = c1 |g|^2 w^2 [sinc(w r tau_s) - sinc(w sqrt(r^2 + alpha^2) tau_s)]

with c1|g|^2 given by the bath model.  ``r = 0`` reduces to
J_0(w) = c1 |g|^2 w^2 [1 - sinc(w / omega_q)].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import OhmicFermionicBath, RegisterGeometry, is_phonon_bath
from .errors import DomainError

_SINC_SERIES_BELOW = 1e-4
_OMS_SERIES_BELOW = 0.1


def sinc(x):
    """Unnormalised sinc, sin(x)/x, with sinc(0) = 1."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SINC_SERIES_BELOW
    safe = np.where(small, 1.0, x)
    out = np.where(small, 1.0 - x * x / 6.0, np.sin(safe) / safe)
    return out if out.ndim else float(out)


def one_minus_sinc(x):
    """1 - sin(x)/x without cancellation for small x."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _OMS_SERIES_BELOW
    safe = np.where(small, 1.0, x)
    x2 = x * x
    series = x2 * (1.0 / 6 - x2 * (1.0 / 120 - x2 * (1.0 / 5040 - x2 * (1.0 / 362880 - x2 / 39916800))))
    out = np.where(small, series, 1.0 - np.sin(safe) / safe)
    return out if out.ndim else float(out)


def sinc_difference(a, b):
    """sinc(a) - sinc(b), computed as (1 - sinc(b)) - (1 - sinc(a))."""
    return one_minus_sinc(b) - one_minus_sinc(a)


@dataclass(frozen=True)
class SpectralFunction:
    """J_r for one phonon bath, geometry and qubit separation.

    ``r`` may be any non-negative real so that the r -> 0 limit can be
    probed; physical separations are integers below ``n_qubits``.
    """

    bath: object
    geometry: RegisterGeometry
    r: float = 0

    def __post_init__(self):
        if isinstance(self.bath, OhmicFermionicBath):
            raise DomainError("the fermionic bath has no r-resolved spectral function; "
                              "use eval_J_ohmic")
        if not is_phonon_bath(self.bath):
            raise DomainError(f"unsupported bath {type(self.bath).__name__}")
        if not (self.r >= 0 and math.isfinite(self.r)):
            raise DomainError(f"r must be >= 0, got {self.r}")
        if self.r >= self.geometry.n_qubits:
            raise DomainError(f"r={self.r} must be below n_qubits={self.geometry.n_qubits}")

    def geometric_factor(self, omega):
        """The bracket sinc(...) - sinc(...) (or 1 - sinc for r = 0)."""
        geom = self.geometry
        if self.r == 0:
            return one_minus_sinc(np.asarray(omega, dtype=float) / geom.omega_q)
        a = np.asarray(omega, dtype=float) * self.r * geom.tau_s
        b = np.asarray(omega, dtype=float) * math.hypot(self.r, geom.alpha) * geom.tau_s
        return sinc_difference(a, b)

    def over_omega_sq(self, omega):
        """J_r(w) / w^2, finite for w > 0."""
        return self.bath.coupling(omega) * self.geometric_factor(omega)

    def __call__(self, omega):
        return eval_J(self, omega)


def eval_J(s: SpectralFunction, omega):
    """Evaluate J_r(w); returns the analytic limit 0 at w = 0."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0) or np.any(~np.isfinite(w)):
        raise DomainError("omega must be finite and >= 0")
    positive = w > 0
    safe = np.where(positive, w, 1.0)
    out = np.where(positive, safe * safe * s.over_omega_sq(safe), 0.0)
    return out if out.ndim else float(out)


def eval_J_ohmic(eta, omega_c_f, omega):
    """Ohmic spectral density eta * w * exp(-w / omega_c_f)."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise DomainError("omega must be >= 0")
    out = eta * w * np.exp(-w / omega_c_f)
    return out if out.ndim else float(out)
