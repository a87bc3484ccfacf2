"""Decay and phase kernels Q_2^r(t), Q_1^r(t) and their Toeplitz matrices.

    Q_2^r(t) = int_0^inf J_r(w)/w^2 (1 - cos wt) coth(beta w / 2) dw
    Q_1^r(t) = int_0^inf J_r(w)/w^2 (sin wt - wt) dw

The register matrix Q_m(t) is the symmetric Toeplitz matrix with entries
2 Q_m^{|i-j|}(t).  Gate (fermionic) baths act on each qubit separately
and contribute 8 q^f(t) on the diagonal only.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import toeplitz
from scipy.special import loggamma

from .core import (OhmicFermionicBath, RegisterGeometry, coth_factor,
                   is_phonon_bath)
from .errors import DomainError
from .quadrature import (DEFAULT_CONFIG, OscillationHints, QuadratureConfig,
                         integrate_oscillatory, merge_frequencies)
from .spectral import SpectralFunction

_SMX_SERIES_BELOW = 0.1
_TRUNCATION_RUN = 3


def one_minus_cos(x):
    """1 - cos(x) written as 2 sin^2(x/2)."""
    return 2.0 * np.sin(0.5 * np.asarray(x, dtype=float)) ** 2


def sin_minus_x(x):
    """sin(x) - x with a series branch near zero."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SMX_SERIES_BELOW
    x2 = x * x
    series = -x * x2 * (1.0 / 6 - x2 * (1.0 / 120 - x2 * (1.0 / 5040 - x2 / 362880)))
    return np.where(small, series, np.sin(x) - x)


# ---------------------------------------------------------------------------
# memo cache

_cache: dict = {}
_cache_lock = threading.Lock()


def clear_cache():
    with _cache_lock:
        _cache.clear()


def cache_size() -> int:
    with _cache_lock:
        return len(_cache)


def _cached(key, compute):
    with _cache_lock:
        if key in _cache:
            return _cache[key]
    value = compute()
    with _cache_lock:
        # first writer wins so concurrent callers all see one value
        return _cache.setdefault(key, value)


def _geometry_key(geom: RegisterGeometry):
    # N is left out on purpose: Q_m^r does not depend on it.
    return (geom.q0, geom.d, geom.c_L)


# ---------------------------------------------------------------------------
# phonon kernels

def _check_phonon(bath, geom, r, t):
    if not is_phonon_bath(bath):
        raise DomainError(f"expected a phonon bath, got {type(bath).__name__}")
    if not (t >= 0 and math.isfinite(t)):
        raise DomainError(f"t must be finite and >= 0, got {t}")
    if int(r) != r or r < 0:
        raise DomainError(f"r must be a non-negative integer, got {r}")


def _hints(bath, geom, r, t):
    if r == 0:
        inner = (1.0 / geom.omega_q,)
    else:
        inner = (r * geom.tau_s, math.hypot(r, geom.alpha) * geom.tau_s)
    longest = max(inner)
    return OscillationHints(merge_frequencies(inner, (t, t + longest)), bath.omega_c)


def _spectral(bath, geom, r):
    # Build with an N large enough to admit r; N does not enter J_r.
    return SpectralFunction(bath, geom.with_n(max(geom.n_qubits, int(r) + 1)), r)


def _q2_compute(bath, geom, r, t, cfg):
    s = _spectral(bath, geom, r)
    temperature = bath.temperature

    def integrand(w):
        return s.over_omega_sq(w) * one_minus_cos(w * t) * coth_factor(temperature, w)

    return integrate_oscillatory(integrand, _hints(bath, geom, r, t), cfg).value


def _q1_compute(bath, geom, r, t, cfg):
    s = _spectral(bath, geom, r)

    def integrand(w):
        return s.over_omega_sq(w) * sin_minus_x(w * t)

    return integrate_oscillatory(integrand, _hints(bath, geom, r, t), cfg).value


def q2_r(bath, geom: RegisterGeometry, r: int, t: float,
         cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Decay kernel Q_2^r(t) of a phonon bath (memoised)."""
    _check_phonon(bath, geom, r, t)
    if t == 0:
        return 0.0
    key = ("q2", bath, _geometry_key(geom), cfg, int(r), float(t))
    return _cached(key, lambda: _q2_compute(bath, geom, int(r), t, cfg))


def q1_r(bath, geom: RegisterGeometry, r: int, t: float,
         cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Phase kernel Q_1^r(t) of a phonon bath (memoised).

    Includes the secular part ``-t * q1_secular_rate``; that part cancels
    in the inter-segment kernels of a switching path.
    """
    _check_phonon(bath, geom, r, t)
    if t == 0:
        return 0.0
    # temperature does not enter Q_1
    key = ("q1", bath.with_temperature(0.0), _geometry_key(geom), cfg, int(r), float(t))
    return _cached(key, lambda: _q1_compute(bath, geom, int(r), t, cfg))


def q1_secular_rate(bath, geom: RegisterGeometry, r: int,
                    cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """int_0^inf J_r(w)/w dw, the coefficient of -t in Q_1^r(t)."""
    _check_phonon(bath, geom, r, 0.0)
    s = _spectral(bath, geom, r)
    hints = _hints(bath, geom, r, 0.0)
    return integrate_oscillatory(lambda w: w * s.over_omega_sq(w), hints, cfg).value


def kernel_at(bath, geom, which: int, r: int, tau: float,
              cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Q_which^r at a signed time: Q_2 is extended evenly, Q_1 oddly."""
    if which not in (1, 2):
        raise DomainError(f"which must be 1 or 2, got {which}")
    fn = q2_r if which == 2 else q1_r
    value = fn(bath, geom, r, abs(tau), cfg)
    if which == 1 and tau < 0:
        return -value
    return value


# ---------------------------------------------------------------------------
# fermionic gate bath

def q_fermionic_closed(eta, omega_c_f, temperature, t, which):
    """Closed forms of the ohmic kernels.

    q_1 = eta [arctan(wc t) - wc t] at any temperature,
    q_2 = eta [ln(1 + wc^2 t^2)/2 + 2 (lnG(1 + c) - Re lnG(1 + c + i s))]
    with c = 1/(wc beta), s = t/beta; the bracket vanishes at T = 0.
    """
    if which not in (1, 2):
        raise DomainError(f"which must be 1 or 2, got {which}")
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")
    x = omega_c_f * t
    if which == 1:
        return eta * (math.atan(x) - x)
    value = 0.5 * math.log1p(x * x)
    if temperature > 0:
        beta = OhmicFermionicBath(temperature=temperature).beta
        c = 1.0 / (omega_c_f * beta)
        s = t / beta
        value += 2.0 * (loggamma(1.0 + c).real - loggamma(complex(1.0 + c, s)).real)
    return eta * value


def q_fermionic(eta, omega_c_f, temperature, t, which,
                cfg: QuadratureConfig = DEFAULT_CONFIG, method: str = "auto") -> float:
    """Ohmic kernel q_which^f(t) with J(w) = eta w exp(-w/omega_c_f).

    ``method`` is "quadrature", "closed" or "auto".  "auto" integrates
    numerically unless the oscillation count (omega_c_f * t) would exceed
    the panel budget, in which case the closed form is used.
    """
    if which not in (1, 2):
        raise DomainError(f"which must be 1 or 2, got {which}")
    if not (t >= 0 and math.isfinite(t)):
        raise DomainError(f"t must be finite and >= 0, got {t}")
    if method not in ("auto", "quadrature", "closed"):
        raise DomainError(f"unknown method {method!r}")
    if t == 0:
        return 0.0
    if method == "auto":
        panels_needed = omega_c_f * t * cfg.cutoff_decades / math.pi
        method = "closed" if panels_needed > cfg.max_subdivisions / 2 else "quadrature"
    if method == "closed":
        return q_fermionic_closed(eta, omega_c_f, temperature, t, which)

    def compute():
        hints = OscillationHints((t,), omega_c_f)
        if which == 2:
            def integrand(w):
                return (eta * np.exp(-w / omega_c_f) / w * one_minus_cos(w * t)
                        * coth_factor(temperature, w))
        else:
            def integrand(w):
                return eta * np.exp(-w / omega_c_f) / w * sin_minus_x(w * t)
        return integrate_oscillatory(integrand, hints, cfg).value

    key = ("qf", which, eta, omega_c_f, temperature if which == 2 else 0.0, cfg, float(t))
    return _cached(key, compute)


# ---------------------------------------------------------------------------
# profiles and Toeplitz forms

@dataclass(frozen=True)
class DecayProfile:
    """Kernel values Q_m^r(t) for r = 0..N-1 at one time.

    Entries beyond ``r_max`` were not computed (negligible) and are zero.
    ``matrix(m)`` returns the dense symmetric Toeplitz matrix with
    entries 2 Q_m^{|i-j|}.
    """

    t: float
    q1: np.ndarray
    q2: np.ndarray
    r_max: int
    bath: object = None
    geometry: Optional[RegisterGeometry] = None
    truncated: bool = field(default=False)

    def __post_init__(self):
        q1 = np.array(self.q1, dtype=float)
        q2 = np.array(self.q2, dtype=float)
        if q1.shape != q2.shape or q1.ndim != 1 or q1.size < 1:
            raise DomainError("q1 and q2 must be 1-d arrays of equal length")
        q1.setflags(write=False)
        q2.setflags(write=False)
        object.__setattr__(self, "q1", q1)
        object.__setattr__(self, "q2", q2)

    @property
    def n_qubits(self) -> int:
        return int(self.q2.size)

    def q(self, m: int) -> np.ndarray:
        if m == 1:
            return self.q1
        if m == 2:
            return self.q2
        raise DomainError(f"m must be 1 or 2, got {m}")

    def matrix(self, m: int) -> np.ndarray:
        return toeplitz(2.0 * self.q(m))


def truncation_reached(q1, q2, r, t, tau_s, rel_tol, abs_tol):
    """True if entry r is negligible for the r-truncation rule."""
    if r * tau_s <= t:
        return False
    small2 = abs(q2[r]) < max(rel_tol * abs(q2[0]), abs_tol)
    small1 = abs(q1[r]) < max(rel_tol * abs(q1[0]), abs_tol)
    return small2 and small1


def decay_profile(bath, geom: RegisterGeometry, t: float,
                  cfg: QuadratureConfig = DEFAULT_CONFIG, truncate: bool = True,
                  truncation_tol: Optional[float] = None, r_limit: Optional[int] = None,
                  fermionic_method: str = "auto") -> DecayProfile:
    """Compute Q_1^r(t), Q_2^r(t) for r = 0..N-1.

    With ``truncate`` the loop over r stops once three consecutive entries
    outside the light cone (r tau_s > t) are below ``truncation_tol``
    relative to the r = 0 entry for both kernels.  ``r_limit`` caps r
    explicitly.  For a fermionic bath the profile holds 4 q^f(t) at r = 0,
    so that ``matrix(m)`` is the diagonal 8 q^f(t).
    """
    if not (t >= 0 and math.isfinite(t)):
        raise DomainError(f"t must be finite and >= 0, got {t}")
    n = geom.n_qubits
    q1 = np.zeros(n)
    q2 = np.zeros(n)
    if isinstance(bath, OhmicFermionicBath):
        q1[0] = 4.0 * q_fermionic(bath.eta, bath.omega_c_f, bath.temperature, t, 1, cfg,
                                  fermionic_method)
        q2[0] = 4.0 * q_fermionic(bath.eta, bath.omega_c_f, bath.temperature, t, 2, cfg,
                                  fermionic_method)
        return DecayProfile(t, q1, q2, 0, bath, geom, truncated=n > 1)
    if not is_phonon_bath(bath):
        raise DomainError(f"unsupported bath {type(bath).__name__}")
    tol = cfg.rel_tol if truncation_tol is None else truncation_tol
    top = n - 1 if r_limit is None else min(n - 1, int(r_limit))
    if t == 0:
        return DecayProfile(t, q1, q2, 0, bath, geom, truncated=n > 1)
    run = 0
    r_max = 0
    for r in range(top + 1):
        q2[r] = q2_r(bath, geom, r, t, cfg)
        q1[r] = q1_r(bath, geom, r, t, cfg)
        r_max = r
        if truncate and r > 0:
            if truncation_reached(q1, q2, r, t, geom.tau_s, tol, cfg.abs_tol):
                run += 1
                if run >= _TRUNCATION_RUN:
                    break
            else:
                run = 0
    return DecayProfile(t, q1, q2, r_max, bath, geom, truncated=r_max < n - 1)


def toeplitz_form(q, x, y) -> float:
    """<x| T |y> for the symmetric Toeplitz matrix T_ij = 2 q[|i-j|].

    Only the nonzero leading part of ``q`` is visited, so the cost is
    O(N * r_max).
    """
    q = np.asarray(q, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = q.size
    if x.shape != (n,) or y.shape != (n,):
        raise DomainError(f"vectors must have length {n}, got {x.shape} and {y.shape}")
    nz = np.flatnonzero(q)
    if nz.size == 0:
        return 0.0
    terms = [q[0] * float(np.dot(x, y))]
    for r in range(1, int(nz[-1]) + 1):
        if q[r] == 0.0:
            continue
        terms.append(q[r] * (float(np.dot(x[:-r], y[r:])) + float(np.dot(x[r:], y[:-r]))))
    return 2.0 * math.fsum(terms)


def toeplitz_quadratic(profile: DecayProfile, m: int, x, y) -> float:
    """<x| Q_m(t) |y> for the register matrix held by ``profile``."""
    return toeplitz_form(profile.q(m), x, y)


def e_factor(profile: DecayProfile) -> float:
    """e(t, N) = 2 sum_{r>=1} (1 - r/N) Q_2^r / Q_2^0."""
    q2 = profile.q2
    _require_positive_q20(q2)
    n = q2.size
    r = np.arange(1, n)
    return 2.0 * math.fsum((1.0 - r / n) * q2[1:]) / q2[0]


def e_tilde_factor(profile: DecayProfile) -> float:
    """e~(t, N) = 2 sum_{r>=1} |Q_2^r| / Q_2^0."""
    q2 = profile.q2
    _require_positive_q20(q2)
    return 2.0 * math.fsum(np.abs(q2[1:])) / q2[0]


def _require_positive_q20(q2):
    if not q2[0] > 0:
        raise DomainError("Q_2^0(t) must be positive (t > 0) for the e-factors")
