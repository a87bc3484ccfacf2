"""Reduced density matrix elements of a register with frozen tunnelling.

With no tunnelling every element <l|rho|m> keeps its modulus up to the
decay factors and picks up a phase:

    <l|rho(t)|m> = <l|rho0|m> exp(-i bias) exp(-i X_b) exp(-L_b - L_f)

where L_b = <xi|Q_2|xi>, X_b = <xi|Q_1|chi>, L_f = 2 |l - m|^2 q_2^f and
xi = (l - m)/2, chi = (l + m)/2.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .decay import DecayProfile, e_tilde_factor, toeplitz_quadratic
from .errors import DomainError


@dataclass(frozen=True)
class BasisPair:
    """Two register basis labels l, m in {-1, +1}^N."""

    l: tuple
    m: tuple

    def __post_init__(self):
        l = tuple(int(v) for v in np.asarray(self.l).ravel())
        m = tuple(int(v) for v in np.asarray(self.m).ravel())
        if len(l) != len(m) or not l:
            raise DomainError("l and m must be non-empty and of equal length")
        if any(v not in (-1, 1) for v in l + m):
            raise DomainError("labels must contain only -1 and +1")
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "m", m)

    @property
    def n_qubits(self) -> int:
        return len(self.l)

    @property
    def xi(self) -> np.ndarray:
        return (np.array(self.l) - np.array(self.m)) // 2

    @property
    def chi(self) -> np.ndarray:
        return (np.array(self.l) + np.array(self.m)) // 2

    @property
    def hamming(self) -> int:
        return sum(a != b for a, b in zip(self.l, self.m))

    @property
    def diff_norm_sq(self) -> int:
        """|l - m|^2, i.e. four times the Hamming distance."""
        return 4 * self.hamming

    def swapped(self) -> "BasisPair":
        return BasisPair(self.m, self.l)

    @classmethod
    def most_offdiagonal(cls, n_qubits: int) -> "BasisPair":
        return cls((1,) * n_qubits, (-1,) * n_qubits)


class PiecewiseBias:
    """Piecewise-constant bias energies eps(s, label) in rad/s.

    Parameters
    ----------
    edges : sequence of float
        Start times of the pieces, beginning with 0 and increasing.  The
        last piece extends to infinity.
    levels : sequence of callable
        ``levels[i](label)`` is the bias of a basis label on piece i.
    """

    def __init__(self, edges: Sequence[float], levels: Sequence[Callable]):
        edges = [float(e) for e in edges]
        if not edges or edges[0] != 0.0 or any(b <= a for a, b in zip(edges, edges[1:])):
            raise DomainError("edges must start at 0 and increase strictly")
        if len(levels) != len(edges):
            raise DomainError("need one level function per piece")
        self.edges = edges
        self.levels = list(levels)

    @classmethod
    def constant(cls, level: Callable) -> "PiecewiseBias":
        return cls([0.0], [level])

    def integral(self, label, t: float) -> float:
        """int_0^t eps(s, label) ds."""
        ends = self.edges[1:] + [math.inf]
        parts = []
        for start, end, level in zip(self.edges, ends, self.levels):
            if start >= t:
                break
            parts.append(level(label) * (min(end, t) - start))
        return math.fsum(parts)


def uniform_bias(epsilon: float) -> PiecewiseBias:
    """eps(l) = -epsilon * sum_n l_n for every label."""
    return PiecewiseBias.constant(lambda label: -epsilon * float(sum(label)))


def _bias_phase(pair, bias, t):
    if bias is None:
        return 0.0
    if not isinstance(bias, PiecewiseBias):
        bias = PiecewiseBias.constant(bias)
    return bias.integral(pair.l, t) - bias.integral(pair.m, t)


@dataclass(frozen=True)
class StaticElementResult:
    lambda_b: float
    lambda_f: float
    x_b: float
    bias_phase: float

    @property
    def magnitude_ratio(self) -> float:
        return math.exp(-self.lambda_b - self.lambda_f)


ProfileArg = Union[DecayProfile, Sequence[DecayProfile]]


def _profiles(profile: ProfileArg):
    if isinstance(profile, DecayProfile):
        return [profile]
    return list(profile)


def static_element(pair: BasisPair, profile: ProfileArg, q2_f: float = 0.0,
                   bias=None, t: Optional[float] = None) -> StaticElementResult:
    """Decay exponents and phases of <l|rho(t)|m> with frozen tunnelling.

    Parameters
    ----------
    pair : BasisPair
    profile : DecayProfile or sequence of DecayProfile
        Phonon kernels at time t.  Several profiles (e.g. two coupling
        mechanisms) add up.
    q2_f : float
        Gate-bath kernel q_2^f(t); zero when gates are ignored.
    bias : callable, PiecewiseBias or None
        A callable ``eps(label)`` is read as a time-constant bias.
    t : float, optional
        Defaults to the profile time.
    """
    profs = _profiles(profile)
    if not profs:
        raise DomainError("need at least one profile")
    for p in profs:
        if p.n_qubits != pair.n_qubits:
            raise DomainError(f"profile has N={p.n_qubits}, pair has N={pair.n_qubits}")
    if t is None:
        t = profs[0].t
    phase = _bias_phase(pair, bias, t)
    if pair.l == pair.m:
        return StaticElementResult(0.0, 0.0, 0.0, phase)
    xi, chi = pair.xi, pair.chi
    lambda_b = math.fsum(toeplitz_quadratic(p, 2, xi, xi) for p in profs)
    x_b = math.fsum(toeplitz_quadratic(p, 1, xi, chi) for p in profs)
    lambda_f = 2.0 * pair.diff_norm_sq * q2_f
    return StaticElementResult(lambda_b, lambda_f, x_b, phase)


def evolve_element(rho0_element: complex, result: StaticElementResult) -> complex:
    """Apply the decay and phase factors to an initial element."""
    phase = cmath.exp(-1j * (result.bias_phase + result.x_b))
    return complex(rho0_element) * phase * result.magnitude_ratio


def bounds(pair: BasisPair, profile: DecayProfile, q2_f: float = 0.0,
           rho0_abs: float = 1.0):
    """Lower and upper bounds (b_minus, b_plus) on |<l|rho(t)|m>|.

    b_pm = |rho0| exp[-Q_2^0 |l-m|^2 (1 -/+ e~) / 2] exp[-2 |l-m|^2 q_2^f].
    They bracket the exact modulus whenever e~ < 1.
    """
    if profile.n_qubits != pair.n_qubits:
        raise DomainError(f"profile has N={profile.n_qubits}, pair has N={pair.n_qubits}")
    norm_sq = pair.diff_norm_sq
    if norm_sq == 0:
        return float(rho0_abs), float(rho0_abs)
    et = e_tilde_factor(profile)
    base = 0.5 * profile.q2[0] * norm_sq
    gate = math.exp(-2.0 * norm_sq * q2_f)
    b_minus = rho0_abs * math.exp(-base * (1.0 + et)) * gate
    b_plus = rho0_abs * math.exp(-base * (1.0 - et)) * gate
    return b_minus, b_plus
