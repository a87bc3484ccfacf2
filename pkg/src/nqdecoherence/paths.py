"""Influence functional of piecewise-constant double paths.

A double path (forward label zeta_up(s), backward label zeta_down(s)) that
switches at times 0 < t_1 <= ... <= t_p < t is described per segment by
xi = (zeta_up - zeta_down)/2 and chi = (zeta_up + zeta_down)/2.  With the
segment edges e_0 = 0, ..., e_{p+1} = t the decay and phase exponents are

    L = sum_j <xi_j|Q_2(e_{j+1} - e_j)|xi_j> + sum_{j>k} <xi_j|K2_jk|xi_k>
    X = sum_j <xi_j|Q_1(e_{j+1} - e_j)|chi_j> + sum_{j>k} <xi_j|K1_jk|chi_k>

    K_jk = Q(e_{j+1} - e_k) + Q(e_j - e_{k+1}) - Q(e_{j+1} - e_{k+1}) - Q(e_j - e_k)

The linear-in-t part of Q_1 drops out of K1_jk.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .decay import decay_profile, toeplitz_form
from .errors import DomainError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig

Kernel = Callable[[int, float], np.ndarray]


def _as_int_rows(rows, n_expected=None):
    arr = np.array([np.asarray(r, dtype=int).ravel() for r in rows], dtype=int)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise DomainError("need a non-empty list of equal-length vectors")
    if n_expected is not None and arr.shape[1] != n_expected:
        raise DomainError(f"vectors must have length {n_expected}")
    return arr


@dataclass(frozen=True)
class PiecewisePath:
    """Piecewise-constant double path.

    Parameters
    ----------
    t : float
        Total time.
    switch_times : sequence of float
        Interior switch times t_1 <= ... <= t_p inside [0, t].
    xi, chi : sequence of vectors
        One vector per segment (p + 1 of each); ``chi[j]`` is the sojourn
        vector held on segment j.
    strict : bool
        If true, require |xi_n| + |chi_n| = 1 as for a genuine pair of
        basis labels.  Parts of a split path carry zeros and are built
        with ``strict=False``.
    """

    t: float
    switch_times: tuple
    xi: np.ndarray
    chi: np.ndarray
    strict: bool = True

    def __post_init__(self):
        if not (self.t >= 0 and math.isfinite(self.t)):
            raise DomainError(f"t must be finite and >= 0, got {self.t}")
        times = tuple(float(s) for s in self.switch_times)
        if any(b < a for a, b in zip(times, times[1:])):
            raise DomainError("switch times must be sorted")
        if times and (times[0] < 0 or times[-1] > self.t):
            raise DomainError("switch times must lie within [0, t]")
        xi = _as_int_rows(self.xi)
        chi = _as_int_rows(self.chi, xi.shape[1])
        if xi.shape[0] != len(times) + 1 or chi.shape[0] != len(times) + 1:
            raise DomainError(f"need {len(times) + 1} xi and chi vectors for {len(times)} switches")
        if np.any(np.abs(xi) > 1) or np.any(np.abs(chi) > 1):
            raise DomainError("xi and chi entries must be -1, 0 or 1")
        weight = np.abs(xi) + np.abs(chi)
        if self.strict and np.any(weight != 1):
            raise DomainError("|xi_n| + |chi_n| must equal 1 on every segment")
        if np.any(weight > 1):
            raise DomainError("|xi_n| + |chi_n| must not exceed 1")
        xi.setflags(write=False)
        chi.setflags(write=False)
        object.__setattr__(self, "switch_times", times)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "chi", chi)

    @classmethod
    def from_labels(cls, t, switch_times, up, down) -> "PiecewisePath":
        """Build from forward and backward labels in {-1, +1}^N per segment."""
        up = _as_int_rows(up)
        down = _as_int_rows(down, up.shape[1])
        if np.any(np.abs(up) != 1) or np.any(np.abs(down) != 1):
            raise DomainError("labels must contain only -1 and +1")
        return cls(t, tuple(switch_times), (up - down) // 2, (up + down) // 2)

    @classmethod
    def static(cls, t, l, m) -> "PiecewisePath":
        """Path without switches for the element <l|rho|m>."""
        return cls.from_labels(t, (), [l], [m])

    @property
    def n_qubits(self) -> int:
        return int(self.xi.shape[1])

    @property
    def n_switches(self) -> int:
        return len(self.switch_times)

    @property
    def edges(self) -> tuple:
        return (0.0,) + self.switch_times + (float(self.t),)


class ProfileKernel:
    """Kernel backed by the decay module: (m, tau) -> [Q_m^r(tau)]_r.

    Negative tau uses the even (m = 2) and odd (m = 1) extensions.
    Profiles are computed once per |tau| and reused.
    """

    def __init__(self, bath, geom, cfg: QuadratureConfig = DEFAULT_CONFIG, **profile_kw):
        self.bath = bath
        self.geom = geom
        self.cfg = cfg
        self.profile_kw = profile_kw
        self._profiles = {}

    def profile(self, tau):
        tau = abs(float(tau))
        if tau not in self._profiles:
            self._profiles[tau] = decay_profile(self.bath, self.geom, tau, self.cfg,
                                                **self.profile_kw)
        return self._profiles[tau]

    def __call__(self, m: int, tau: float) -> np.ndarray:
        q = self.profile(tau).q(m)
        if m == 1 and tau < 0:
            return -q
        return q


@dataclass(frozen=True)
class InfluenceResult:
    """Decay exponent and phase of a path, split into segment-diagonal and
    inter-segment parts."""

    lambda_diag: float
    lambda_cross: float
    x_diag: float
    x_cross: float

    @property
    def lambda_b(self) -> float:
        return self.lambda_diag + self.lambda_cross

    @property
    def x_b(self) -> float:
        return self.x_diag + self.x_cross

    @property
    def weight(self) -> complex:
        """exp(-i X) exp(-L)."""
        return complex(math.cos(self.x_b), -math.sin(self.x_b)) * math.exp(-self.lambda_b)


def difference_kernel(kernel: Kernel, m: int, edges, j: int, k: int) -> np.ndarray:
    """Toeplitz generator of the inter-segment kernel K_jk for j > k."""
    return (kernel(m, edges[j + 1] - edges[k]) + kernel(m, edges[j] - edges[k + 1])
            - kernel(m, edges[j + 1] - edges[k + 1]) - kernel(m, edges[j] - edges[k]))


def influence_functional(path: PiecewisePath, bath=None, geom=None,
                         cfg: QuadratureConfig = DEFAULT_CONFIG,
                         kernel: Optional[Kernel] = None) -> InfluenceResult:
    """Decay exponent and phase of a piecewise-constant double path.

    Either ``bath`` and ``geom`` or a ready ``kernel`` must be given.
    """
    if kernel is None:
        if bath is None or geom is None:
            raise DomainError("need bath and geometry, or a kernel")
        if geom.n_qubits != path.n_qubits:
            raise DomainError(f"geometry has N={geom.n_qubits}, path has N={path.n_qubits}")
        kernel = ProfileKernel(bath, geom, cfg)
    edges = path.edges
    xi, chi = path.xi, path.chi
    segments = range(len(edges) - 1)
    active = [j for j in segments if np.any(xi[j])]
    lam_diag, x_diag, lam_cross, x_cross = [], [], [], []
    for j in active:
        dt = edges[j + 1] - edges[j]
        lam_diag.append(toeplitz_form(kernel(2, dt), xi[j], xi[j]))
        x_diag.append(toeplitz_form(kernel(1, dt), xi[j], chi[j]))
        for k in range(j):
            if np.any(xi[k]):
                lam_cross.append(toeplitz_form(difference_kernel(kernel, 2, edges, j, k),
                                               xi[j], xi[k]))
            if np.any(chi[k]):
                x_cross.append(toeplitz_form(difference_kernel(kernel, 1, edges, j, k),
                                             xi[j], chi[k]))
    return InfluenceResult(math.fsum(lam_diag), math.fsum(lam_cross),
                           math.fsum(x_diag), math.fsum(x_cross))


@dataclass(frozen=True)
class SplitResult:
    """Trivial / dynamical decomposition of a path and its cross terms."""

    trivial: PiecewisePath
    dynamical: PiecewisePath
    lambda_tr: float
    x_tr: float
    lambda_dy: float
    x_dy: float
    lambda_cross: float
    x_cross: float
    # gate baths are diagonal in the qubit index, so they never couple the parts
    x_f_cross: float = 0.0


def _offdiagonal(q):
    q = np.array(q, dtype=float)
    q[0] = 0.0
    return q


def split_path(path: PiecewisePath, trivial_qubits: Iterable[int], bath=None, geom=None,
               cfg: QuadratureConfig = DEFAULT_CONFIG,
               kernel: Optional[Kernel] = None) -> SplitResult:
    """Split a path into qubits that stay put and qubits that switch.

    Parameters
    ----------
    trivial_qubits : iterable of int
        0-based indices of qubits whose xi and chi are constant in time.

    Returns
    -------
    SplitResult
        ``lambda_tr``, ``x_tr`` use the full-time kernels on the trivial
        part, ``lambda_dy``, ``x_dy`` are the influence functional of the
        dynamical part, and ``lambda_cross``, ``x_cross`` collect the
        terms coupling the two.  ``lambda_tr + lambda_dy + lambda_cross``
        reproduces the exponent of the whole path.
    """
    n = path.n_qubits
    idx = sorted({int(i) for i in trivial_qubits})
    if any(i < 0 or i >= n for i in idx):
        raise DomainError(f"trivial qubit indices must lie in [0, {n})")
    mask = np.zeros(n, dtype=bool)
    mask[idx] = True
    xi, chi = path.xi, path.chi
    if np.any(xi[:, mask] != xi[0, mask]) or np.any(chi[:, mask] != chi[0, mask]):
        raise DomainError("a qubit marked trivial changes along the path")
    if kernel is None:
        if bath is None or geom is None:
            raise DomainError("need bath and geometry, or a kernel")
        kernel = ProfileKernel(bath, geom, cfg)

    xi_tr = np.where(mask, xi[0], 0)
    chi_tr = np.where(mask, chi[0], 0)
    xi_dy = np.where(mask[None, :], 0, xi)
    chi_dy = np.where(mask[None, :], 0, chi)
    times = path.switch_times
    trivial = PiecewisePath(path.t, (), [xi_tr], [chi_tr], strict=False)
    dynamical = PiecewisePath(path.t, times, xi_dy, chi_dy, strict=False)

    t = float(path.t)
    lambda_tr = toeplitz_form(kernel(2, t), xi_tr, xi_tr) if np.any(xi_tr) else 0.0
    x_tr = toeplitz_form(kernel(1, t), xi_tr, chi_tr) if np.any(xi_tr) else 0.0
    dy = influence_functional(dynamical, kernel=kernel)

    edges = path.edges
    lam, xb = [], []
    for j in range(len(edges) - 1):
        lo, hi = edges[j], edges[j + 1]
        if np.any(xi_dy[j]):
            lam.append(toeplitz_form(_offdiagonal(kernel(2, hi) - kernel(2, lo)), xi_dy[j], xi_tr))
            xb.append(toeplitz_form(_offdiagonal(kernel(1, hi) - kernel(1, lo)), xi_dy[j], chi_tr))
        if np.any(xi_tr):
            late = _offdiagonal(kernel(2, t - lo) - kernel(2, t - hi))
            lam.append(toeplitz_form(late, xi_tr, xi_dy[j]))
            late1 = _offdiagonal(kernel(1, t - lo) - kernel(1, t - hi))
            xb.append(toeplitz_form(late1, xi_tr, chi_dy[j]))
    return SplitResult(trivial, dynamical, lambda_tr, x_tr, dy.lambda_b, dy.x_b,
                       math.fsum(lam), math.fsum(xb))


@dataclass(frozen=True)
class GateDurations:
    t_not: float
    t_1: float
    t_2: float
    t_had: float


def gate_durations(delta: float, epsilon: float) -> GateDurations:
    """Pulse lengths of a NOT, the two bias-only phase gates and a Hadamard.

    delta * T_not = pi/2, epsilon * T_1 = 3 pi/4, epsilon * T_2 = 7 pi/8 and
    T_had sqrt(delta^2 + epsilon^2) = pi/2 (a Hadamard needs delta = epsilon).
    """
    if not (delta > 0 and math.isfinite(delta)):
        raise DomainError(f"delta must be positive, got {delta}")
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    return GateDurations(
        t_not=math.pi / (2.0 * delta),
        t_1=3.0 * math.pi / (4.0 * epsilon),
        t_2=7.0 * math.pi / (8.0 * epsilon),
        t_had=math.pi / (2.0 * math.hypot(delta, epsilon)),
    )
