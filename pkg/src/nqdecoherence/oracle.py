"""Brute-force phonon mode sums on a finite k-lattice.

Nothing here goes through the frequency integrals of :mod:`decay`; the
bath is a box of volume V with modes k = 2 pi (n1/L1, n2/L2, n3/L3),
0 < |k| < 1/a, and per-mode coupling |g_k|^2 = c1|g|^2 * 2 pi^2 c_L^3 / V.
As the box grows the sums approach the continuum kernels, which makes
this module a ground truth for the quadrature code on toy problems.

The register is placed along a generic direction: qubit n sits at
(n - 1) d u_d and its dots at +-q0 u_q.  Axis-aligned placements make
several of the checked sums vanish identically by mirror symmetry of the
box, which would hide convergence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import coth_factor, is_phonon_bath
from .errors import DomainError, ResourceCapError

DEFAULT_ORIENTATION = (0.37, 0.61)
DEFAULT_MODE_CAP = 6_000_000


def register_axes(orientation=DEFAULT_ORIENTATION):
    """Unit vectors (u_d, u_q) for the chain axis and the dot axis."""
    phi, psi = orientation
    u_d = np.array([math.cos(phi), math.sin(phi), 0.0])
    u_q = np.array([-math.sin(phi) * math.cos(psi), math.cos(phi) * math.cos(psi), math.sin(psi)])
    return u_d, u_q


@dataclass(frozen=True)
class KLattice:
    """Box of phonon modes.

    Parameters
    ----------
    lengths : (L1, L2, L3)
        Box edges.
    a : float
        Short-distance cutoff; modes satisfy |k| < 1/a.
    orientation : (phi, psi)
        Angles fixing the register axes, see :func:`register_axes`.
    mode_cap : int
        Refuse lattices with more (estimated) modes than this.
    modes : array, optional
        Explicit list of k vectors, shape (M, 3); replaces the box
        enumeration (``lengths`` then only sets the volume).
    """

    lengths: tuple
    a: float
    orientation: tuple = DEFAULT_ORIENTATION
    mode_cap: int = DEFAULT_MODE_CAP
    modes: Optional[tuple] = None

    def __post_init__(self):
        lengths = tuple(float(x) for x in self.lengths)
        if len(lengths) != 3 or any(not (x > 0 and math.isfinite(x)) for x in lengths):
            raise DomainError("lengths must be three positive numbers")
        if not self.a > 0:
            raise DomainError("a must be positive")
        object.__setattr__(self, "lengths", lengths)
        if self.modes is not None:
            arr = np.asarray(self.modes, dtype=float).reshape(-1, 3)
            if np.any(np.linalg.norm(arr, axis=1) == 0):
                raise DomainError("k = 0 cannot be a mode")
            object.__setattr__(self, "modes", tuple(map(tuple, arr)))

    @classmethod
    def cube(cls, L, kmax, **kw):
        return cls((L, L, L), 1.0 / kmax, **kw)

    @classmethod
    def from_modes(cls, modes, volume, **kw):
        side = volume ** (1.0 / 3.0)
        return cls((side, side, side), kw.pop("a", 1e-300), modes=modes, **kw)

    @property
    def volume(self) -> float:
        L1, L2, L3 = self.lengths
        return L1 * L2 * L3

    @property
    def kmax(self) -> float:
        return 1.0 / self.a

    def estimated_modes(self) -> int:
        if self.modes is not None:
            return len(self.modes)
        return int(4.0 / 3.0 * math.pi * self.kmax ** 3 * self.volume / (2 * math.pi) ** 3)

    def enumerate(self) -> np.ndarray:
        """All k vectors with 0 < |k| < 1/a, shape (M, 3)."""
        if self.modes is not None:
            return np.array(self.modes, dtype=float)
        est = self.estimated_modes()
        if est > self.mode_cap:
            raise ResourceCapError(f"lattice has about {est} modes, cap is {self.mode_cap}")
        kmax = self.kmax
        steps = [2 * math.pi / L for L in self.lengths]
        n = [int(kmax / s) + 1 for s in steps]
        k2 = steps[1] * np.arange(-n[1], n[1] + 1)
        k3 = steps[2] * np.arange(-n[2], n[2] + 1)
        K2, K3 = np.meshgrid(k2, k3, indexing="ij")
        K2 = K2.ravel()
        K3 = K3.ravel()
        slabs = []
        # one slab of fixed n1 at a time keeps the memory peak small
        for i in range(-n[0], n[0] + 1):
            k1 = steps[0] * i
            kk = k1 * k1 + K2 * K2 + K3 * K3
            keep = (kk > 0) & (kk < kmax * kmax)
            if np.any(keep):
                slabs.append(np.column_stack([np.full(int(keep.sum()), k1), K2[keep], K3[keep]]))
        if not slabs:
            return np.zeros((0, 3))
        return np.concatenate(slabs)


def _fsum(values) -> float:
    return math.fsum(np.asarray(values, dtype=float).ravel())


def dirichlet_ratio(x, n):
    """sin(n x)/sin(x), with its limit where sin(x) vanishes."""
    x = np.asarray(x, dtype=float)
    s = np.sin(x)
    small = np.abs(s) < 1e-12
    safe = np.where(small, 1.0, s)
    return np.where(small, n * np.cos(n * x) / np.cos(x), np.sin(n * x) / safe)


def q_k(omega, tau):
    """int_0^tau ds int_0^s ds' exp(-i w (s - s')) = -i tau/w + (1 - exp(-i w tau))/w^2."""
    omega = np.asarray(omega, dtype=float)
    x = omega * tau
    return -1j * tau / omega + (1.0 - np.exp(-1j * x)) / omega ** 2


def m_k(omega, edges, j, m):
    """Integral of exp(-i w (s - s')) over s in segment j, s' in segment m."""
    e = edges
    return (q_k(omega, e[j + 1] - e[m]) + q_k(omega, e[j] - e[m + 1])
            - q_k(omega, e[j + 1] - e[m + 1]) - q_k(omega, e[j] - e[m]))


class ModeSum:
    """Precomputed per-mode factors of one (lattice, bath, geometry) triple."""

    def __init__(self, lattice: KLattice, bath, geom):
        if not is_phonon_bath(bath):
            raise DomainError("the lattice oracle needs a phonon bath")
        self.lattice = lattice
        self.bath = bath
        self.geom = geom
        k = lattice.enumerate()
        u_d, u_q = register_axes(lattice.orientation)
        self.n_modes = int(k.shape[0])
        self.omega = geom.c_L * np.linalg.norm(k, axis=1)
        self.g2 = (bath.coupling(self.omega) * 2 * math.pi ** 2 * geom.c_L ** 3
                   / lattice.volume)
        self.kd = geom.d * (k @ u_d)
        kq = geom.q0 * (k @ u_q)
        self.sin_kq = np.sin(kq)
        self.cos_kq = np.cos(kq)
        if bath.temperature > 0:
            self.coth = coth_factor(bath.temperature, self.omega)
        else:
            self.coth = np.ones_like(self.omega)

    def q(self, r: int, t: float, which: int) -> float:
        """Lattice version of Q_which^r(t)."""
        w = self.omega
        base = 2.0 * self.g2 / w ** 2 * self.sin_kq ** 2 * np.cos(self.kd * r)
        if which == 2:
            return _fsum(base * (1.0 - np.cos(w * t)) * self.coth)
        if which == 1:
            return _fsum(base * (np.sin(w * t) - w * t))
        raise DomainError(f"which must be 1 or 2, got {which}")

    def psi_phi(self, n: int, t: float):
        """(Psi_n(t), Phi_n), the sums that vanish in the continuum."""
        N = self.geom.n_qubits
        if not 1 <= n <= N:
            raise DomainError(f"n must lie in [1, {N}]")
        w = self.omega
        shape = dirichlet_ratio(0.5 * self.kd, N) * self.sin_kq * self.cos_kq
        a = w * t - self.kd * (n - 0.5)
        psi = _fsum(2.0 * self.g2 / w ** 2 * (-2.0 * np.cos(a + 0.5 * self.kd * N)) * shape)
        b = self.kd * (n - 0.5)
        phi = _fsum(2.0 * self.g2 / w * (-2.0 * np.sin(b - 0.5 * self.kd * N)) * shape)
        return psi, phi

    def _phases(self, vec):
        vec = np.asarray(vec, dtype=float)
        out = np.zeros(self.n_modes, dtype=complex)
        for idx, v in enumerate(vec):
            if v:
                out += v * np.exp(-1j * self.kd * idx)
        return out

    def influence(self, path):
        """(Lambda, X) of a piecewise path from per-mode double time integrals."""
        if path.n_qubits != self.geom.n_qubits:
            raise DomainError("path and geometry disagree on N")
        edges = path.edges
        w = self.omega
        nseg = len(edges) - 1
        s_xi = [self._phases(path.xi[j]) for j in range(nseg)]
        s_chi = [self._phases(path.chi[j]) for j in range(nseg)]
        s_one = self._phases(np.ones(path.n_qubits))
        sin2 = self.sin_kq ** 2
        lam = np.zeros(self.n_modes)
        xph = np.zeros(self.n_modes)
        for j in range(nseg):
            if not np.any(path.xi[j]):
                continue
            # Delta_j^* Delta_m = 4 g^2 sin^2(k q0) conj(S_j) S_m
            # Delta_j^* Sigma_m = 4 i g^2 sin(k q0) conj(S_j) (cos(k q0) S_1 - i sin(k q0) S_chi_m)
            cj = np.conj(s_xi[j])
            sigma_m = lambda m: self.cos_kq * s_one - 1j * self.sin_kq * s_chi[m]
            qj = q_k(w, edges[j + 1] - edges[j])
            lam += np.real(qj * 4.0 * self.g2 * sin2 * np.abs(s_xi[j]) ** 2)
            xph += np.imag(qj * 4j * self.g2 * self.sin_kq * cj * sigma_m(j))
            for m in range(j):
                mk = m_k(w, edges, j, m)
                lam += np.real(4.0 * self.g2 * sin2 * cj * s_xi[m] * mk)
                xph += np.imag(4j * self.g2 * self.sin_kq * cj * sigma_m(m) * mk)
        return _fsum(lam * self.coth), _fsum(xph)


def oracle_q(lattice, bath, geom, r, t, which) -> float:
    return ModeSum(lattice, bath, geom).q(r, t, which)


def oracle_psi_phi(lattice, bath, geom, n, t):
    return ModeSum(lattice, bath, geom).psi_phi(n, t)


def oracle_influence(lattice, bath, geom, path):
    return ModeSum(lattice, bath, geom).influence(path)
