"""Panelled Gauss-Kronrod quadrature for oscillatory integrals with an
exponential cutoff.

The integrands met in this package are smooth on (0, inf), decay like
exp(-w/omega_c) and oscillate at a handful of known time scales.  The
half line is truncated at ``cutoff_decades * cutoff``, split into panels
no wider than half the shortest oscillation period, and each panel is
integrated with the 7-point Gauss / 15-point Kronrod pair.  Panels whose
error estimate exceeds their fair share of the tolerance are bisected.
Panel results are added with ``math.fsum`` in left-to-right order so the
result does not depend on the refinement history.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import j0

from .errors import ConvergenceError, DomainError

# 15-point Kronrod abscissae on [-1, 1] (non-negative half) and weights,
# with the embedded 7-point Gauss weights (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-node layout, ordered from -1 to 1.
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes (x = xgk[1], xgk[3], ...).
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[7] = _WG[3]
_GAUSS_W[[9, 11, 13]] = _WG[2::-1]


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and limits for :func:`integrate_oscillatory`.

    Parameters
    ----------
    rel_tol, abs_tol : float
        Target error is ``max(abs_tol, rel_tol * |value|)``.
    max_subdivisions : int
        Upper bound on the number of panels.
    cutoff_decades : float
        The integral is truncated at ``cutoff_decades * hints.cutoff``;
        the discarded tail is below ``exp(-cutoff_decades)`` relative.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    max_subdivisions: int = 10_000
    cutoff_decades: float = 40.0

    def __post_init__(self):
        if not self.rel_tol > 0 or not self.abs_tol > 0:
            raise DomainError("rel_tol and abs_tol must be positive")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be an integer >= 1")
        if not self.cutoff_decades >= 10:
            raise DomainError("cutoff_decades must be >= 10")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class OscillationHints:
    """Time scales at which the integrand oscillates, plus its cutoff.

    ``frequencies`` holds the times tau appearing as cos(w*tau) or
    sin(w*tau); each one has period 2*pi/tau in w.
    """

    frequencies: tuple = ()
    cutoff: float = 1.0

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.frequencies)
        if any(not (math.isfinite(f) and f >= 0) for f in freqs):
            raise DomainError("oscillation frequencies must be finite and >= 0")
        if not (self.cutoff > 0 and math.isfinite(self.cutoff)):
            raise DomainError("cutoff must be positive and finite")
        object.__setattr__(self, "frequencies", freqs)


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    n_panels: int

    def __float__(self):
        return self.value


def _gk_panels(f, left, right):
    """Kronrod value and |K - G| error estimate for each panel."""
    center = 0.5 * (left + right)
    half = 0.5 * (right - left)
    x = center[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x), dtype=float)
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape)
    kron = half * (fx @ _KRONROD_W)
    gauss = half * (fx @ _GAUSS_W)
    return kron, np.abs(kron - gauss)


def _adaptive(f, edges, cfg, what):
    left = edges[:-1].astype(float)
    right = edges[1:].astype(float)
    if left.size > cfg.max_subdivisions:
        raise ConvergenceError(
            f"{what}: {left.size} initial panels exceed max_subdivisions={cfg.max_subdivisions}")
    values, errors = _gk_panels(f, left, right)
    if not (np.all(np.isfinite(values))):
        raise ConvergenceError(f"{what}: integrand is not finite on the interval")
    while True:
        order = np.argsort(left, kind="stable")
        total = math.fsum(values[order])
        err = math.fsum(errors[order])
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if err <= tol:
            return QuadResult(total, err, int(left.size))
        bad = errors > tol / left.size
        n_new = left.size + int(bad.sum())
        if n_new > cfg.max_subdivisions:
            raise ConvergenceError(
                f"{what}: tolerance {tol:.3g} not reached within "
                f"{cfg.max_subdivisions} panels (error {err:.3g})",
                value=total, error=err)
        mid = 0.5 * (left[bad] + right[bad])
        new_left = np.concatenate([left[bad], mid])
        new_right = np.concatenate([mid, right[bad]])
        nv, ne = _gk_panels(f, new_left, new_right)
        keep = ~bad
        left = np.concatenate([left[keep], new_left])
        right = np.concatenate([right[keep], new_right])
        values = np.concatenate([values[keep], nv])
        errors = np.concatenate([errors[keep], ne])


def integrate_oscillatory(f: Callable, hints: OscillationHints,
                          cfg: QuadratureConfig = DEFAULT_CONFIG) -> QuadResult:
    """Integrate ``f`` over (0, inf).

    Parameters
    ----------
    f : callable
        Vectorised integrand; receives an array of strictly positive
        frequencies and returns an array of the same shape.  Any
        singularity at w = 0 must be removable, since w = 0 is never
        sampled.
    hints : OscillationHints
    cfg : QuadratureConfig

    Returns
    -------
    QuadResult

    Raises
    ------
    ConvergenceError
        If the tolerance is not met within ``cfg.max_subdivisions``
        panels.  The exception carries the best estimate.
    """
    omega_max = cfg.cutoff_decades * hints.cutoff
    width = 0.5 * hints.cutoff
    fastest = max(hints.frequencies, default=0.0)
    if fastest > 0:
        width = min(width, math.pi / fastest)
    width = max(width, omega_max / cfg.max_subdivisions)
    n = max(1, int(math.ceil(omega_max / width)))
    edges = np.linspace(0.0, omega_max, n + 1)
    return _adaptive(f, edges, cfg, "integrate_oscillatory")


def integrate_interval(f: Callable, a: float, b: float, n_panels: int = 8,
                       cfg: QuadratureConfig = DEFAULT_CONFIG) -> QuadResult:
    """Adaptive Gauss-Kronrod integral of ``f`` over the finite interval [a, b]."""
    if not (math.isfinite(a) and math.isfinite(b)) or b < a:
        raise DomainError("need finite a <= b")
    if a == b:
        return QuadResult(0.0, 0.0, 0)
    edges = np.linspace(a, b, max(1, int(n_panels)) + 1)
    return _adaptive(f, edges, cfg, "integrate_interval")


def bessel_j0(x):
    """Bessel function of the first kind of order zero (scipy.special.j0)."""
    return j0(x)


_ANGULAR_CFG = QuadratureConfig(rel_tol=1e-13, abs_tol=1e-15, max_subdivisions=20_000)


def angular_integral(y: float, z: float, cfg: QuadratureConfig = _ANGULAR_CFG) -> float:
    """int_0^pi sin^2(y cos th) J0(z sin th) sin th dth by quadrature."""

    def integrand(theta):
        return np.sin(y * np.cos(theta)) ** 2 * bessel_j0(z * np.sin(theta)) * np.sin(theta)

    panels = 8 + int(math.ceil(abs(y) + abs(z)))
    return integrate_interval(integrand, 0.0, math.pi, panels, cfg).value


def angular_closed_form(y: float, z: float) -> float:
    """sin(z)/z - sin(s)/s with s = sqrt(z^2 + 4 y^2)."""
    s = math.hypot(z, 2.0 * y)
    return math.sin(z) / z - math.sin(s) / s


def angular_bessel_identity_check(y: float, z: float) -> float:
    """Absolute residual between the angular integral and its closed form."""
    if not z > 0:
        raise DomainError(f"z must be positive, got {z}")
    return abs(angular_integral(y, z) - angular_closed_form(y, z))


def merge_frequencies(*groups: Sequence[float]) -> tuple:
    """Flatten frequency lists, dropping zeros and duplicates (sorted)."""
    out = sorted({float(abs(f)) for g in groups for f in g if f})
    return tuple(out)
