"""Pointwise layer-potential kernels and their local smooth-split factors.

Conventions follow the operator normalizations used throughout the
experiments: the Laplace SLP kernel is the bare -log r, the Helmholtz
kernels carry i/4, and the Stokes S and D carry 1/(4 pi) and 1/pi. The
double-layer kernel d uses the source normal, its adjoint d* the target
normal; r_vec always points from source to target.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .geometry import CurveJet, ParametricCurve, jet
from .specfun import EULER_GAMMA, bessel_j, hankel1

__all__ = [
    "KernelPair",
    "HelmholtzConstants",
    "CoincidentPointError",
    "make_pair",
    "helmholtz_constants",
    "laplace_slp",
    "helmholtz_s",
    "helmholtz_d",
    "helmholtz_dstar",
    "smooth_factor_s",
    "smooth_factor_d",
    "smooth_factor_dstar",
    "stokes_kernels",
    "stokes_s_diagonal",
    "stokes_d_diagonal",
]


class CoincidentPointError(ValueError):
    """Source and target coincide; the corrected rule owns the diagonal."""


@dataclass(frozen=True)
class KernelPair:
    """Source/target jets plus the displacement between them."""

    source: CurveJet
    target: CurveJet
    r_vec: np.ndarray  # target.pos - source.pos
    r: float


@dataclass(frozen=True)
class HelmholtzConstants:
    """Wavenumber kappa and the split constant c_gamma."""

    kappa: complex
    c_gamma: complex


def helmholtz_constants(kappa: complex) -> HelmholtzConstants:
    kappa = complex(kappa)
    c_gamma = 0.5j * math.pi - (cmath.log(kappa / 2) + EULER_GAMMA)
    return HelmholtzConstants(kappa=kappa, c_gamma=c_gamma)


def make_pair(curve: ParametricCurve, t_source: float, t_target: float) -> KernelPair:
    src = jet(curve, t_source)
    tgt = jet(curve, t_target)
    r_vec = tgt.pos - src.pos
    return KernelPair(source=src, target=tgt, r_vec=r_vec, r=float(np.hypot(*r_vec)))


def _require_separated(pair: KernelPair):
    if pair.r == 0.0:
        raise CoincidentPointError(
            "kernel evaluated at r=0; diagonals are handled by the corrected rule"
        )


def laplace_slp(pair: KernelPair) -> float:
    """-log r. Speed factors are applied at assembly time."""
    _require_separated(pair)
    return -math.log(pair.r)


def helmholtz_s(pair: KernelPair, consts: HelmholtzConstants) -> complex:
    """(i/4) H0(kappa r)."""
    _require_separated(pair)
    return 0.25j * hankel1(0, consts.kappa * pair.r)


def helmholtz_d(pair: KernelPair, consts: HelmholtzConstants) -> complex:
    """Source-normal derivative kernel (i kappa/4) H1(kappa r) (r.n_src)/r."""
    _require_separated(pair)
    k = consts.kappa
    rn = float(pair.r_vec @ pair.source.normal)
    return 0.25j * k * hankel1(1, k * pair.r) * rn / pair.r


def helmholtz_dstar(pair: KernelPair, consts: HelmholtzConstants) -> complex:
    """Target-normal derivative kernel -(i kappa/4) H1(kappa r) (r.n_tgt)/r."""
    _require_separated(pair)
    k = consts.kappa
    rn = float(pair.r_vec @ pair.target.normal)
    return -0.25j * k * hankel1(1, k * pair.r) * rn / pair.r


def smooth_factor_s(pair: KernelPair, consts: HelmholtzConstants, taut: float) -> complex:
    """Smooth companion of the -log r split for S: J0(kappa r) taut / (2 pi).

    ``taut`` is the speed-weighted density sample at the source.
    """
    return bessel_j(0, consts.kappa * pair.r) * taut / (2 * math.pi)


def smooth_factor_d(pair: KernelPair, consts: HelmholtzConstants, taut: float) -> complex:
    """Smooth companion for D; vanishes at coincident points."""
    if pair.r == 0.0:
        return 0.0j
    k = consts.kappa
    rn = float(pair.r_vec @ pair.source.normal)
    return k * bessel_j(1, k * pair.r) * rn / (2 * math.pi * pair.r) * taut


def smooth_factor_dstar(
    pair: KernelPair, consts: HelmholtzConstants, taut: float
) -> complex:
    """Smooth companion for D*; vanishes at coincident points."""
    if pair.r == 0.0:
        return 0.0j
    k = consts.kappa
    rn = float(pair.r_vec @ pair.target.normal)
    return -k * bessel_j(1, k * pair.r) * rn / (2 * math.pi * pair.r) * taut


def stokes_kernels(pair: KernelPair):
    """Stokes SLP and DLP 2x2 tensors at separated points.

    S = (1/4pi)(-log r I + rr/r^2), D = (1/pi)((r.n_src)/r^2)(rr/r^2).
    """
    _require_separated(pair)
    r = pair.r
    outer = np.outer(pair.r_vec, pair.r_vec) / (r * r)
    S = (-math.log(r) * np.eye(2) + outer) / (4 * math.pi)
    rn = float(pair.r_vec @ pair.source.normal)
    D = (rn / (r * r)) * outer / math.pi
    return S, D


def stokes_s_diagonal(j: CurveJet) -> np.ndarray:
    """Coincident-point limit of the smooth part of S: (1/4pi) t x t.

    The -log r part of S is handled by the log-corrected rule, never here.
    """
    t = j.d1 / j.speed
    return np.outer(t, t) / (4 * math.pi)


def stokes_d_diagonal(j: CurveJet) -> np.ndarray:
    """Coincident-point limit of D: (1/pi)(-curvature/2) t x t."""
    t = j.d1 / j.speed
    return (-j.curvature / 2) * np.outer(t, t) / math.pi
