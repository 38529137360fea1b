"""Trapezoidal machinery: PTR, corrected operator rows, Kress baseline.

Row builders return the N quadrature weights that dot directly with
density samples at the grid nodes. Off the correction band the weights
are plain punctured-trapezoidal entries kernel*speed*h; within the band
(cyclic distance <= K from the target) the converged correction weights
are folded in, and the diagonal carries the analytic limit terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .geometry import CurveSamples, ParametricCurve, sample
from .kernels import HelmholtzConstants
from .zetaweights import CorrectionStencil

__all__ = [
    "TrapezoidGrid",
    "OperatorRow",
    "GridError",
    "make_grid",
    "ptr",
    "laplace_slp_row",
    "helmholtz_s_row",
    "helmholtz_d_row",
    "helmholtz_dstar_row",
    "stokes_rows",
    "laplace_slp_matrix",
    "helmholtz_matrix",
    "stokes_matrices",
    "kress_log_matrix",
    "kress_helmholtz_operator",
    "kress_laplace_slp_matrix",
]

MIN_NODES = 16


class GridError(ValueError):
    """Invalid grid or stencil/grid combination."""


@dataclass(frozen=True)
class TrapezoidGrid:
    """Equispaced periodic grid: nodes n*h, n = 0..N-1, h = period/N."""

    N: int
    period: float
    h: float
    nodes: np.ndarray


@dataclass(frozen=True)
class OperatorRow:
    """Quadrature weights for one collocation target."""

    m: int
    weights: np.ndarray


def make_grid(period: float, N: int) -> TrapezoidGrid:
    if N < MIN_NODES:
        raise GridError(f"N={N} below the minimum {MIN_NODES}")
    h = period / N
    return TrapezoidGrid(N=N, period=period, h=h, nodes=h * np.arange(N))


def ptr(samples: np.ndarray, h: float):
    """Periodic trapezoidal rule: h * sum of the samples."""
    return h * np.sum(samples, axis=0)


def _check_stencil(stencil: CorrectionStencil, N: int, kind: str):
    if stencil.kind != kind:
        raise GridError(f"stencil kind {stencil.kind!r}, expected {kind!r}")
    if 2 * stencil.K + 1 >= N:
        raise GridError(f"stencil half-width K={stencil.K} too wide for N={N}")


def _band_indices(m: int, j: int, N: int):
    return (m + j) % N, (m - j) % N


def _row_geometry(data: CurveSamples, m: int):
    """Displacements target - source and distances for row m (diag set to 1)."""
    rvec = data.pos[m] - data.pos
    r = np.hypot(rvec[:, 0], rvec[:, 1])
    r[m] = 1.0
    return rvec, r


def laplace_slp_row(
    curve: ParametricCurve,
    grid: TrapezoidGrid,
    m: int,
    stencil: CorrectionStencil,
    data: CurveSamples | None = None,
) -> OperatorRow:
    """Corrected row for the Laplace SLP with kernel -log r."""
    _check_stencil(stencil, grid.N, "log")
    if data is None:
        data = sample(curve, grid.nodes)
    h = grid.h
    _, r = _row_geometry(data, m)
    w = -np.log(r) * data.speed * h
    sp_m = data.speed[m]
    w[m] = -h * math.log(sp_m * h) * sp_m + 2 * h * stencil.weights[0] * sp_m
    for j in range(1, stencil.K + 1):
        for idx in _band_indices(m, j, grid.N):
            w[idx] += h * stencil.weights[j] * data.speed[idx]
    return OperatorRow(m=m, weights=w)


def helmholtz_s_row(
    curve: ParametricCurve,
    grid: TrapezoidGrid,
    m: int,
    consts: HelmholtzConstants,
    stencil: CorrectionStencil,
    data: CurveSamples | None = None,
) -> OperatorRow:
    """Corrected row for the Helmholtz SLP (i/4) H0(kappa r)."""
    _check_stencil(stencil, grid.N, "log")
    if data is None:
        data = sample(curve, grid.nodes)
    h, k = grid.h, consts.kappa
    _, r = _row_geometry(data, m)
    w = 0.25j * specfun.hankel1_array(0, k * r) * data.speed * h
    sp_m = data.speed[m]
    w[m] = (
        h / (2 * math.pi) * (consts.c_gamma - math.log(sp_m * h)) * sp_m
        + 2 * h * stencil.weights[0] * sp_m / (2 * math.pi)
    )
    for j in range(1, stencil.K + 1):
        for idx in _band_indices(m, j, grid.N):
            smooth = specfun.bessel_j_array(0, k * r[idx]) * data.speed[idx] / (
                2 * math.pi
            )
            w[idx] += h * stencil.weights[j] * smooth
    return OperatorRow(m=m, weights=w)


def _dlp_row(curve, grid, m, consts, stencil, data, adjoint: bool) -> OperatorRow:
    _check_stencil(stencil, grid.N, "log")
    if data is None:
        data = sample(curve, grid.nodes)
    h, k = grid.h, consts.kappa
    rvec, r = _row_geometry(data, m)
    if adjoint:
        rn = rvec @ data.normal[m]
        sign = -1.0
    else:
        rn = np.einsum("ni,ni->n", rvec, data.normal)
        sign = 1.0
    w = sign * 0.25j * k * specfun.hankel1_array(1, k * r) * rn / r * data.speed * h
    sp_m = data.speed[m]
    w[m] = h * data.c0[m] * sp_m
    for j in range(1, stencil.K + 1):
        for idx in _band_indices(m, j, grid.N):
            smooth = (
                sign
                * k
                * specfun.bessel_j_array(1, k * r[idx])
                * rn[idx]
                / (2 * math.pi * r[idx])
                * data.speed[idx]
            )
            w[idx] += h * stencil.weights[j] * smooth
    return OperatorRow(m=m, weights=w)


def helmholtz_d_row(curve, grid, m, consts, stencil, data=None) -> OperatorRow:
    """Corrected row for the Helmholtz DLP (source-normal derivative)."""
    return _dlp_row(curve, grid, m, consts, stencil, data, adjoint=False)


def helmholtz_dstar_row(curve, grid, m, consts, stencil, data=None) -> OperatorRow:
    """Corrected row for the normal derivative of the Helmholtz SLP."""
    return _dlp_row(curve, grid, m, consts, stencil, data, adjoint=True)


def stokes_rows(
    curve: ParametricCurve,
    grid: TrapezoidGrid,
    m: int,
    stencil: CorrectionStencil,
    data: CurveSamples | None = None,
):
    """Corrected 2x2-block rows for the Stokes SLP and DLP.

    Only the -log r I part of S is singular and takes the log correction;
    the rr/r^2 part of S and the whole of D use the plain PTR with their
    analytic coincident limits on the diagonal.
    """
    _check_stencil(stencil, grid.N, "log")
    if data is None:
        data = sample(curve, grid.nodes)
    N, h = grid.N, grid.h
    rvec, r = _row_geometry(data, m)
    outer = np.einsum("ni,nj->nij", rvec, rvec) / (r * r)[:, None, None]
    eye = np.eye(2)
    sw = (data.speed * h)[:, None, None]
    S = (-np.log(r)[:, None, None] * eye + outer) / (4 * math.pi) * sw
    rn = np.einsum("ni,ni->n", rvec, data.normal)
    D = (rn / (r * r))[:, None, None] * outer / math.pi * sw
    sp_m = data.speed[m]
    tt = np.outer(data.tangent[m], data.tangent[m])
    S[m] = (
        (-math.log(sp_m * h) * h + 2 * h * stencil.weights[0]) * sp_m * eye
        + tt * sp_m * h
    ) / (4 * math.pi)
    D[m] = (-data.curvature[m] / 2) * tt / math.pi * sp_m * h
    for j in range(1, stencil.K + 1):
        for idx in _band_indices(m, j, N):
            S[idx] += h * stencil.weights[j] * data.speed[idx] * eye / (4 * math.pi)
    return OperatorRow(m=m, weights=S), OperatorRow(m=m, weights=D)


def laplace_slp_matrix(
    curve: ParametricCurve, grid: TrapezoidGrid, stencil: CorrectionStencil
) -> np.ndarray:
    data = sample(curve, grid.nodes)
    return np.vstack(
        [laplace_slp_row(curve, grid, m, stencil, data).weights for m in range(grid.N)]
    )


def helmholtz_matrix(
    curve: ParametricCurve,
    grid: TrapezoidGrid,
    consts: HelmholtzConstants,
    stencil: CorrectionStencil,
    which: str,
) -> np.ndarray:
    """Dense corrected operator for 'S', 'D', or 'Dstar'."""
    data = sample(curve, grid.nodes)
    row_fn = {
        "S": helmholtz_s_row,
        "D": helmholtz_d_row,
        "Dstar": helmholtz_dstar_row,
    }[which]
    return np.vstack(
        [row_fn(curve, grid, m, consts, stencil, data).weights for m in range(grid.N)]
    )


def stokes_matrices(
    curve: ParametricCurve, grid: TrapezoidGrid, stencil: CorrectionStencil
):
    """Dense 2N x 2N Stokes S and D operators (node-major [u1, u2] blocks)."""
    data = sample(curve, grid.nodes)
    N = grid.N
    S = np.empty((2 * N, 2 * N))
    D = np.empty((2 * N, 2 * N))
    for m in range(N):
        rs, rd = stokes_rows(curve, grid, m, stencil, data)
        S[2 * m : 2 * m + 2] = np.transpose(rs.weights, (1, 0, 2)).reshape(2, 2 * N)
        D[2 * m : 2 * m + 2] = np.transpose(rd.weights, (1, 0, 2)).reshape(2, 2 * N)
    return S, D


# ---------------------------------------------------------------------------
# Kress (Martensen-Kussmaul) spectral baseline
# ---------------------------------------------------------------------------


def kress_log_matrix(N: int) -> np.ndarray:
    """Circulant quadrature matrix for the kernel log(4 sin^2((t-s)/2)).

    Characterized by its action on the trigonometric basis:
    R @ cos(m s) = -(2 pi / m) cos(m t) for 1 <= m <= N/2-1, R @ 1 = 0,
    with the Nyquist mode integrated exactly against the truncated series.
    """
    if N % 2 != 0:
        raise GridError("Kress quadrature requires even N")
    h = 2 * math.pi / N
    d = np.arange(N)
    ms = np.arange(1, N // 2)
    col = np.cos(np.outer(d * h, ms)) @ (1.0 / ms)
    col += np.cos(math.pi * d) / N
    col *= -4 * math.pi / N
    idx = (d[:, None] - d[None, :]) % N
    return col[idx]


def _kress_split_parts(data: CurveSamples, grid: TrapezoidGrid):
    """Pairwise distances and the periodic log factor for the global split."""
    t = grid.nodes
    dt = t[:, None] - t[None, :]
    rvec = data.pos[:, None, :] - data.pos[None, :, :]
    r = np.hypot(rvec[..., 0], rvec[..., 1])
    np.fill_diagonal(r, 1.0)
    logsin = np.log(4 * np.sin(dt / 2) ** 2, where=~np.eye(grid.N, dtype=bool))
    np.fill_diagonal(logsin, 0.0)
    return rvec, r, logsin


def kress_helmholtz_operator(
    curve: ParametricCurve,
    grid: TrapezoidGrid,
    consts: HelmholtzConstants,
    which: str,
) -> np.ndarray:
    """Spectral Kress discretization of the Helmholtz S, D, or D* operator.

    Uses the global split K = K1*log(4 sin^2((t-s)/2)) + K2 with the
    J0/J1 smooth factors as K1; K1 goes through the circulant log rule,
    K2 through the plain PTR with analytic diagonal limits.
    """
    if which not in ("S", "D", "Dstar"):
        raise GridError(f"unknown operator {which!r}")
    data = sample(curve, grid.nodes)
    N, h, k = grid.N, grid.h, consts.kappa
    R = kress_log_matrix(N)
    rvec, r, logsin = _kress_split_parts(data, grid)
    offdiag = ~np.eye(N, dtype=bool)
    if which == "S":
        K1 = -specfun.bessel_j_array(0, k * r) * data.speed[None, :] / (4 * math.pi)
        # r carries a placeholder 1.0 on the diagonal; K1(t,t) uses J0(0) = 1.
        np.fill_diagonal(K1, -data.speed / (4 * math.pi))
        full = 0.25j * specfun.hankel1_array(0, k * np.where(offdiag, r, 1.0))
        K2 = np.where(offdiag, full * data.speed[None, :] - K1 * logsin, 0.0)
        diag = (consts.c_gamma - np.log(data.speed)) * data.speed / (2 * math.pi)
    else:
        if which == "D":
            rn = np.einsum("mni,ni->mn", rvec, data.normal)
            sign = 1.0
        else:
            rn = np.einsum("mni,mi->mn", rvec, data.normal)
            sign = -1.0
        phi = (
            sign
            * k
            * specfun.bessel_j_array(1, k * r)
            * rn
            / (2 * math.pi * r)
            * data.speed[None, :]
        )
        np.fill_diagonal(phi, 0.0)
        K1 = -phi / 2
        full = (
            sign
            * 0.25j
            * k
            * specfun.hankel1_array(1, k * np.where(offdiag, r, 1.0))
            * rn
            / r
        )
        K2 = np.where(offdiag, full * data.speed[None, :] - K1 * logsin, 0.0)
        diag = data.c0 * data.speed
    A = R * K1 + h * K2
    A = A.astype(complex)
    A[np.arange(N), np.arange(N)] += h * diag - h * K2[np.arange(N), np.arange(N)]
    return A


def kress_laplace_slp_matrix(curve: ParametricCurve, grid: TrapezoidGrid) -> np.ndarray:
    """Spectral Kress discretization of the Laplace SLP (reference use)."""
    data = sample(curve, grid.nodes)
    N, h = grid.N, grid.h
    R = kress_log_matrix(N)
    _, r, logsin = _kress_split_parts(data, grid)
    offdiag = ~np.eye(N, dtype=bool)
    K1 = -0.5 * np.ones((N, N)) * data.speed[None, :]
    K2 = np.where(offdiag, -np.log(r) * data.speed[None, :] - K1 * logsin, 0.0)
    A = R * K1 + h * K2
    A[np.arange(N), np.arange(N)] += h * (-np.log(data.speed) * data.speed)
    return A
