"""Corrected-row and Kress-baseline operator contracts."""

import math

import numpy as np
import pytest

from zetatrap import quadrature as quad
from zetatrap.geometry import circle_curve, sample, star_curve
from zetatrap.kernels import helmholtz_constants
from zetatrap.zetaweights import build_log_stencil, build_pow_stencil

STAR = star_curve(1.0, 0.3, 5)


def _grid(curve, N):
    return quad.make_grid(curve.period, N)


def test_make_grid_and_ptr():
    g = quad.make_grid(2 * math.pi, 32)
    assert g.h == 2 * math.pi / 32
    assert len(g.nodes) == 32
    # PTR is exact for low trigonometric modes
    vals = np.cos(3 * g.nodes) ** 2
    assert abs(quad.ptr(vals, g.h) - math.pi) <= 1e-13
    with pytest.raises(quad.GridError):
        quad.make_grid(2 * math.pi, 8)


def test_stencil_grid_compatibility():
    g = quad.make_grid(2 * math.pi, 16)
    with pytest.raises(quad.GridError):
        quad.laplace_slp_matrix(circle_curve(1.0), g, build_log_stencil(8))
    with pytest.raises(quad.GridError):
        quad.laplace_slp_matrix(circle_curve(1.0), g, build_pow_stencil(2, 0.5))


def test_laplace_circle_exactness():
    # SLP of the unit density on a circle of radius R is -2 pi R log R
    for R, ref in ((1.0, 0.0), (2.0, -4 * math.pi * math.log(2.0))):
        curve = circle_curve(R)
        g = _grid(curve, 128)
        A = quad.laplace_slp_matrix(curve, g, build_log_stencil(2))
        vals = A @ np.ones(g.N)
        assert np.max(np.abs(vals - ref)) <= 1e-10


def test_laplace_circle_harmonic_modes():
    # SLP of cos(n theta) on the unit circle is (pi/n) cos(n theta)
    curve = circle_curve(1.0)
    g = _grid(curve, 128)
    A = quad.laplace_slp_matrix(curve, g, build_log_stencil(4))
    for n in (1, 2, 5):
        vals = A @ np.cos(n * g.nodes)
        assert np.max(np.abs(vals - (math.pi / n) * np.cos(n * g.nodes))) <= 1e-10


def test_band_locality():
    # off the correction band the corrected row is the plain PTR row
    K = 3
    g = _grid(STAR, 64)
    data = sample(STAR, g.nodes)
    m = 10
    row = quad.laplace_slp_row(STAR, g, m, build_log_stencil(K), data).weights
    rvec = data.pos[m] - data.pos
    r = np.hypot(rvec[:, 0], rvec[:, 1])
    plain = np.where(r > 0, -np.log(np.where(r > 0, r, 1.0)), 0.0) * data.speed * g.h
    band = {(m + j) % g.N for j in range(-K, K + 1)}
    for n in range(g.N):
        if n not in band:
            assert row[n] == plain[n]


def test_helmholtz_small_kappa_matches_laplace_split():
    # 2 pi S_kappa -> S_laplace + c_gamma * (h speed) as kappa -> 0
    kappa = 1e-4
    consts = helmholtz_constants(kappa)
    g = _grid(STAR, 64)
    st = build_log_stencil(2)
    A_h = quad.helmholtz_matrix(STAR, g, consts, st, "S")
    A_l = quad.laplace_slp_matrix(STAR, g, st)
    data = sample(STAR, g.nodes)
    mass = g.h * data.speed[None, :]
    diff = 2 * math.pi * A_h - A_l - consts.c_gamma * mass
    assert np.max(np.abs(diff)) <= 1e-6


def test_green_identity_circle_high_order():
    # interior plane wave: S[du/dn] - D[u] = u/2 on the boundary
    kappa = 12.5
    consts = helmholtz_constants(kappa)
    curve = circle_curve(1.0)
    g = _grid(curve, 512)
    st = build_log_stencil(7)
    data = sample(curve, g.nodes)
    d = np.array([math.cos(0.3), math.sin(0.3)])
    u = np.exp(1j * kappa * data.pos @ d)
    dudn = 1j * kappa * (data.normal @ d) * u
    S = quad.helmholtz_matrix(curve, g, consts, st, "S")
    D = quad.helmholtz_matrix(curve, g, consts, st, "D")
    resid = S @ dudn - D @ u - 0.5 * u
    assert np.max(np.abs(resid)) <= 1e-8


def test_exactness_transfer_monotone_in_K():
    # higher K gives smaller error against the spectral Kress reference
    kappa = 6.0
    consts = helmholtz_constants(kappa)
    g = _grid(STAR, 128)
    data = sample(STAR, g.nodes)
    f = np.exp(np.sin(g.nodes)) + 0.3 * np.cos(2 * g.nodes)
    ref = quad.kress_helmholtz_operator(STAR, g, consts, "S") @ f
    errs = []
    for K in (0, 2, 4):
        A = quad.helmholtz_matrix(STAR, g, consts, build_log_stencil(K), "S")
        errs.append(np.max(np.abs(A @ f - ref)))
    assert errs[0] > errs[1] > errs[2]


def test_zeta_kress_agreement_high_order():
    kappa = 12.5
    consts = helmholtz_constants(kappa)
    g = _grid(STAR, 512)
    st = build_log_stencil(7)
    f = np.exp(np.sin(g.nodes)) + 1j * np.cos(3 * g.nodes)
    for which in ("S", "D", "Dstar"):
        a = quad.helmholtz_matrix(STAR, g, consts, st, which) @ f
        b = quad.kress_helmholtz_operator(STAR, g, consts, which) @ f
        assert np.max(np.abs(a - b)) <= 1e-11


# --- Kress circulant --------------------------------------------------------


def test_kress_log_matrix_trigonometric_action():
    N = 64
    R = quad.kress_log_matrix(N)
    t = 2 * math.pi * np.arange(N) / N
    assert np.max(np.abs(R @ np.ones(N))) <= 1e-12
    for m in (1, 2, 7, 31):
        out = R @ np.cos(m * t)
        assert np.max(np.abs(out - (-2 * math.pi / m) * np.cos(m * t))) <= 1e-11


def test_kress_log_matrix_requires_even_n():
    with pytest.raises(quad.GridError):
        quad.kress_log_matrix(33)


def test_kress_laplace_matches_corrected_rule():
    g = _grid(STAR, 512)
    f = np.exp(np.cos(g.nodes))
    a = quad.kress_laplace_slp_matrix(STAR, g) @ f
    b = quad.laplace_slp_matrix(STAR, g, build_log_stencil(7)) @ f
    assert np.max(np.abs(a - b)) <= 1e-10


# --- Stokes -----------------------------------------------------------------


def test_stokes_dlp_constant_identity():
    # interior identity: D[c] = -c/2 on the boundary for constant c
    g = _grid(STAR, 256)
    _, D = quad.stokes_matrices(STAR, g, build_log_stencil(3))
    c = np.array([0.8, -0.5])
    tau = np.tile(c, g.N)
    out = (D @ tau).reshape(-1, 2)
    assert np.max(np.abs(out - (-0.5) * c)) <= 1e-12


def test_stokes_rotation_equivariance_on_circle():
    # on a circle the operator commutes with grid rotation: block (m+1, n+1)
    # is the block (m, n) conjugated by the rotation through one spacing
    curve = circle_curve(1.0)
    g = _grid(curve, 32)
    S, D = quad.stokes_matrices(curve, g, build_log_stencil(2))
    c, s = math.cos(g.h), math.sin(g.h)
    Q = np.array([[c, -s], [s, c]])

    def block(A, m, n):
        return A[2 * m : 2 * m + 2, 2 * n : 2 * n + 2]

    for A in (S, D):
        for m, n in ((0, 5), (3, 17), (10, 11)):
            lhs = block(A, (m + 1) % g.N, (n + 1) % g.N)
            rhs = Q @ block(A, m, n) @ Q.T
            assert np.max(np.abs(lhs - rhs)) <= 1e-13
