"""Pointwise kernel contracts: values, splits, reciprocity, diagonals."""

import cmath
import math

import numpy as np
import pytest

from zetatrap import kernels as kn
from zetatrap.geometry import circle_curve, jet, star_curve
from zetatrap.specfun import EULER_GAMMA


def test_make_pair_and_coincident_guard():
    curve = circle_curve(1.0)
    pair = kn.make_pair(curve, 0.0, math.pi)
    assert abs(pair.r - 2.0) <= 1e-14
    assert np.allclose(pair.r_vec, [-2.0, 0.0], atol=1e-14)
    same = kn.make_pair(curve, 1.0, 1.0)
    with pytest.raises(kn.CoincidentPointError):
        kn.laplace_slp(same)
    with pytest.raises(kn.CoincidentPointError):
        kn.helmholtz_s(same, kn.helmholtz_constants(2.0))


def test_laplace_slp_value():
    curve = circle_curve(1.0)
    pair = kn.make_pair(curve, 0.0, math.pi / 2)
    assert abs(kn.laplace_slp(pair) - (-math.log(math.sqrt(2.0)))) <= 1e-14


def test_helmholtz_constants():
    c = kn.helmholtz_constants(12.5)
    ref = 0.5j * math.pi - (cmath.log(12.5 / 2) + EULER_GAMMA)
    assert abs(c.c_gamma - ref) <= 1e-15
    c2 = kn.helmholtz_constants(12.5 + 10.0j)
    assert c2.kappa == 12.5 + 10.0j


def test_helmholtz_d_dstar_reciprocity():
    # d*(target, source) uses the target normal, which is the source
    # normal of the reversed pair: d*(s->t) = -d(t->s) ... with the sign
    # convention r_vec = target - source the two agree directly
    curve = star_curve(1.0, 0.3, 5)
    consts = kn.helmholtz_constants(7.3)
    pair = kn.make_pair(curve, 0.4, 2.1)
    rev = kn.make_pair(curve, 2.1, 0.4)
    assert abs(kn.helmholtz_dstar(pair, consts) - kn.helmholtz_d(rev, consts)) <= 1e-13


def test_helmholtz_s_log_split():
    # (i/4) H0(kappa r) + (log r) J0(kappa r)/(2 pi) -> c_gamma/(2 pi)
    curve = circle_curve(1.0)
    consts = kn.helmholtz_constants(12.5)
    vals = []
    for dt in (1e-4, 1e-5):
        pair = kn.make_pair(curve, 1.0, 1.0 + dt)
        s = kn.helmholtz_s(pair, consts)
        smooth = s + math.log(pair.r) * kn.smooth_factor_s(pair, consts, 1.0)
        vals.append(smooth)
    assert abs(vals[-1] - consts.c_gamma / (2 * math.pi)) <= 1e-7


def test_smooth_factors_vanish_on_diagonal():
    curve = circle_curve(1.0)
    consts = kn.helmholtz_constants(5.0)
    pair = kn.make_pair(curve, 0.5, 0.5)
    assert kn.smooth_factor_d(pair, consts, 1.0) == 0.0
    assert kn.smooth_factor_dstar(pair, consts, 1.0) == 0.0


def test_stokes_kernels_structure():
    curve = star_curve(1.0, 0.3, 5)
    pair = kn.make_pair(curve, 0.3, 2.0)
    S, D = kn.stokes_kernels(pair)
    assert np.allclose(S, S.T, atol=1e-15)
    assert np.allclose(D, D.T, atol=1e-15)
    # S = (1/4pi)(-log r I + rhat rhat): eigen-decomposition along r_vec
    rhat = pair.r_vec / pair.r
    along = rhat @ S @ rhat
    assert abs(along - (-math.log(pair.r) + 1.0) / (4 * math.pi)) <= 1e-14
    perp = np.array([-rhat[1], rhat[0]])
    assert abs(perp @ S @ perp - (-math.log(pair.r)) / (4 * math.pi)) <= 1e-14


def test_stokeslet_divergence_free():
    # the single-layer velocity of a point force is divergence free
    curve = circle_curve(1.0)
    f = np.array([0.7, -0.4])
    eps = 1e-6

    def vel(x):
        pair = kn.KernelPair(
            source=jet(curve, 0.0),
            target=jet(curve, 0.0),
            r_vec=x - jet(curve, 0.0).pos,
            r=float(np.hypot(*(x - jet(curve, 0.0).pos))),
        )
        S, _ = kn.stokes_kernels(pair)
        return S @ f

    x0 = np.array([2.1, 1.3])
    div = (vel(x0 + [eps, 0])[0] - vel(x0 - [eps, 0])[0]) / (2 * eps) + (
        vel(x0 + [0, eps])[1] - vel(x0 - [0, eps])[1]
    ) / (2 * eps)
    assert abs(div) <= 1e-8


def test_stokes_diagonals_on_circle():
    a = 2.0
    j = jet(circle_curve(a), 0.7)
    t = j.d1 / j.speed
    Sd = kn.stokes_s_diagonal(j)
    assert np.allclose(Sd, np.outer(t, t) / (4 * math.pi), atol=1e-15)
    Dd = kn.stokes_d_diagonal(j)
    assert np.allclose(Dd, (-1.0 / (2 * a)) * np.outer(t, t) / math.pi, atol=1e-15)
