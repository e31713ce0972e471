"""Adaptive Gauss-Kronrod on normal-weighted integrands."""

import math

import mpmath
import numpy as np
import pytest

from mrct.quadrature import IntegrationError, integrate_1d, integrate_2d
from mrct.stats_core import ndtr, npdf


def test_normal_density_integrates_to_tail_mass():
    res = integrate_1d(npdf, -0.8416)
    assert res.value == pytest.approx(float(mpmath.ncdf(0.8416)), abs=1e-12)
    assert res.error < 1e-10


@pytest.mark.parametrize("a,b", [(0.3, 1.0), (2.0, -0.5), (0.05, 3.2)])
def test_phi_times_density_against_mpmath(a, b):
    lo = -1.2
    res = integrate_1d(lambda x: ndtr(a * x + b) * npdf(x), lo)
    ref = mpmath.quad(lambda x: mpmath.ncdf(a * x + b) * mpmath.npdf(x), [lo, 0, mpmath.inf])
    assert res.value == pytest.approx(float(ref), abs=1e-10)


def test_sharp_integrand_is_refined():
    # near-step integrand: Phi with slope 200
    res = integrate_1d(lambda x: ndtr(200.0 * (x - 0.3)) * npdf(x), -3.0)
    assert res.value == pytest.approx(1.0 - float(mpmath.ncdf(0.3)), abs=5e-6)
    assert res.panels > 4


def test_two_dimensional_product():
    res = integrate_2d(lambda u, v: npdf(u) * npdf(v), -1.0, -0.5)
    ref = float(mpmath.ncdf(1.0) * mpmath.ncdf(0.5))
    assert res.value == pytest.approx(ref, abs=1e-9)


def test_two_dimensional_coupled_against_mpmath():
    def f(u, v):
        return ndtr(0.4 * u + 0.7 * v + 1.0) * npdf(u) * npdf(v)

    res = integrate_2d(f, -0.84, -0.84)
    ref = mpmath.quad(
        lambda u, v: mpmath.ncdf(0.4 * u + 0.7 * v + 1.0) * mpmath.npdf(u) * mpmath.npdf(v),
        [-0.84, 8], [-0.84, 8],
    )
    assert res.value == pytest.approx(float(ref), abs=1e-8)


def test_empty_interval():
    assert integrate_1d(npdf, 9.0).value == 0.0


def test_bad_tolerance():
    with pytest.raises(ValueError):
        integrate_1d(npdf, 0.0, abs_tol=0.0, rel_tol=0.0)


def test_nonconvergence_raises():
    with pytest.raises(IntegrationError):
        integrate_1d(lambda x: np.sign(np.sin(1e4 * x)), 0.0, 1.0, abs_tol=1e-14, max_subdivisions=20)


def test_nonfinite_limits():
    with pytest.raises(ValueError):
        integrate_1d(npdf, -math.inf)
