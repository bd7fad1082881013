"""Principal-value transform oracles.

Reference values come from scipy.integrate.quad with weight='cauchy'
(an independent adaptive PV rule) and from the classical closed forms
H[T_n/sqrt(1-s^2)] = U_{n-1} and
H[(1+s)^{-1/2-a}(1-s)^{-1/2+a}] = -tan(pi a) * (same weight).
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from halfcontact.grids import QuadGrid, SampledField
from halfcontact.singular import (endpoint_weight, hilbert_line,
                                  hilbert_involution_residual,
                                  hilbert_weight_exact, pbt_residual,
                                  pv_hilbert_callable, weight_mass)


def pv_oracle(fn, x, a=-1.0, b=1.0):
    """H[fn](x) = -(1/pi) pv int fn(s)/(x-s) ds via scipy's cauchy rule."""
    # scipy's cauchy weight is 1/(s - wvar), the opposite sign of our
    # kernel 1/(x - s)
    val, _ = quad(fn, a, b, weight="cauchy", wvar=x, limit=400)
    return val / np.pi


def pv_oracle_weighted(smooth, alpha, x):
    """H[smooth * w_alpha](x) for |x| < 0.85: cauchy rule on the smooth
    middle plus algebraic-weight tails (scipy's plain cauchy rule
    cannot see the endpoint singularities of the weight)."""
    mid = lambda s: smooth(s) * endpoint_weight(alpha, s)
    val, _ = quad(mid, -0.9, 0.9, weight="cauchy", wvar=x, limit=400)
    left, _ = quad(lambda s: smooth(s) * (1 - s) ** (-0.5 + alpha)
                   / (s - x), -1.0, -0.9,
                   weight="alg", wvar=(-0.5 - alpha, 0.0), limit=200)
    right, _ = quad(lambda s: smooth(s) * (1 + s) ** (-0.5 - alpha)
                    / (s - x), 0.9, 1.0,
                    weight="alg", wvar=(0.0, -0.5 + alpha), limit=200)
    return (val + left + right) / np.pi


def _bump(x, center=0.0, width=0.8):
    z = (np.asarray(x, dtype=float) - center) / width
    return np.clip(1.0 - z * z, 0.0, None) ** 3


def test_hilbert_line_vs_quad_oracle_smooth():
    grid = QuadGrid.chebyshev(512)
    field = SampledField(grid=grid, values=_bump(grid.nodes))
    for x in (-0.53, -0.1, 0.22, 0.61):
        ref = pv_oracle(_bump, x)
        got = float(hilbert_line(field, np.array([x]))[0])
        assert got == pytest.approx(ref, abs=5e-9)


def test_hilbert_line_outside_support():
    grid = QuadGrid.chebyshev(512)
    field = SampledField(grid=grid, values=_bump(grid.nodes))
    for x in (-1.4, 1.2, 3.0):
        ref, _ = quad(lambda s: -_bump(s) / (x - s) / np.pi, -1, 1,
                      limit=200)     # no pole: plain integral
        got = float(hilbert_line(field, np.array([x]))[0])
        assert got == pytest.approx(ref, abs=1e-9)


def test_chebyshev_pair_identity():
    # H[T_n / sqrt(1-s^2)] = U_{n-1}
    grid = QuadGrid.chebyshev(1024)
    xs = np.linspace(-0.95, 0.95, 41)
    for n in (1, 2, 5, 8):
        tn = np.polynomial.chebyshev.chebval(grid.nodes, [0] * n + [1])
        field = SampledField(grid=grid,
                             values=tn / np.sqrt(1 - grid.nodes ** 2),
                             singular_exponents=(0.5, 0.5))
        un = np.sin(n * np.arccos(xs)) / np.sin(np.arccos(xs))
        got = hilbert_line(field, xs)
        assert np.max(np.abs(got - un)) < 1e-6


@pytest.mark.parametrize("alpha", [0.0, 0.1, -0.2, 0.24])
def test_weight_transform_sign_and_mass(alpha):
    # H[w_a] = -tan(pi a) w_a, verified against the split PV oracle
    one = lambda s: np.ones_like(np.asarray(s, dtype=float))
    for x in (-0.4, 0.35):
        ref = pv_oracle_weighted(one, alpha, x)
        assert float(hilbert_weight_exact(alpha, np.array([x]))[0]) == \
            pytest.approx(ref, rel=1e-7, abs=1e-9)
        assert ref == pytest.approx(
            -np.tan(np.pi * alpha) * float(endpoint_weight(alpha, x)),
            rel=1e-7, abs=1e-9)
    mass, _ = quad(one, -1, 1, weight="alg",
                   wvar=(-0.5 - alpha, -0.5 + alpha), limit=200)
    assert mass == pytest.approx(weight_mass(alpha), rel=1e-10)


def test_singular_field_transform_factored_rule():
    # smooth multiple of the weight: H picks up the exact transform of
    # the weight plus the transform of the smooth modulation
    alpha = 0.15
    grid = QuadGrid.chebyshev(1024)
    smooth = lambda s: 1.2 + np.sin(2 * s)
    fn = lambda s: smooth(s) * endpoint_weight(alpha, s)
    field = SampledField(grid=grid, values=fn(grid.nodes),
                         singular_exponents=(0.5 + alpha, 0.5 - alpha))
    for x in (-0.62, 0.05, 0.48, 0.82):
        ref = pv_oracle_weighted(smooth, alpha, x)
        got = float(hilbert_line(field, np.array([x]))[0])
        assert got == pytest.approx(ref, abs=1e-7)


def test_pv_hilbert_callable_log_closed_form():
    # H[chi_(-1,1)](x) = -(1/pi) log|(1+x)/(1-x)|
    xs = np.array([-0.7, -0.2, 0.3, 0.8])
    got = pv_hilbert_callable(lambda s: np.ones_like(s), (-1.0, 1.0), xs)
    ref = -np.log((1 + xs) / (1 - xs)) / np.pi
    assert np.max(np.abs(got - ref)) < 1e-10


def test_involution_on_compact_bump():
    grid = QuadGrid.chebyshev(1024)
    field = SampledField(grid=grid, values=_bump(grid.nodes, 0.0, 0.8))
    assert hilbert_involution_residual(field) < 5e-5


def test_poincare_bertrand_residual():
    grid = QuadGrid.chebyshev(1024)
    f1 = SampledField(grid=grid, values=_bump(grid.nodes, -0.1, 0.7))
    f2 = SampledField(grid=grid, values=_bump(grid.nodes, 0.2, 0.6))
    assert pbt_residual(f1, f2) < 5e-5


@settings(max_examples=10, deadline=None)
@given(st.floats(min_value=-0.3, max_value=0.3),
       st.floats(min_value=0.5, max_value=0.75))
def test_involution_property(center, width):
    grid = QuadGrid.chebyshev(512)
    field = SampledField(grid=grid, values=_bump(grid.nodes, center, width))
    assert hilbert_involution_residual(field) < 5e-4
