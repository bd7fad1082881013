"""Oscillating-friction studies: exact tiling, effective coefficients,
and the flat/convex convergence reports at desk scale."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halfcontact.contact import IndentorShape, SolverOptions
from halfcontact.homogenize import (PeriodProfile, effective_coefficient,
                                    effective_physical, homogenize_convex,
                                    homogenize_flat, oscillate)
from halfcontact.homogenize import test_functions as phi_dictionary
from halfcontact.profiles import FrictionProfile, ProfileError

STEP01 = FrictionProfile.from_steps([-1, 0, 1], [0.0, 1.0])
SIN = FrictionProfile.from_callable(
    lambda x: 0.5 + 0.3 * np.sin(np.pi * x), 0.3 * np.pi)


def periodic_ext(p, x):
    return p(((np.asarray(x, dtype=float) + 1.0) % 2.0) - 1.0)


# -- oscillate --------------------------------------------------------------

def test_oscillate_identity_and_validation():
    assert oscillate(STEP01, 1) is STEP01
    with pytest.raises(ValueError):
        oscillate(STEP01, 0)


def test_oscillate_matches_periodic_extension():
    xs = np.linspace(-0.9995, 0.9995, 4003)
    for p in (STEP01, SIN, FrictionProfile.polynomial([0.2, 0.3])):
        for n in (2, 3, 5, 8):
            fn = oscillate(p, n)
            assert np.max(np.abs(fn(xs) - periodic_ext(p, n * xs))) < 1e-12
            assert fn.sup_norm == pytest.approx(p.sup_norm, rel=1e-12)


def test_oscillate_step_spec_example():
    # chi_{x>0} * c at n = 2: the half-period offset makes the pieces
    # run c, 0, c, 0 from the left edge
    p = FrictionProfile.from_steps([-1, 0, 1], [0.0, 0.7])
    f2 = oscillate(p, 2)
    assert len(f2.pieces) == 4
    assert f2.breakpoints == pytest.approx([-1, -0.5, 0, 0.5, 1])
    assert list(f2(np.array([-0.75, -0.25, 0.25, 0.75]))) == \
        pytest.approx([0.7, 0.0, 0.7, 0.0])


def test_oscillate_mean_invariant():
    xs = np.linspace(-1, 1, 200001)
    ref = np.trapezoid(STEP01(xs), xs)
    for n in (2, 3, 8):
        assert np.trapezoid(oscillate(STEP01, n)(xs), xs) == \
            pytest.approx(ref, abs=1e-3)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=9),
       st.floats(min_value=-0.8, max_value=0.8),
       st.floats(min_value=0.0, max_value=1.0),
       st.floats(min_value=0.0, max_value=1.0))
def test_oscillate_tiling_property(n, cut, v1, v2):
    if min(cut + 1.0, 1.0 - cut) < 1e-3:
        return
    p = FrictionProfile.from_steps([-1.0, cut, 1.0], [v1, v2])
    xs = np.linspace(-0.999, 0.999, 1001)
    fn = oscillate(p, n)
    assert np.max(np.abs(fn(xs) - periodic_ext(p, n * xs))) < 1e-12


# -- effective coefficients -------------------------------------------------

def test_effective_coefficient_closed_forms():
    assert effective_coefficient(FrictionProfile.constant(0.6)) == \
        pytest.approx(0.6, abs=1e-14)
    assert effective_coefficient(STEP01) == pytest.approx(np.tan(np.pi / 8),
                                                          abs=1e-13)
    odd = FrictionProfile.polynomial([0.0, 0.7])
    assert abs(effective_coefficient(odd)) < 1e-13


def test_effective_coefficient_shift_invariance():
    shifted = FrictionProfile.from_steps([-1, -0.7, 0.3, 1],
                                         [1.0, 0.0, 1.0])   # STEP01 shifted
    assert effective_coefficient(shifted) == \
        pytest.approx(effective_coefficient(STEP01), abs=1e-12)


def test_jensen_strict_inequality():
    xs = np.linspace(-1, 1, 100001)
    for p in (STEP01, SIN):
        mean = np.trapezoid(p(xs), xs) / 2.0
        assert effective_coefficient(p) < mean - 1e-3


def test_effective_physical():
    assert effective_physical(0.3, FrictionProfile.constant(0.4)) == \
        pytest.approx(0.4, abs=1e-14)
    assert effective_physical(0.0, STEP01) == \
        pytest.approx(2 * np.tan(0.5 * np.arctan(0.5)), abs=1e-13)
    # consistency with the reduced map
    for nu in (0.0, 0.2, 0.45):
        gamma = (1 - 2 * nu) / (2 * (1 - nu))
        lhs = effective_physical(nu, SIN) * gamma
        rhs = effective_coefficient(SIN.scaled(gamma))
        assert lhs == pytest.approx(rhs, abs=1e-12)
    # incompressible limit approaches the plain mean
    assert abs(effective_physical(0.499, STEP01) - 0.5) <= 1e-2
    with pytest.raises(ValueError):
        effective_physical(0.5, STEP01)


def test_period_profile_compatibility():
    assert PeriodProfile(SIN).periodic_compatible
    assert not PeriodProfile(STEP01).periodic_compatible
    assert not PeriodProfile(FrictionProfile.polynomial([0.0, 1.0])
                             ).periodic_compatible


def test_test_function_dictionary():
    phis = phi_dictionary()
    assert set(phis) == {"1", "x", "x^2", "cos(pi x)", "bump"}
    bump = phis["bump"]
    xs = np.linspace(-1, 1, 1001)
    vals = bump(xs)
    assert np.all(vals >= 0)
    assert np.all(vals[np.abs(xs - 0.3) > 0.2] == 0)
    assert bump(np.array([0.3]))[0] == pytest.approx(1.0)


# -- flat study -------------------------------------------------------------

def test_homogenize_flat_constant_degenerate():
    rep = homogenize_flat(1.0, FrictionProfile.constant(0.4), [1, 2, 4])
    assert rep.f_eff == pytest.approx(0.4, abs=1e-13)
    assert np.max(rep.force_errors) < 1e-7
    for gaps in rep.weak_gaps.values():
        assert np.max(gaps) < 1e-7


def test_homogenize_flat_two_valued():
    rep = homogenize_flat(2.0, STEP01, [1, 2, 4, 8, 16])
    assert rep.f_eff == pytest.approx(np.tan(np.pi / 8), abs=1e-12)
    # phi = 1 gap is the exact-mass defect, small for every n
    assert np.max(rep.weak_gaps["1"]) < 1e-6 * 2.0
    # force errors and remaining gaps trend down over the dyadic range
    assert rep.force_errors[-1] < rep.force_errors[2]
    for name in ("x^2", "cos(pi x)"):
        assert rep.weak_gaps[name][-1] < rep.weak_gaps[name][2]
    assert not rep.notes["failures"]
    with pytest.raises(ValueError):
        homogenize_flat(1.0, STEP01, [4, 2])


# -- convex study -----------------------------------------------------------

def test_homogenize_convex_validation():
    g = IndentorShape.parabola(2.0)
    with pytest.raises(ProfileError):
        homogenize_convex(1.0, g, STEP01, [1, 2])      # jumps
    with pytest.raises(ProfileError):
        homogenize_convex(1.0, g, FrictionProfile.polynomial([0.0, 1.0]),
                          [1, 2])                      # seam mismatch


def test_homogenize_convex_small_run():
    g = IndentorShape.parabola(2.0)
    rep = homogenize_convex(1.0, g, SIN, [1, 2, 4],
                            SolverOptions(grid_n=512))
    assert not rep.notes["failures"]
    assert len(rep.intervals) == 3
    # zero total mass of t~ for every n
    assert np.max(rep.notes["mass_residuals"]) < 1e-8
    # t-family gap for phi = 1 is trivially the mass difference
    assert np.max(rep.weak_gaps["t:1"]) < 1e-8
    # forces approach f_eff P
    assert rep.force_errors[-1] < rep.force_errors[0]


def test_homogenize_convex_flat_indentor_matches_flat_study():
    rep_c = homogenize_convex(1.0, IndentorShape.flat(), SIN, [1, 2, 4])
    rep_f = homogenize_flat(1.0, SIN, [1, 2, 4])
    assert rep_c.f_eff == pytest.approx(rep_f.f_eff, abs=1e-13)
    assert np.asarray(rep_c.force_errors) == \
        pytest.approx(np.asarray(rep_f.force_errors), abs=1e-6)
