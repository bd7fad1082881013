"""Oracles for the singular-equation layer.

t0's log structure, unit mass, kernel-element masses, residual
diagnostics, and the nonhomogeneous inversion are checked against
closed forms and scipy adaptive quadrature (an independent rule).
"""

import numpy as np
import pytest
from scipy.integrate import quad

from halfcontact.carleman import (AccuracyError, carleman_residual,
                                  flat_punch_explicit, kernel_basis,
                                  psi_pm_crosscheck, solve_nonhomogeneous,
                                  t0, t0_exponents, t0_weighted_integral, tau)
from halfcontact.grids import QuadGrid, SampledField
from halfcontact.profiles import FrictionProfile, ProfileError

CORPUS = {
    "zero": FrictionProfile.constant(0.0),
    "const03": FrictionProfile.constant(0.3),
    "const1": FrictionProfile.constant(1.0),
    "steps2": FrictionProfile.from_steps([-1, 0, 1], [0.2, 0.8]),
    "steps4": FrictionProfile.from_steps([-1, -0.5, 0.1, 0.6, 1],
                                         [0.1, 0.7, 0.3, 0.9]),
    "down": FrictionProfile.from_steps([-1, 0.2, 1], [0.8, 0.2]),
    "lin": FrictionProfile.polynomial([0.4, 0.3]),
    "quad": FrictionProfile.polynomial([0.2, 0.0, 0.5]),
    "sin": FrictionProfile.from_callable(
        lambda x: 0.5 + 0.3 * np.sin(np.pi * x), 0.3 * np.pi),
    "kink": FrictionProfile.from_callable(
        lambda x: 0.2 + 0.4 * np.abs(x), 0.4, breakpoints=[-1, 0, 1]),
}


def test_tau_constant_closed_form():
    # arctan(c) * chi has transform -(arctan c / pi) log((1+x)/(1-x))
    f = FrictionProfile.constant(0.7)
    tf = tau(f, QuadGrid.chebyshev(64))
    xs = np.array([-0.8, -0.3, 0.2, 0.9])
    ref = -(np.arctan(0.7) / np.pi) * np.log((1 + xs) / (1 - xs))
    assert np.max(np.abs(tf(xs) - ref)) < 1e-12


def test_tau_vs_quad_oracle():
    f = CORPUS["sin"]
    tf = tau(f, QuadGrid.chebyshev(64))
    for x in (-0.6, 0.1, 0.7):
        ref, _ = quad(lambda s: np.arctan(f(s)), -1, 1,
                      weight="cauchy", wvar=x, limit=400)
        assert tf(np.array([x]))[0] == pytest.approx(ref / np.pi, abs=1e-9)


def test_tau_jump_log_coefficients():
    f = CORPUS["steps4"]
    tf = tau(f, QuadGrid.chebyshev(64))
    # H of the step chi_{x > x_i} * delta contributes -(delta/pi) log|x-x_i|
    for xi, fl, fr in f.jumps():
        c = tf.log_coefficient(xi)
        assert c == pytest.approx(-(np.arctan(fr) - np.arctan(fl)) / np.pi,
                                  abs=1e-13)


def test_t0_exponents():
    f = CORPUS["steps2"]
    bm, bp = t0_exponents(f)
    assert bm == pytest.approx(0.5 + np.arctan(0.2) / np.pi)
    assert bp == pytest.approx(0.5 - np.arctan(0.8) / np.pi)


def test_t0_constant_closed_form():
    grid = QuadGrid.chebyshev(512)
    for c in (0.0, 0.3, 1.0):
        f = FrictionProfile.constant(c)
        field = t0(f, grid, check_mass=False)
        a = np.arctan(c) / np.pi
        x = grid.nodes
        exact = (1 + x) ** (-0.5 - a) * (1 - x) ** (-0.5 + a) / (
            np.pi * np.sqrt(1 + c * c))
        assert np.max(np.abs(field.values / exact - 1.0)) < 1e-10


def test_t0_homogeneous_residual_and_positivity():
    grid = QuadGrid.chebyshev(1024)
    for name in ("const03", "lin", "sin", "steps2"):
        f = CORPUS[name]
        field = t0(f, grid, check_mass=False)
        assert np.all(field.values > 0)
        assert carleman_residual(f, field) < 1e-4, name


def test_t0_unit_mass_corpus():
    for name, f in CORPUS.items():
        mass = float(t0_weighted_integral(f))
        assert abs(mass - 1.0) < 1e-6, name


def test_kernel_masses_and_pole_integrals():
    grid = QuadGrid.chebyshev(512)
    f = CORPUS["down"]
    basis = kernel_basis(f, grid)
    assert len(basis.kernel) == 1
    assert basis.kernel_points == pytest.approx([0.2])
    assert abs(basis.kernel_masses[0]) < 1e-6
    assert len(kernel_basis(CORPUS["sin"], grid).kernel) == 0


def test_weighted_integral_vs_quad_oracle():
    # int t0 * phi against scipy quad on the explicit product formula
    f = CORPUS["steps2"]
    a1, a2 = np.arctan(0.2) / np.pi, np.arctan(0.8) / np.pi
    phi = lambda s: np.cos(np.pi * s)

    def t0x(s):
        fa = np.where(s < 0, 0.2, 0.8)
        return (np.abs(s) ** (a1 - a2) * (1 + s) ** (-0.5 - a1)
                * (1 - s) ** (-0.5 + a2)
                / (np.pi * np.sqrt(1 + fa ** 2)))

    ref = 0.0
    for a, b in ((-1, -0.5), (-0.5, 0), (0, 0.5), (0.5, 1)):
        val, _ = quad(lambda s: t0x(s) * phi(s), a, b,
                      limit=400, points=[a, b])
        ref += val
    got = float(t0_weighted_integral(f, extra=phi))
    assert got == pytest.approx(ref, abs=5e-8)


def test_residual_halving_rate_smooth():
    for name in ("const1", "sin", "quad"):
        f = CORPUS[name]
        res = [carleman_residual(f, t0(f, QuadGrid.chebyshev(n),
                                       check_mass=False))
               for n in (512, 1024, 2048)]
        for lo, hi in zip(res[1:], res[:-1]):
            assert hi >= 4.0 * lo or lo < 1e-12, (name, res)


def test_solve_nonhomogeneous_frictionless():
    # f = 0, u'(x) = x: t = (x^2 - 1/2)/sqrt(1-x^2), zero mass
    grid = QuadGrid.chebyshev(1024)
    f = FrictionProfile.constant(0.0)
    up = SampledField(grid=grid, values=grid.nodes.copy())
    sol = solve_nonhomogeneous(f, up)
    x = grid.nodes
    exact = (x ** 2 - 0.5) / np.sqrt(1 - x ** 2)
    err = np.abs(sol.values - exact) * np.sqrt(1 - x ** 2)
    assert np.max(err[np.abs(x) < 0.99]) < 1e-6
    assert carleman_residual(f, sol, rhs=up) < 1e-5


def test_solve_nonhomogeneous_general_residual():
    grid = QuadGrid.chebyshev(1024)
    f = CORPUS["sin"]
    up = SampledField(grid=grid, values=0.5 * grid.nodes)
    sol = solve_nonhomogeneous(f, up)
    assert carleman_residual(f, sol, rhs=up) < 1e-4


def test_flat_punch_explicit_matches_t0():
    grid = QuadGrid.chebyshev(2048)
    f = CORPUS["steps4"]
    explicit = flat_punch_explicit(2.0, f, grid)
    base = t0(f, grid, check_mass=False)
    l1 = float(np.dot(grid.plain_weights,
                      np.abs(explicit.values + 2.0 * base.values)))
    assert l1 < 1e-5 * 2.0


def test_flat_punch_explicit_rejects_nonconstant():
    with pytest.raises(ProfileError):
        flat_punch_explicit(1.0, CORPUS["sin"])
    with pytest.raises(ValueError):
        flat_punch_explicit(-1.0, CORPUS["steps2"])


def test_psi_pm_crosscheck():
    for name in ("const03", "steps2", "sin"):
        assert psi_pm_crosscheck(CORPUS[name],
                                 [0.3 + 0.4j, -0.2 + 1.1j]) < 1e-7, name


def test_accuracy_error_carries_measurement():
    err = AccuracyError("too big", 0.125)
    assert err.measured == 0.125
