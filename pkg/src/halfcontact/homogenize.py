"""Oscillating friction profiles and their effective limit.

A period profile p on (-1,1), extended 2-periodically, generates the
oscillating family f_n(x) = p(nx).  As n grows the contact problems
with friction f_n converge to the problem with the constant effective
coefficient

    f_eff = tan( (1/2) int_{-1}^{1} arctan p(x) dx ),

which is the tangent of the *mean of arctan*, not the mean of p.  The
routines here build f_n exactly (per-piece affine composition, no
resampling), evaluate f_eff, and quantify the convergence: total
tangential force against f_eff * P and weak gaps against a fixed
dictionary of test functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad

from .carleman import AccuracyError, t0_weighted_integral, tau
from .contact import (ContactError, IndentorShape, SolverOptions,
                      gamma_coupling, solve_convex)
from .grids import QuadGrid
from .profiles import (ConstantPiece, FrictionProfile, FuncPiece, Piece,
                       PolyPiece, ProfileError)


@dataclass(frozen=True)
class PeriodProfile:
    """One period of a 2-periodic friction coefficient, given on (-1,1)."""

    p: FrictionProfile

    @property
    def periodic_compatible(self) -> bool:
        """Whether the periodic extension is continuous at the seam,
        p(-1) = p(1).  Required for the convex-indentor runs; the flat
        runs tolerate a seam jump (it just becomes one more interior
        jump of f_n)."""
        return abs(self.p.limit_right(-1.0) - self.p.limit_left(1.0)) <= 1e-12


PeriodLike = Union[PeriodProfile, FrictionProfile]


def _as_period(p: PeriodLike) -> PeriodProfile:
    return p if isinstance(p, PeriodProfile) else PeriodProfile(p)


@dataclass
class HomogReport:
    """Convergence record of an oscillation study.

    All per-n arrays are aligned with n_values; entries for an n whose
    solve failed are NaN and the failure is recorded in notes.
    """

    n_values: List[int]
    force_errors: List[float]           # |tangential force + f_eff P| mismatch
    weak_gaps: Dict[str, List[float]]   # per test function
    f_eff: float
    notes: Dict = dataclass_field(default_factory=dict)
    intervals: Optional[List[Tuple[float, float]]] = None


# ---------------------------------------------------------------------------
# Oscillation by exact tiling
# ---------------------------------------------------------------------------

def _compose_affine(piece: Piece, n: int, shift: float) -> Piece:
    """The piece x -> piece(n x + shift)."""
    if isinstance(piece, ConstantPiece):
        return piece
    if isinstance(piece, PolyPiece):
        comp = np.polynomial.polynomial.Polynomial(np.asarray(piece.coeffs))(
            np.polynomial.polynomial.Polynomial([shift, float(n)]))
        return PolyPiece(tuple(comp.coef))
    fn = piece.fn
    return FuncPiece(lambda x, fn=fn, n=n, s=shift: fn(n * np.asarray(x) + s),
                     piece.lipschitz_bound * n)


def oscillate(p: PeriodLike, n: int) -> FrictionProfile:
    """f_n(x) = p(nx) with p extended 2-periodically.

    In the stretched coordinate xi = nx the period cells are
    [-1+2j, 1+2j]; for even n the cells are offset by one half period
    against [-n, n], so the first and last cells enter truncated.
    Every visible piece of p gets an affine-composed descriptor, which
    keeps breakpoints and one-sided limits of f_n exact.
    """
    p = _as_period(p).p
    if n < 1:
        raise ValueError("oscillation count must be >= 1")
    if n == 1:
        return p
    edges = {-float(n), float(n)}
    jmax = (n + 1) // 2
    for j in range(-jmax, jmax + 1):
        for b in p.breakpoints:
            e = float(b) + 2.0 * j
            if -n + 1e-12 < e < n - 1e-12:
                edges.add(e)
    xi = np.array(sorted(edges))
    keep = np.concatenate([[True], np.diff(xi) > 1e-12])
    xi = xi[keep]
    pieces: List[Piece] = []
    for a, b in zip(xi[:-1], xi[1:]):
        mid = 0.5 * (a + b)
        wrapped = ((mid + 1.0) % 2.0) - 1.0
        shift = wrapped - mid                 # even integer
        piece = p.pieces[int(p.piece_index(wrapped))]
        pieces.append(_compose_affine(piece, n, shift))
    bps = xi / n
    bps[0], bps[-1] = -1.0, 1.0
    return FrictionProfile(bps, tuple(pieces))


# ---------------------------------------------------------------------------
# Effective coefficients
# ---------------------------------------------------------------------------

def _mean_arctan(p: FrictionProfile) -> float:
    """(1/2) int_{-1}^{1} arctan p dx, exact on constant pieces and by
    adaptive quadrature elsewhere."""
    total = 0.0
    for lo, hi, piece in zip(p.breakpoints[:-1], p.breakpoints[1:], p.pieces):
        if isinstance(piece, ConstantPiece):
            total += (hi - lo) * np.arctan(piece.value)
        else:
            val, _ = quad(lambda s: float(np.arctan(np.asarray(piece(s)))),
                          float(lo), float(hi),
                          epsabs=1e-14, epsrel=1e-13, limit=200)
            total += val
    return 0.5 * total


def effective_coefficient(p: PeriodLike) -> float:
    """f_eff = tan of the mean of arctan p over one period."""
    return float(np.tan(_mean_arctan(_as_period(p).p)))


def effective_physical(nu: float, pbar: PeriodLike) -> float:
    """Effective *physical* coefficient for Poisson ratio nu.

    The reduced problem sees f = gamma * fbar with
    gamma = (1-2 nu)/(2(1-nu)), so the effective physical coefficient
    is tan(<arctan(gamma pbar)>)/gamma.  As nu -> 1/2 (gamma -> 0) the
    nonlinearity switches off and the value tends to the plain mean
    <pbar>; nu = 1/2 itself is outside the domain.
    """
    gamma = gamma_coupling(nu)
    return effective_coefficient(_as_period(pbar).p.scaled(gamma)) / gamma


# ---------------------------------------------------------------------------
# Weak-convergence dictionary
# ---------------------------------------------------------------------------

def test_functions() -> Dict[str, Callable]:
    """Fixed dictionary for weak-gap reporting: low polynomials, one
    oscillatory function, and a C^2 bump centered at 0.3 of width 0.4."""

    def bump(x):
        z = (np.asarray(x, dtype=float) - 0.3) / 0.2
        return np.clip(1.0 - z * z, 0.0, None) ** 3

    return {
        "1": lambda x: np.ones_like(np.asarray(x, dtype=float)),
        "x": lambda x: np.asarray(x, dtype=float),
        "x^2": lambda x: np.asarray(x, dtype=float) ** 2,
        "cos(pi x)": lambda x: np.cos(np.pi * np.asarray(x, dtype=float)),
        "bump": bump,
    }


def _nan_row(report_lists, gaps):
    report_lists.append(np.nan)
    for seq in gaps.values():
        seq.append(np.nan)


# ---------------------------------------------------------------------------
# Flat indentor study
# ---------------------------------------------------------------------------

def homogenize_flat(P: float, p: PeriodLike,
                    n_list: Sequence[int]) -> HomogReport:
    """Oscillation study for the flat indentor, where t_n = -P t0(f_n)
    in closed form and every integral is a weighted t0 mass.

    force_errors[i] = | int f_n t_n dx + f_eff P |
    weak_gaps[phi][i] = | <t_n - t_eff, phi> |  (so phi = 1 gives the
    exact-mass defect |int t_n + P|, not an asymptotic quantity).

    Quadrature panels follow the breakpoints of f_n, so resolution
    scales with n automatically.
    """
    p = _as_period(p).p
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list[:-1], n_list[1:])):
        raise ValueError("n_list must be strictly increasing")
    f_eff = effective_coefficient(p)
    f_eff_profile = FrictionProfile.constant(f_eff)
    tau_eff = tau(f_eff_profile, QuadGrid.chebyshev(16))
    phis = test_functions()
    eff_mass = {name: float(t0_weighted_integral(f_eff_profile, extra=phi,
                                                 tauf=tau_eff))
                for name, phi in phis.items()}

    force_errors: List[float] = []
    weak_gaps: Dict[str, List[float]] = {name: [] for name in phis}
    notes: Dict = {"failures": [], "mode": "flat"}
    for n in n_list:
        fn = oscillate(p, n)
        try:
            tauf = tau(fn, QuadGrid.chebyshev(16))
            mass_f = float(t0_weighted_integral(fn, extra=fn, tauf=tauf))
            force_errors.append(abs(P * mass_f - f_eff * P))
            for name, phi in phis.items():
                mass_phi = float(t0_weighted_integral(fn, extra=phi,
                                                      tauf=tauf))
                weak_gaps[name].append(P * abs(mass_phi - eff_mass[name]))
        except AccuracyError as exc:
            notes["failures"].append({"n": n, "error": str(exc)})
            _nan_row(force_errors, weak_gaps)
    return HomogReport(n_values=n_list, force_errors=force_errors,
                       weak_gaps=weak_gaps, f_eff=f_eff, notes=notes)


# ---------------------------------------------------------------------------
# Convex indentor study
# ---------------------------------------------------------------------------

def _tilde_weak(sol, grid: QuadGrid, extra_vals: np.ndarray) -> float:
    """int t~ * extra dx.  Node masses pair the bounded unknown rho
    against t0, so the integral never touches the singular samples; the
    degenerate flat-g branch has t~ ~ 0 and plain weights suffice."""
    if "rho" in sol.meta:
        return float(np.dot(sol.meta["node_masses"],
                            sol.meta["rho"] * extra_vals))
    return float(np.dot(grid.plain_weights, sol.t_tilde.values * extra_vals))


def _tangential_force(sol, P: float, fn: FrictionProfile,
                      grid: QuadGrid, tauf) -> float:
    """-int f_n (t~ - P t0) dx; the P t0 part uses the same node masses
    (rho identically P), so the constant state cancels discretely."""
    fvals = fn(grid.nodes)
    if "rho" in sol.meta:
        return -float(np.dot(sol.meta["node_masses"],
                             (sol.meta["rho"] - P) * fvals))
    return P * float(t0_weighted_integral(fn, extra=fn, tauf=tauf))


def homogenize_convex(P: float, g: IndentorShape, p: PeriodLike,
                      n_list: Sequence[int],
                      opts: Optional[SolverOptions] = None) -> HomogReport:
    """Oscillation study for a convex indentor: solve the contact
    problem per n and compare against the constant-f_eff solution.

    weak_gaps carries two families, keyed "t:<phi>" for t~_n vs t~_eff
    and "ft:<phi>" for f_n t~_n vs f_eff t~_eff.  force_errors compares
    the tangential force -int f_n (t~_n - P t0_n) with f_eff P.  Grids
    carry at least 64 nodes per oscillation period.  A solver failure
    at some n is recorded in notes and the run continues.
    """
    pp = _as_period(p)
    if not pp.p.is_lipschitz:
        raise ProfileError("convex-indentor study needs a Lipschitz period")
    if not pp.periodic_compatible:
        raise ProfileError("convex-indentor study needs p(-1) = p(1)")
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list[:-1], n_list[1:])):
        raise ValueError("n_list must be strictly increasing")
    if opts is None:
        opts = SolverOptions()
    f_eff = effective_coefficient(pp)
    f_eff_profile = FrictionProfile.constant(f_eff)
    phis = test_functions()

    grid_n = lambda n: max(512, 64 * n)
    grid_eff = QuadGrid.chebyshev(grid_n(max(n_list)))
    sol_eff = solve_convex(P, f_eff_profile, g, opts, grid=grid_eff)
    eff_weak = {name: _tilde_weak(sol_eff, grid_eff, phi(grid_eff.nodes))
                for name, phi in phis.items()}
    a_eff, b_eff = sol_eff.contact_interval

    force_errors: List[float] = []
    weak_gaps: Dict[str, List[float]] = {}
    for name in phis:
        weak_gaps["t:" + name] = []
        weak_gaps["ft:" + name] = []
    intervals: List[Tuple[float, float]] = []
    notes: Dict = {"failures": [], "mode": "convex",
                   "interval_eff": (a_eff, b_eff),
                   "interval_drift": [], "mass_residuals": [],
                   "cell_eff": np.pi / grid_eff.size}
    hint = None
    for n in n_list:
        fn = oscillate(pp, n)
        grid = QuadGrid.chebyshev(grid_n(n))
        try:
            tauf = tau(fn, QuadGrid.chebyshev(16))
            # continuation in n: a coarse sub-grid cannot resolve f_n
            # for large n, so seed from the previous contact interval
            sol = solve_convex(P, fn, g, opts, grid=grid,
                               interval_hint=hint)
            hint = sol.contact_interval
            fvals = fn(grid.nodes)
            for name, phi in phis.items():
                pv = phi(grid.nodes)
                wt = _tilde_weak(sol, grid, pv)
                weak_gaps["t:" + name].append(abs(wt - eff_weak[name]))
                wft = _tilde_weak(sol, grid, fvals * pv)
                weak_gaps["ft:" + name].append(
                    abs(wft - f_eff * eff_weak[name]))
            force_errors.append(
                abs(_tangential_force(sol, P, fn, grid, tauf) - f_eff * P))
            a_n, b_n = sol.contact_interval
            intervals.append((a_n, b_n))
            notes["interval_drift"].append(
                max(abs(a_n - a_eff), abs(b_n - b_eff)))
            notes["mass_residuals"].append(sol.residuals["mass"])
        except (ContactError, AccuracyError, ProfileError,
                ValueError) as exc:
            notes["failures"].append({"n": n, "error": str(exc)})
            _nan_row(force_errors, weak_gaps)
            intervals.append((np.nan, np.nan))
            notes["interval_drift"].append(np.nan)
            notes["mass_residuals"].append(np.nan)
    return HomogReport(n_values=n_list, force_errors=force_errors,
                       weak_gaps=weak_gaps, f_eff=f_eff, notes=notes,
                       intervals=intervals)
