"""Constructions around the Carleman equation

    -(1/pi) pv(1/x) * t + f t = u'   on (-1,1):

the positive mass-one solution t0, explicit piecewise-constant
solutions, the finite-dimensional kernel attached to decreasing
friction jumps, and the non-homogeneous inversion formula for
Lipschitz coefficients.

tau := H[arctan f . chi] is evaluated by splitting arctan f into a
globally Lipschitz part vanishing at both endpoints (transformed by
singularity-subtraction quadrature), a piecewise-constant step part
(exact log terms, including the endpoint logs), and a linear ramp with
a closed-form transform.  The log coefficients

    c_i = (arctan f(x_i-) - arctan f(x_i+)) / pi

at interior jumps double as the local algebraic exponents of t0, which
is what the per-panel Gauss-Jacobi integrator uses.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .grids import QuadGrid, SampledField, interpolate_samples
from .profiles import FrictionProfile, ProfileError
from .singular import hilbert_line, pv_hilbert_callable


class AccuracyError(RuntimeError):
    """A postcondition check (mass, residual) exceeded its tolerance."""

    def __init__(self, message: str, measured: float):
        super().__init__(f"{message} (measured {measured:.3e})")
        self.measured = measured


# ---------------------------------------------------------------------------
# tau = H[arctan f . chi]
# ---------------------------------------------------------------------------

def _ramp_hilbert(x):
    """H[(x+1)/2 . chi](x) = 1/pi - ((x+1)/(2 pi)) log((1+x)/(1-x))."""
    x = np.asarray(x, dtype=float)
    return 1.0 / np.pi - (x + 1.0) / (2.0 * np.pi) \
        * np.log((1.0 + x) / (1.0 - x))


@dataclass
class TauField:
    """tau(x) = smooth_part(x) + ramp term + sum c_i log|x - x_i|."""

    profile: FrictionProfile
    grid: QuadGrid
    smooth_part: SampledField
    log_terms: List[Tuple[float, float]]     # includes the +-1 endpoint logs
    ramp_coeff: float
    _smooth_eval: Callable = dataclass_field(repr=False, default=None)

    @property
    def jump_part(self) -> List[Tuple[float, float]]:
        """Interior (x_i, c_i) pairs only."""
        return [(xi, ci) for xi, ci in self.log_terms if abs(xi) < 1.0]

    def log_coefficient(self, xi: float) -> float:
        for xj, cj in self.log_terms:
            if abs(xj - xi) < 1e-13:
                return cj
        return 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xv = np.atleast_1d(x)
        out = np.asarray(self._smooth_eval(xv), dtype=float).copy()
        out += self.ramp_coeff * _ramp_hilbert(xv)
        for xi, ci in self.log_terms:
            out += ci * np.log(np.abs(xv - xi))
        return float(out[0]) if scalar else out


def _step_values(f: FrictionProfile) -> np.ndarray:
    """Per-piece constants s_i making arctan f - s piecewise continuous:
    s_1 = arctan f(-1+), s_{i+1} = s_i + jump of arctan f at x_i."""
    s = [np.arctan(f.limit_right(-1.0))]
    for xi in f.breakpoints[1:-1]:
        s.append(s[-1] + np.arctan(f.limit_right(xi))
                 - np.arctan(f.limit_left(xi)))
    return np.asarray(s)


def tau(f: FrictionProfile, grid: QuadGrid, order: int = 48,
        max_panel: float = 0.25) -> TauField:
    steps = _step_values(f)
    ramp = np.arctan(f.limit_left(1.0)) - steps[-1]

    def lipschitz_part(x):
        x = np.asarray(x, dtype=float)
        idx = f.piece_index(x)
        return np.arctan(f(x)) - steps[idx] - ramp * (x + 1.0) / 2.0

    # log terms of the exact step transform:
    #   H[s_i chi_(x_{i-1},x_i)] = -(s_i/pi)(log|x-x_{i-1}| - log|x-x_i|)
    logs: List[Tuple[float, float]] = [(-1.0, -steps[0] / np.pi)]
    for i, xi in enumerate(f.breakpoints[1:-1]):
        logs.append((float(xi), (steps[i] - steps[i + 1]) / np.pi))
    logs.append((1.0, steps[-1] / np.pi))
    logs = [(xi, ci) for xi, ci in logs if abs(ci) > 1e-15]

    kinks = list(f.breakpoints[1:-1])
    mp = min(max_panel, float(np.min(np.diff(f.breakpoints))))

    def smooth_eval(x):
        return pv_hilbert_callable(lipschitz_part, (-1.0, 1.0), x,
                                   kinks=kinks, order=order, max_panel=mp)

    smooth_vals = np.atleast_1d(smooth_eval(grid.nodes))
    return TauField(profile=f, grid=grid,
                    smooth_part=SampledField(grid=grid, values=smooth_vals),
                    log_terms=logs, ramp_coeff=float(ramp),
                    _smooth_eval=smooth_eval)


# ---------------------------------------------------------------------------
# t0 and its quadrature
# ---------------------------------------------------------------------------

def t0_exponents(f: FrictionProfile) -> Tuple[float, float]:
    bm = 0.5 + np.arctan(f.limit_right(-1.0)) / np.pi
    bp = 0.5 - np.arctan(f.limit_left(1.0)) / np.pi
    return float(bm), float(bp)


def _t0_log_eval(f: FrictionProfile, tauf: TauField, x: np.ndarray):
    x = np.asarray(x, dtype=float)
    return tauf(x) - np.log(np.pi) - 0.5 * np.log1p(-x * x) \
        - 0.5 * np.log1p(f(x) ** 2)


def t0(f: FrictionProfile, grid: QuadGrid, tauf: Optional[TauField] = None,
       check_mass: bool = True, mass_tol: Optional[float] = None
       ) -> SampledField:
    """t0(x) = e^{tau(x)} / (pi sqrt(1-x^2) sqrt(1+f^2)); positive,
    total mass 1 (checked, not normalized)."""
    if tauf is None:
        tauf = tau(f, grid)
    vals = np.exp(_t0_log_eval(f, tauf, grid.nodes))
    out = SampledField(grid=grid, values=vals,
                       singular_exponents=t0_exponents(f))
    out._profile = f
    out._tau = tauf
    out._evaluator = lambda x: np.exp(_t0_log_eval(f, tauf, x))
    out._pole = None
    if check_mass:
        if mass_tol is None:
            mass_tol = 1e-6 * (2048.0 / grid.size) ** 2
            mass_tol = max(mass_tol, 1e-8)
        m = t0_weighted_integral(f, tauf=tauf)
        if abs(m - 1.0) > mass_tol:
            raise AccuracyError("t0 mass deviates from 1", abs(m - 1.0))
    return out


_jacobi_cache = {}


def _jacobi_rule(order: int, pa: float, pb: float):
    key = (order, round(pa, 12), round(pb, 12))
    if key not in _jacobi_cache:
        # scipy convention: weight (1-x)^alpha (1+x)^beta
        _jacobi_cache[key] = roots_jacobi(order, pb, pa)
    return _jacobi_cache[key]


def t0_weighted_integral(f: FrictionProfile,
                         extra: Optional[Callable] = None,
                         pole: Optional[float] = None,
                         tauf: Optional[TauField] = None,
                         order: int = 64,
                         max_panel: float = 0.5,
                         edge_levels: int = 6):
    """int t0(x) extra(x) dx (times 1/(x-pole) when pole is given) by
    per-panel Gauss-Jacobi quadrature.

    Panel-edge exponents come from tau's log structure: -1/2 plus the
    endpoint log coefficients at +-1, c_i at interior jumps, and an
    additional -1 at the pole of a kernel element (where t0 vanishes
    like |x-x_i|^{c_i}, keeping the product integrable).
    """
    if tauf is None:
        tauf = tau(f, QuadGrid.chebyshev(16))
    bm, bp = t0_exponents(f)

    cuts = set(float(b) for b in f.breakpoints)
    if pole is not None:
        cuts.add(float(pole))
    edges = sorted(cuts)
    refined = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        m = max(1, int(np.ceil((b - a) / max_panel)))
        refined.extend(np.linspace(a, b, m + 1)[1:])
    # geometric grading toward +-1: the integrand picks up fractional
    # powers there (from tau's transform) that the edge panel's Jacobi
    # weight does not match; shrinking the edge panel absorbs them
    for _ in range(edge_levels):
        refined.insert(1, 0.5 * (refined[0] + refined[1]))
        refined.insert(-1, 0.5 * (refined[-2] + refined[-1]))
    edges = np.asarray(refined)

    def edge_exponent(e: float) -> float:
        if abs(e + 1.0) < 1e-13:
            p = -bm
        elif abs(e - 1.0) < 1e-13:
            p = -bp
        else:
            p = tauf.log_coefficient(e)
        if pole is not None and abs(e - pole) < 1e-13:
            p -= 1.0
        return p

    total = 0.0 + 0.0j if _is_complex_extra(extra) else 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        pa, pb = edge_exponent(a), edge_exponent(b)
        xi, wi = _jacobi_rule(order, pa, pb)
        h = 0.5 * (b - a)
        x = 0.5 * (a + b) + h * xi
        log_r = _t0_log_eval(f, tauf, x) \
            - pa * np.log(x - a) - pb * np.log(b - x)
        r = np.exp(log_r)
        if pole is not None:
            # the pole edge's exponent already includes the extra -1,
            # so this ratio stays bounded up to the edge
            r = r / (x - pole)
        if extra is not None:
            r = r * extra(x)
        total += h ** (1.0 + pa + pb) * np.dot(wi, r)
    return total


def _is_complex_extra(extra):
    if extra is None:
        return False
    test = extra(np.array([0.1]))
    return np.iscomplexobj(test)


# ---------------------------------------------------------------------------
# Explicit flat-punch solution for piecewise-constant friction
# ---------------------------------------------------------------------------

def flat_punch_explicit(P: float, f: FrictionProfile,
                        grid: Optional[QuadGrid] = None) -> SampledField:
    """t(x) = -P prod_i |x-x_i|^{a_i - a_{i+1}}
              / (pi sqrt(1+f^2) (1+x)^{1/2+a_1} (1-x)^{1/2-a_n}),
    a_i = (1/pi) arctan f_i, for all-constant pieces."""
    if P <= 0:
        raise ValueError("P must be positive")
    if not f.all_constant:
        raise ProfileError("flat_punch_explicit needs all-constant pieces; "
                           "use the t0 path for general profiles")
    if grid is None:
        grid = QuadGrid.chebyshev(2048)
    alphas = np.array([np.arctan(p.value) / np.pi for p in f.pieces])
    inner = f.breakpoints[1:-1]

    def log_abs_t(x):
        x = np.asarray(x, dtype=float)
        idx = f.piece_index(x)
        fa = np.array([p.value for p in f.pieces])[idx]
        out = np.log(P / np.pi) - 0.5 * np.log1p(fa ** 2) \
            - (0.5 + alphas[0]) * np.log1p(x) \
            - (0.5 - alphas[-1]) * np.log1p(-x)
        for i, xi in enumerate(inner):
            out += (alphas[i] - alphas[i + 1]) * np.log(np.abs(x - xi))
        return out

    vals = -np.exp(log_abs_t(grid.nodes))
    bm = 0.5 + alphas[0]
    bp = 0.5 - alphas[-1]
    out = SampledField(grid=grid, values=vals, singular_exponents=(bm, bp))
    out._profile = f
    out._evaluator = lambda x: -np.exp(log_abs_t(x))
    out._pole = None
    return out


# ---------------------------------------------------------------------------
# Kernel basis
# ---------------------------------------------------------------------------

@dataclass
class PressureBasis:
    t0: SampledField
    kernel: List[SampledField]
    kernel_points: List[float]
    kernel_masses: List[float]


def kernel_basis(f: FrictionProfile, grid: QuadGrid,
                 tauf: Optional[TauField] = None) -> PressureBasis:
    """t0 plus one zero-mass element t0(x)/(x-x_i) per decreasing jump
    of f; empty kernel for Lipschitz profiles."""
    if tauf is None:
        tauf = tau(f, grid)
    base = t0(f, grid, tauf=tauf)
    kernel, points, masses = [], [], []
    for xi, _, _ in f.decreasing_jumps():
        vals = base.values / (grid.nodes - xi)
        elem = SampledField(grid=grid, values=vals,
                            singular_exponents=base.singular_exponents)
        elem._profile = f
        elem._tau = tauf
        elem._pole = xi
        elem._t0_field = base
        elem._pole_integral = float(
            t0_weighted_integral(f, pole=xi, tauf=tauf))
        kernel.append(elem)
        points.append(xi)
        masses.append(elem._pole_integral)
    return PressureBasis(t0=base, kernel=kernel, kernel_points=points,
                         kernel_masses=masses)


# ---------------------------------------------------------------------------
# Residual diagnostic
# ---------------------------------------------------------------------------

def _graded_map(breakpoints: np.ndarray, p: int = 4):
    """Monotone C^{p-1} reparametrization of (-1,1) that fixes every
    breakpoint and whose derivative vanishes to order p-1 at the
    interior ones.  Composition with the map turns the algebraic
    cusps of t0-type fields at interior jumps into C^1-or-better
    behavior, restoring the O(N^-2) decay of the sampled transform.
    Near +-1 the map stays affine so endpoint exponents survive."""
    bp = np.asarray(breakpoints, dtype=float)

    def _eval(sigma, want_derivative):
        sigma = np.asarray(sigma, dtype=float)
        idx = np.clip(np.searchsorted(bp, sigma, side="right") - 1,
                      0, len(bp) - 2)
        a, b = bp[idx], bp[idx + 1]
        u = (sigma - a) / (b - a)
        flat_l = idx > 0
        flat_r = idx < len(bp) - 2
        # subinterval shapes: flat at interior edges only
        B = np.where(flat_l & flat_r, _betainc_pp(p, u),
                     np.where(flat_l, u ** p,
                              np.where(flat_r, 1.0 - (1.0 - u) ** p, u)))
        if not want_derivative:
            return a + (b - a) * B
        from scipy.special import beta as beta_fn
        dB = np.where(flat_l & flat_r,
                      u ** (p - 1) * (1.0 - u) ** (p - 1) / beta_fn(p, p),
                      np.where(flat_l, p * u ** (p - 1),
                               np.where(flat_r, p * (1.0 - u) ** (p - 1),
                                        1.0)))
        return dB

    return (lambda s: _eval(s, False)), (lambda s: _eval(s, True))


def _betainc_pp(p: int, u: np.ndarray) -> np.ndarray:
    from scipy.special import betainc
    return betainc(p, p, np.clip(u, 0.0, 1.0))


def _mapped_pv_rows(f: FrictionProfile, evaluator: Callable,
                    exponents: Tuple[float, float], grid: QuadGrid):
    """pv int t(s)/(x_j - s) ds at x_j = psi(sigma_j) for every node
    sigma_j of the grid, through the graded map psi.

    In the mapped variable the kernel splits as a smooth row factor
    B(sigma, sigma_j) = (sigma_j - sigma)/(x_j - psi(sigma)) times the
    Cauchy kernel 1/(sigma_j - sigma); the pole is then removed by the
    same quadratic subtraction and endpoint factoring as in the
    unmapped transform, applied row by row.
    """
    from .singular import (_clip_alpha, endpoint_weight,
                           hilbert_weight_exact, hilbert_xweight_exact)
    # grade only at genuine jumps: a continuous breakpoint (mere kink)
    # is handled better by the unmapped rule than by flattening
    map_pts = np.concatenate([[-1.0], [xi for xi, _, _ in f.jumps()], [1.0]])
    psi, dpsi = _graded_map(map_pts)
    sig = grid.nodes
    wq = grid.plain_weights
    x = psi(sig)
    jac = dpsi(sig)
    tvals = evaluator(x)
    T = tvals * jac

    dsig = sig[None, :] - sig[:, None]          # sigma_k - sigma_j
    dx = psi(sig)[None, :]                      # psi(sigma_k)
    denom = x[:, None] - dx
    np.fill_diagonal(denom, 1.0)
    Bmat = -dsig / denom
    np.fill_diagonal(Bmat, 1.0 / jac)
    V = T[None, :] * Bmat                       # V[j, k]

    bm, bp = exponents
    am = _clip_alpha(bm - 0.5)
    ap = _clip_alpha(0.5 - bp)
    n = grid.size
    idx = np.arange(n)

    total = np.zeros(n)
    for side, alpha in (("left", am), ("right", ap)):
        if side == "left":
            part = V * ((1.0 - sig) / 2.0)[None, :]
            ell = (1.0 - sig) / 2.0
            h_ell = 0.5 * (hilbert_weight_exact(alpha, sig)
                           - hilbert_xweight_exact(alpha, sig))
            end = 0
        else:
            part = V * ((1.0 + sig) / 2.0)[None, :]
            ell = (1.0 + sig) / 2.0
            h_ell = 0.5 * (hilbert_weight_exact(alpha, sig)
                           + hilbert_xweight_exact(alpha, sig))
            end = -1
        ws = endpoint_weight(alpha, sig)
        r = part / ws[None, :]
        r0 = r[:, end]
        rt = r - r0[:, None] * ell[None, :]
        rtx = rt[idx, idx]
        sub = rtx / (1.0 - sig * sig)
        num = rt - sub[:, None] * (1.0 - sig * sig)[None, :]
        diff = sig[:, None] - sig[None, :]
        np.fill_diagonal(diff, 1.0)
        quot = ws[None, :] * num / diff
        # diagonal: -d/dsigma num_j at sigma_j, by a local 3-point rule
        # along the row (errors stay local to the row's own node)
        dnum = _row_point_derivative(sig, num, idx)
        quot[idx, idx] = -ws * dnum
        reg = quot @ wq
        wx = endpoint_weight(alpha, sig)
        h_quad = -(1.0 - sig * sig) * np.tan(np.pi * alpha) * wx \
            - (sig - 2.0 * alpha) / np.cos(np.pi * alpha)
        total += -reg / np.pi + sub * h_quad + r0 * h_ell
    # total[j] = -(1/pi) pv int t(s)/(x_j - s) ds, same convention as
    # hilbert_line
    return x, jac, tvals, total


def _row_point_derivative(sig: np.ndarray, num: np.ndarray,
                          idx: np.ndarray) -> np.ndarray:
    n = len(sig)
    lo = np.clip(idx - 1, 0, n - 1)
    hi = np.clip(idx + 1, 0, n - 1)
    return (num[idx, hi] - num[idx, lo]) / (sig[hi] - sig[lo])


def carleman_residual(f: FrictionProfile, t: SampledField,
                      rhs: Optional[SampledField] = None,
                      guard_factor: float = 2.0) -> float:
    """Weighted interior norm of -(1/pi)pv(1/x)*t + f t - rhs, with
    weight sqrt(1-x^2); nodes within guard_factor/N of an increasing
    jump (or of a kernel pole) are excluded.

    Fields that carry an off-grid evaluator and whose profile has
    interior breakpoints are diagnosed through the graded map (see
    _mapped_pv_rows); everything else uses the sampled transform
    directly.
    """
    grid = t.grid
    n = grid.size
    guard = guard_factor / n

    pole = getattr(t, "_pole", None)
    base = t._t0_field if pole is not None else t
    evaluator = getattr(base, "_evaluator", None)
    mapped = evaluator is not None and len(f.jumps()) > 0

    if mapped:
        x, jac, base_vals, h_base = _mapped_pv_rows(
            f, evaluator, base.singular_exponents, grid)
        weights = grid.plain_weights * jac
    else:
        x = grid.nodes
        base_vals = base.values
        h_base = hilbert_line(base, x)
        weights = grid.plain_weights

    mask = np.ones(n, dtype=bool)
    for xi, _, _ in f.increasing_jumps():
        mask &= np.abs(x - xi) > guard
    if pole is not None:
        mask &= np.abs(x - pole) > guard
        ht = (h_base - t._pole_integral / np.pi) / (x - pole)
        tv = base_vals / (x - pole)
    else:
        ht = h_base
        tv = base_vals

    res = ht[mask] + f(x[mask]) * tv[mask]
    if rhs is not None:
        res = res - np.atleast_1d(rhs(x[mask]))
    w = np.sqrt(1.0 - x[mask] ** 2)
    return float(np.sqrt(np.dot(weights[mask], (w * res) ** 2)))


# ---------------------------------------------------------------------------
# Non-homogeneous inversion (Lipschitz coefficient)
# ---------------------------------------------------------------------------

def solve_nonhomogeneous(f: FrictionProfile, uprime: SampledField,
                         tauf: Optional[TauField] = None,
                         t0_field: Optional[SampledField] = None,
                         check: bool = True,
                         mass_tol: float = 1e-5,
                         residual_tol: float = 1e-3) -> SampledField:
    """Unique zero-mass solution of the Carleman equation with right
    side u':

        t = f u'/(1+f^2)
            + t0 . { pv(1/x) * [ sqrt(1-x^2) e^{-tau} u' / sqrt(1+f^2) ] }.
    """
    if not f.is_lipschitz:
        raise ProfileError("solve_nonhomogeneous needs a Lipschitz profile "
                           "(jumpy profiles have a nontrivial kernel)")
    grid = uprime.grid
    if tauf is None:
        tauf = tau(f, grid)
    if t0_field is None:
        t0_field = t0(f, grid, tauf=tauf, check_mass=False)
    x = grid.nodes
    fx = f(x)
    q = np.sqrt(1.0 - x * x) * np.exp(-tauf(x)) * uprime.values \
        / np.sqrt(1.0 + fx * fx)
    # q vanishes like (1+x)^{bm} and (1-x)^{bp} with the exponents of
    # t0, i.e. its own exponents are their negatives
    bm0, bp0 = t0_exponents(f)
    qf = SampledField(grid=grid, values=q,
                      singular_exponents=(-bm0, -bp0))
    pv_vals = -np.pi * hilbert_line(qf, x)    # pv(1/x) * q = -pi H[q]
    bounded = fx * uprime.values / (1.0 + fx * fx)
    vals = bounded + t0_field.values * pv_vals
    out = SampledField(grid=grid, values=vals,
                       singular_exponents=t0_field.singular_exponents)
    out._profile = f
    out._tau = tauf
    out._pole = None
    out._pv_values = pv_vals

    if check:
        mass = float(np.dot(grid.plain_weights, bounded)) \
            + float(t0_weighted_integral(
                f, extra=lambda s: interpolate_samples(grid, pv_vals, s),
                tauf=tauf))
        out._mass = mass
        if abs(mass) > mass_tol:
            raise AccuracyError("non-homogeneous solution mass not zero",
                                abs(mass))
        resid = carleman_residual(f, out, uprime)
        scale = max(np.max(np.abs(uprime.values)), 1e-30)
        out._residual = resid
        if resid > residual_tol * scale:
            raise AccuracyError("non-homogeneous residual too large", resid)
    return out


# ---------------------------------------------------------------------------
# Upper half-plane crosscheck
# ---------------------------------------------------------------------------

def psi_pm_crosscheck(f: FrictionProfile, z_list: Sequence[complex],
                      tauf: Optional[TauField] = None,
                      order: int = 64, max_panel: float = 0.1) -> float:
    """max_z | (1/pi) int t0(s)/(s-z) ds
              - (e^{phi+(z)} - e^{phi-(z)})/(2 pi) |
    with phi+-(z) = (1/pi) int (+-pi/2 + arctan f(s))/(s-z) ds."""
    for z in z_list:
        if complex(z).imag < 0.01:
            raise ValueError("crosscheck points need Im z >= 0.01")
    if tauf is None:
        tauf = tau(f, QuadGrid.chebyshev(16))
    xi, wi = roots_legendre(order)

    worst = 0.0
    panels = []
    for a, b in zip(f.breakpoints[:-1], f.breakpoints[1:]):
        m = max(1, int(np.ceil((b - a) / max_panel)))
        cuts = np.linspace(a, b, m + 1)
        panels.extend(zip(cuts[:-1], cuts[1:]))

    for z in z_list:
        z = complex(z)
        lhs = t0_weighted_integral(f, extra=lambda s: 1.0 / (s - z),
                                   tauf=tauf, order=order,
                                   max_panel=max_panel) / np.pi
        cz = np.log(1.0 - z) - np.log(-1.0 - z)
        acc = 0.0 + 0.0j
        for a, b in panels:
            h = 0.5 * (b - a)
            s = 0.5 * (a + b) + h * xi
            acc += h * np.dot(wi, np.arctan(f(s)) / (s - z))
        phi_p = 0.5 * cz + acc / np.pi
        phi_m = -0.5 * cz + acc / np.pi
        rhs = (np.exp(phi_p) - np.exp(phi_m)) / (2.0 * np.pi)
        worst = max(worst, abs(lhs - rhs))
    return worst
