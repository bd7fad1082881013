"""Principal-value Hilbert transforms, Poisson integrals and upper
half-plane Cauchy integrals on (-1,1).

Two complementary strategies are used throughout:

* PV by singularity subtraction,
      pv int f(s)/(x-s) ds = int (f(s)-f(x))/(x-s) ds
                             + f(x) log|(x-a)/(x-b)|,
  with the regularized integrand evaluated by the grid's rule.

* Endpoint singularities by factoring.  For the weight
      w_a(x) = (1+x)^{-1/2-a} (1-x)^{-1/2+a},        |a| < 1/2,
  the finite Hilbert transform is known in closed form,
      H[w_a chi](x) = -tan(pi a) w_a(x)   on (-1,1),
  and the moments  int w_a = pi/cos(pi a),
  int s w_a(s) ds = -2a pi/cos(pi a) ... (via Beta functions; only the
  zeroth moment is needed explicitly, the first enters through the
  identity H[s w](x) = 1/cos(pi a) - x tan(pi a) w(x)).
  Fields carrying singular exponents are transformed as
  (smooth ratio) x (analytic weight transform).
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy.special import roots_legendre

from .grids import (
    GridError,
    QuadGrid,
    SampledField,
    cheb_derivative_values,
    interpolate_samples,
)


class DomainError(ValueError):
    """Evaluation requested outside the operator's admissible domain."""


# ---------------------------------------------------------------------------
# Exact transforms of the algebraic endpoint weights
# ---------------------------------------------------------------------------

def endpoint_weight(alpha: float, x) -> np.ndarray:
    """w_a(x) = (1+x)^{-1/2-a} (1-x)^{-1/2+a} on (-1,1)."""
    x = np.asarray(x, dtype=float)
    return (1.0 + x) ** (-0.5 - alpha) * (1.0 - x) ** (-0.5 + alpha)


def hilbert_weight_exact(alpha: float, x) -> np.ndarray:
    """H[w_a chi](x) = -tan(pi a) w_a(x) for x in (-1,1)."""
    return -np.tan(np.pi * alpha) * endpoint_weight(alpha, x)


def hilbert_xweight_exact(alpha: float, x) -> np.ndarray:
    """H[s w_a(s) chi](x) = 1/cos(pi a) - x tan(pi a) w_a(x)."""
    x = np.asarray(x, dtype=float)
    return 1.0 / np.cos(np.pi * alpha) - x * np.tan(np.pi * alpha) \
        * endpoint_weight(alpha, x)


def weight_mass(alpha: float) -> float:
    """int_{-1}^{1} w_a = Gamma(1/2-a)Gamma(1/2+a) = pi/cos(pi a)."""
    return np.pi / np.cos(np.pi * alpha)


def cauchy_weight_exact(alpha: float, z: complex) -> complex:
    """int_{-1}^{1} w_a(s)/(s-z) ds for Im z > 0.

    Specializes the upper half-plane identity for the mass-one solution
    of the homogeneous equation with constant coefficient tan(pi a):
    (1/pi) int t0/(s-z) = (e^{phi+} - e^{phi-})/(2 pi) with
    phi+-(z) = (+-1/2 + a) * int ds/(s-z).
    """
    cz = np.log(1.0 - z) - np.log(-1.0 - z)
    ep = np.exp((0.5 + alpha) * cz)
    em = np.exp((-0.5 + alpha) * cz)
    return np.pi * (ep - em) / (2.0 * np.cos(np.pi * alpha))


def _clip_alpha(alpha: float) -> float:
    return float(np.clip(alpha, -0.4999, 0.4999))


# ---------------------------------------------------------------------------
# PV quadrature from a callable (used for tau and whole-line helpers)
# ---------------------------------------------------------------------------

def _panelize(support: Tuple[float, float], kinks: Sequence[float],
              max_panel: float) -> np.ndarray:
    a, b = support
    cuts = {a, b}
    for k in kinks:
        if a < k < b:
            cuts.add(float(k))
    edges = sorted(cuts)
    refined = [edges[0]]
    for left, right in zip(edges[:-1], edges[1:]):
        m = max(1, int(np.ceil((right - left) / max_panel)))
        refined.extend(np.linspace(left, right, m + 1)[1:])
    return np.asarray(refined)


def pv_hilbert_callable(fn: Callable[[np.ndarray], np.ndarray],
                        support: Tuple[float, float],
                        x_eval,
                        kinks: Sequence[float] = (),
                        order: int = 48,
                        max_panel: float = 0.25) -> np.ndarray:
    """H[fn chi_support](x) = -(1/pi) pv int fn(s)/(x-s) ds.

    fn must be continuous on the closed support (so the subtraction
    leaves a bounded integrand); kinks list interior points where fn is
    only piecewise smooth, used as panel boundaries.
    """
    a, b = support
    x = np.atleast_1d(np.asarray(x_eval, dtype=float))
    edges = _panelize(support, kinks, max_panel)
    xi, wi = roots_legendre(order)
    mids = 0.5 * (edges[1:] + edges[:-1])
    halfs = 0.5 * (edges[1:] - edges[:-1])
    s = (mids[:, None] + halfs[:, None] * xi[None, :]).ravel()
    w = (halfs[:, None] * wi[None, :]).ravel()
    fs = fn(s)

    inside = (x > a) & (x < b)
    out = np.empty_like(x)

    if np.any(inside):
        xin = x[inside]
        fx = fn(xin)
        diff = xin[:, None] - s[None, :]
        tiny = np.abs(diff) < 1e-12
        diff = np.where(tiny, 1.0, diff)
        quot = (fs[None, :] - fx[:, None]) / diff
        if np.any(tiny):
            h = 1e-7
            der = (fn(xin + h) - fn(xin - h)) / (2 * h)
            quot = np.where(tiny, -der[:, None], quot)
        reg = quot @ w
        out[inside] = -(reg + fx * np.log(np.abs((xin - a) / (xin - b)))) / np.pi
    if np.any(~inside):
        xout = x[~inside]
        out[~inside] = -((fs[None, :] / (xout[:, None] - s[None, :])) @ w) / np.pi
    if np.ndim(x_eval) == 0:
        return float(out[0])
    return out


# ---------------------------------------------------------------------------
# Finite Hilbert transform of sampled fields
# ---------------------------------------------------------------------------

def _local_derivative(s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Three-point derivative on a non-uniform grid (one-sided at the
    ends); errors stay local, unlike spectral differentiation."""
    d = np.empty_like(v)
    h1 = s[1:-1] - s[:-2]
    h2 = s[2:] - s[1:-1]
    d[1:-1] = (-h2 / (h1 * (h1 + h2)) * v[:-2]
               + (h2 - h1) / (h1 * h2) * v[1:-1]
               + h1 / (h2 * (h1 + h2)) * v[2:])
    d[0] = (v[1] - v[0]) / (s[1] - s[0])
    d[-1] = (v[-1] - v[-2]) / (s[-1] - s[-2])
    return d

def _plain_hilbert_inside(field: SampledField, x: np.ndarray) -> np.ndarray:
    grid = field.grid
    s = grid.nodes
    wq = grid.plain_weights
    v = field.values
    if grid.kind == "chebyshev_gauss":
        vprime = cheb_derivative_values(grid, v)
    else:
        vprime = np.gradient(v, s)
    vx = interpolate_samples(grid, v, x)
    vx = np.atleast_1d(vx)
    diff = x[:, None] - s[None, :]
    hit = np.abs(diff) < 1e-14
    diff = np.where(hit, 1.0, diff)
    quot = (v[None, :] - vx[:, None]) / diff
    if np.any(hit):
        rows, cols = np.nonzero(hit)
        quot[rows, cols] = -vprime[cols]
    reg = quot @ wq
    return -(reg + vx * np.log((1.0 + x) / (1.0 - x))) / np.pi


def _factored_hilbert_inside(field: SampledField, x: np.ndarray) -> np.ndarray:
    """Split-blend transform of an endpoint-singular field.

    The field is split as v = v*(1-s)/2 + v*(1+s)/2; each half is
    singular at a single endpoint and is factored against the weight
    w_a matching that endpoint's exponent, with a linear correction so
    the remaining ratio vanishes at both endpoints.  The pole at s = x
    is removed by subtracting rt(x)*(1-s^2)/(1-x^2) rather than the
    constant rt(x): the subtracted term vanishes at both endpoints, so
    the weight's algebraic singularity never multiplies an O(1)
    remainder (a constant subtraction degrades the rule to O(N^{2a-1})).
    The subtracted piece is restored through the exact transform
        H[(1-s^2) w_a](x) = -(1-x^2) tan(pi a) w_a(x)
                            - (x - 2a)/cos(pi a).
    """
    grid = field.grid
    s = grid.nodes
    wq = grid.plain_weights
    v = field.values
    bm, bp = field.singular_exponents
    am = _clip_alpha(bm - 0.5)
    ap = _clip_alpha(0.5 - bp)

    total = np.zeros_like(x)
    for side, alpha in (("left", am), ("right", ap)):
        if side == "left":
            part = v * (1.0 - s) / 2.0
            ell = lambda t: (1.0 - t) / 2.0
            h_ell_exact = lambda t: 0.5 * (hilbert_weight_exact(alpha, t)
                                           - hilbert_xweight_exact(alpha, t))
            end_idx = 0
        else:
            part = v * (1.0 + s) / 2.0
            ell = lambda t: (1.0 + t) / 2.0
            h_ell_exact = lambda t: 0.5 * (hilbert_weight_exact(alpha, t)
                                           + hilbert_xweight_exact(alpha, t))
            end_idx = -1
        ws = endpoint_weight(alpha, s)
        r = part / ws
        r0 = r[end_idx]
        rt = r - r0 * ell(s)
        rtx = np.atleast_1d(interpolate_samples(grid, rt, x))
        # local 3-point derivative: a spectral derivative would smear
        # interior-kink error over every node and cap the rule at
        # O(N^{-3/2}) for merely-Lipschitz coefficients
        rtprime = _local_derivative(s, rt)
        sub = rtx / (1.0 - x * x)
        diff = x[:, None] - s[None, :]
        hit = np.abs(diff) < 1e-14
        diff = np.where(hit, 1.0, diff)
        quot = ws[None, :] * (rt[None, :]
                              - sub[:, None] * (1.0 - s * s)[None, :]) / diff
        if np.any(hit):
            rows, cols = np.nonzero(hit)
            nprime = rtprime[cols] + 2.0 * x[rows] * sub[rows]
            quot[rows, cols] = -ws[cols] * nprime
        reg = quot @ wq
        wx = endpoint_weight(alpha, x)
        h_quad = -(1.0 - x * x) * np.tan(np.pi * alpha) * wx \
            - (x - 2.0 * alpha) / np.cos(np.pi * alpha)
        total += -reg / np.pi + sub * h_quad + r0 * h_ell_exact(x)
    return total


def hilbert_line(field: SampledField, eval_points) -> np.ndarray:
    """H[f](x) = -(1/pi) pv int f(s)/(x-s) ds for f supported on (-1,1)
    and extended by zero."""
    x = np.atleast_1d(np.asarray(eval_points, dtype=float))
    out = np.empty_like(x)
    inside = np.abs(x) < 1.0
    if np.any(inside):
        xin = x[inside]
        if field.singular_exponents is None:
            out[inside] = _plain_hilbert_inside(field, xin)
        else:
            out[inside] = _factored_hilbert_inside(field, xin)
    if np.any(~inside):
        s = field.grid.nodes
        wq = field.grid.plain_weights
        xout = x[~inside]
        out[~inside] = -((field.values[None, :] * wq[None, :]
                          / (xout[:, None] - s[None, :])).sum(axis=1)) / np.pi
    if np.ndim(eval_points) == 0:
        return float(out[0])
    return out


def _tail_hilbert(field: SampledField, x: np.ndarray) -> np.ndarray:
    """-(1/pi) int_{|s|>1} H[f](s)/(x-s) ds for x inside (-1,1).

    H[f] decays like 1/s; the substitution s -> 1/u maps each tail to a
    smooth integral over (0,1).
    """
    xi, wi = roots_legendre(200)
    u = 0.5 * (xi + 1.0)
    wu = 0.5 * wi
    out = np.zeros_like(x)
    for sign in (1.0, -1.0):
        s = sign / u
        hs = hilbert_line(field, s)
        # ds = -sign du/u^2; orientation: s runs from +-inf to +-1 as u: 0->1,
        # so int_{1}^{inf} ... ds = int_0^1 ... du/u^2 (sign=+1) and
        # int_{-inf}^{-1} ... ds = int_0^1 ... du/u^2 (sign=-1).
        kern = hs[None, :] / (x[:, None] - s[None, :]) / (u[None, :] ** 2)
        out += kern @ wu
    return -out / np.pi


def hilbert_involution_residual(field: SampledField) -> float:
    """Discrete L2 norm of H[H[f]] + f on the interior of f's support."""
    grid = field.grid
    nz = np.nonzero(np.abs(field.values) > 0)[0]
    if len(nz) == 0:
        return 0.0
    lo, hi = grid.nodes[nz[0]], grid.nodes[nz[-1]]
    pad = 0.02 * (hi - lo)
    mask = (grid.nodes > lo + pad) & (grid.nodes < hi - pad)
    x = grid.nodes[mask]

    h1 = hilbert_line(field, grid.nodes)
    h1_field = SampledField(grid=grid, values=h1)
    inner = hilbert_line(h1_field, x) + _tail_hilbert(field, x)
    resid = inner + field.values[mask]
    w = grid.plain_weights[mask]
    return float(np.sqrt(np.dot(w, resid ** 2)))


# ---------------------------------------------------------------------------
# Poisson extension and Cauchy integrals
# ---------------------------------------------------------------------------

def poisson_extend(field: SampledField, x: float, y: float) -> float:
    """Phi_u(x,y) = (1/pi) int y u(s)/((x-s)^2+y^2) ds.

    The samples are integrated as a piecewise-linear interpolant, for
    which the Poisson kernel has a closed-form antiderivative; this
    stays accurate for y far below the node spacing.
    """
    if y <= 0:
        raise DomainError("poisson_extend requires y > 0")
    s = field.grid.nodes
    v = field.values
    sa, sb = s[:-1], s[1:]
    va, vb = v[:-1], v[1:]
    slope = (vb - va) / (sb - sa)
    # On each segment u(s) = va + slope*(s - sa); with d = s - x:
    # int y (c0 + slope*d)/(d^2+y^2) dd
    #   = c0 * arctan(d/y) * ... evaluated below, c0 = va + slope*(x - sa).
    c0 = va + slope * (x - sa)
    da, db = sa - x, sb - x
    atan_term = c0 * (np.arctan2(db, y) - np.arctan2(da, y))
    log_term = 0.5 * slope * y * (np.log(db * db + y * y)
                                  - np.log(da * da + y * y))
    return float((atan_term + log_term).sum() / np.pi)


def cauchy_upper(field: SampledField, z: complex) -> complex:
    """(1/pi) int_{-1}^{1} t(s)/(s-z) ds for Im z >= 1e-3."""
    if z.imag <= 0:
        raise DomainError("cauchy_upper requires Im z > 0")
    if z.imag < 1e-3:
        raise DomainError("cauchy_upper refuses Im z < 1e-3 "
                          "(too close to the real axis)")
    grid = field.grid
    s = grid.nodes
    wq = grid.plain_weights
    v = field.values
    if field.singular_exponents is None:
        return complex(np.dot(wq * v, 1.0 / (s - z)) / np.pi)

    bm, bp = field.singular_exponents
    am = _clip_alpha(bm - 0.5)
    ap = _clip_alpha(0.5 - bp)
    total = 0.0 + 0.0j
    for side, alpha in (("left", am), ("right", ap)):
        if side == "left":
            part = v * (1.0 - s) / 2.0
            ell = (1.0 - s) / 2.0
            end_idx = 0
        else:
            part = v * (1.0 + s) / 2.0
            ell = (1.0 + s) / 2.0
            end_idx = -1
        ws = endpoint_weight(alpha, s)
        r = part / ws
        r0 = r[end_idx]
        rt = r - r0 * ell
        quad = np.dot(wq * ws * rt, 1.0 / (s - z))
        cw = cauchy_weight_exact(alpha, z)
        cxw = weight_mass(alpha) + z * cw
        if side == "left":
            exact = r0 * 0.5 * (cw - cxw)
        else:
            exact = r0 * 0.5 * (cw + cxw)
        total += quad + exact
    return complex(total / np.pi)


# ---------------------------------------------------------------------------
# Poincare-Bertrand-Tricomi diagnostic
# ---------------------------------------------------------------------------

def pbt_residual(f1: SampledField, f2: SampledField,
                 interior: float = 0.9) -> float:
    """Discrete norm of H[H[f1] f2 + f1 H[f2]] - (H[f1] H[f2] - f1 f2)
    on the interior |x| <= interior."""
    if f1.grid is not f2.grid and f1.grid.size != f2.grid.size:
        raise GridError("pbt_residual expects fields on a common grid")
    grid = f1.grid
    x = grid.nodes
    h1 = hilbert_line(f1, x)
    h2 = hilbert_line(f2, x)
    inner_vals = h1 * f2.values + f1.values * h2
    inner = SampledField(grid=grid, values=inner_vals)
    mask = np.abs(x) <= interior
    lhs = hilbert_line(inner, x[mask])
    rhs = h1[mask] * h2[mask] - f1.values[mask] * f2.values[mask]
    w = grid.plain_weights[mask]
    return float(np.sqrt(np.dot(w, (lhs - rhs) ** 2)))
