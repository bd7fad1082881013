"""Quadrature grids on (-1,1) and sampled fields living on them.

The default grid is Chebyshev-Gauss: nodes x_k = cos(theta_k) with
theta_k = (2k-1)pi/(2N), stored in ascending order, and plain weights
pi/N.  A bounded function v is integrated as

    int_{-1}^{1} v(x) dx  ~=  (pi/N) sum_k v(x_k) sqrt(1 - x_k^2),

i.e. the classical Chebyshev-Gauss rule for the weight (1-x^2)^{-1/2}
applied to v(x) sqrt(1-x^2).  Fields that blow up algebraically at the
endpoints declare their exponents so that transforms can factor the
singular weight out analytically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.fft import dct


class GridError(ValueError):
    """Invalid grid construction or incompatible grid/field pairing."""


def _fejer1_weights(n: int, theta: np.ndarray) -> np.ndarray:
    """Fejer's first quadrature rule on the first-kind Chebyshev nodes:
    w_k = (2/n)(1 - 2 sum_{m=1}^{n//2} cos(2 m theta_k)/(4m^2-1))."""
    m = np.arange(1, n // 2 + 1)
    corr = np.cos(2.0 * theta[:, None] * m[None, :]) / (4.0 * m ** 2 - 1.0)
    return (2.0 / n) * (1.0 - 2.0 * corr.sum(axis=1))


@dataclass(frozen=True)
class QuadGrid:
    """Quadrature nodes and weights on the open interval (-1,1)."""

    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    size: int
    # theta_k with nodes = cos(theta), descending theta <-> ascending x.
    # Only set for chebyshev_gauss grids.
    theta: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.size != len(self.nodes) or self.size != len(self.weights):
            raise GridError("node/weight count mismatch")
        if np.any(np.diff(self.nodes) <= 0):
            raise GridError("nodes must be strictly increasing")
        if self.nodes[0] <= -1.0 or self.nodes[-1] >= 1.0:
            raise GridError("nodes must lie in the open interval (-1,1)")
        if np.any(self.weights <= 0):
            raise GridError("weights must be positive")

    @staticmethod
    def chebyshev(n: int) -> "QuadGrid":
        if n < 2:
            raise GridError("need at least 2 nodes")
        k = np.arange(1, n + 1)
        theta = (2 * k - 1) * np.pi / (2 * n)
        theta = theta[::-1].copy()           # descending theta = ascending x
        nodes = np.cos(theta)
        # Fejer's first rule divided by sqrt(1-x^2): close to the pure
        # Chebyshev-Gauss weight pi/N, but exact on polynomials up to
        # degree N-1 once multiplied back by sqrt(1-x^2), so that
        # sum weights*sqrt(1-x_k^2) = 2 to machine precision.
        weights = _fejer1_weights(n, theta) / np.sin(theta)
        return QuadGrid(nodes=nodes, weights=weights, kind="chebyshev_gauss",
                        size=n, theta=theta)

    @staticmethod
    def uniform(n: int) -> "QuadGrid":
        """Open midpoint rule, x_k = -1 + (2k-1)/n."""
        if n < 2:
            raise GridError("need at least 2 nodes")
        k = np.arange(1, n + 1)
        nodes = -1.0 + (2 * k - 1) / n
        weights = np.full(n, 2.0 / n)
        return QuadGrid(nodes=nodes, weights=weights, kind="uniform_open",
                        size=n)

    @property
    def plain_weights(self) -> np.ndarray:
        """Weights for integrating a plain (unweighted) bounded function."""
        if self.kind == "chebyshev_gauss":
            return self.weights * np.sqrt(1.0 - self.nodes ** 2)
        return self.weights

    def integrate_values(self, values: np.ndarray) -> float:
        return float(np.dot(self.plain_weights, values))


@dataclass
class SampledField:
    """Real samples at the nodes of a grid.

    singular_exponents, when present, declares endpoint behavior
    values(x) ~ C (1+x)^{-bm} near -1 and ~ C (1-x)^{-bp} near +1,
    with bm, bp in (-1, 1) so the field stays integrable.
    """

    grid: QuadGrid
    values: np.ndarray
    singular_exponents: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if len(self.values) != self.grid.size:
            raise GridError("values length must equal grid size")
        if self.singular_exponents is not None:
            bm, bp = self.singular_exponents
            if not (-1.0 < bm < 1.0 and -1.0 < bp < 1.0):
                raise GridError("singular exponents must lie in (-1,1)")

    def integrate(self) -> float:
        """Plain quadrature of the samples (exact handling of declared
        endpoint exponents is left to the transform layer)."""
        return self.grid.integrate_values(self.values)

    def __call__(self, x):
        return interpolate_samples(self.grid, self.values, x)


# ---------------------------------------------------------------------------
# Chebyshev machinery (first-kind nodes)
# ---------------------------------------------------------------------------

def cheb_coefficients(grid: QuadGrid, values: np.ndarray) -> np.ndarray:
    """Chebyshev T-coefficients of the degree-(N-1) interpolant through
    the Chebyshev-Gauss samples: values(x_k) = sum_n a_n T_n(x_k)."""
    if grid.kind != "chebyshev_gauss":
        raise GridError("Chebyshev coefficients need a chebyshev_gauss grid")
    n = grid.size
    # dct type 2 expects samples at cos((2k+1)pi/(2N)) in k-ascending
    # (theta-ascending = x-descending) order.
    v_desc = values[::-1]
    a = dct(v_desc, type=2) / n
    a[0] *= 0.5
    return a


def cheb_eval(coeffs: np.ndarray, x) -> np.ndarray:
    return np.polynomial.chebyshev.chebval(np.asarray(x, dtype=float), coeffs)


def cheb_derivative_values(grid: QuadGrid, values: np.ndarray) -> np.ndarray:
    """Derivative of the Chebyshev interpolant, sampled at the nodes."""
    a = cheb_coefficients(grid, values)
    da = np.polynomial.chebyshev.chebder(a)
    return np.polynomial.chebyshev.chebval(grid.nodes, da)


def interpolate_samples(grid: QuadGrid, values: np.ndarray, x) -> np.ndarray:
    """Interpolate samples at arbitrary points.

    Chebyshev grids use the stable barycentric formula for first-kind
    points; uniform grids fall back to piecewise-linear interpolation.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xv = np.atleast_1d(x)
    if grid.kind == "chebyshev_gauss":
        out = _barycentric_cheb(grid, values, xv)
    else:
        out = np.interp(xv, grid.nodes, values)
    return float(out[0]) if scalar else out


def _barycentric_cheb(grid: QuadGrid, values: np.ndarray, x: np.ndarray):
    # Barycentric weights for Chebyshev points of the first kind:
    # w_k = (-1)^k sin(theta_k)  (up to a common factor).
    theta = grid.theta
    n = grid.size
    sgn = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    w = sgn * np.sin(theta)
    diff = x[:, None] - grid.nodes[None, :]
    exact = np.isclose(diff, 0.0, atol=1e-14)
    diff_safe = np.where(exact, 1.0, diff)
    ratio = w[None, :] / diff_safe
    num = ratio @ values
    den = ratio.sum(axis=1)
    out = num / den
    hit_rows = exact.any(axis=1)
    if np.any(hit_rows):
        idx = exact[hit_rows].argmax(axis=1)
        out[hit_rows] = values[idx]
    return out
