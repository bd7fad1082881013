"""Piecewise-Lipschitz friction profiles on (-1,1).

A profile is a list of breakpoints -1 = x_0 < ... < x_n = 1 and one
piece descriptor per subinterval.  Pieces are constant, polynomial (in
the global coordinate), or arbitrary callables with a declared
Lipschitz bound.  One-sided limits at every breakpoint are well
defined, which is what the jump analysis needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np


class ProfileError(ValueError):
    """Invalid profile construction or unsupported profile kind."""


class Piece:
    """One Lipschitz piece, evaluable on its closed subinterval."""

    kind = "abstract"

    def __call__(self, x):
        raise NotImplementedError

    def lipschitz(self, lo: float, hi: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantPiece(Piece):
    value: float
    kind: str = "constant"

    def __call__(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.value)

    def lipschitz(self, lo, hi):
        return 0.0


@dataclass(frozen=True)
class PolyPiece(Piece):
    coeffs: tuple          # ascending powers of the global coordinate
    kind: str = "polynomial"

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(
            np.asarray(x, dtype=float), np.asarray(self.coeffs))

    def lipschitz(self, lo, hi):
        der = np.polynomial.polynomial.polyder(np.asarray(self.coeffs))
        xs = np.linspace(lo, hi, 64)
        return float(np.max(np.abs(
            np.polynomial.polynomial.polyval(xs, der)))) if len(der) else 0.0


@dataclass(frozen=True)
class FuncPiece(Piece):
    fn: Callable
    lipschitz_bound: float
    kind: str = "tabulated"

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)

    def lipschitz(self, lo, hi):
        return self.lipschitz_bound


@dataclass(frozen=True)
class FrictionProfile:
    breakpoints: np.ndarray
    pieces: Tuple[Piece, ...]

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        object.__setattr__(self, "breakpoints", bp)
        if len(bp) != len(self.pieces) + 1:
            raise ProfileError("need exactly one piece per subinterval")
        if abs(bp[0] + 1.0) > 1e-14 or abs(bp[-1] - 1.0) > 1e-14:
            raise ProfileError("breakpoints must span [-1, 1]")
        if np.any(np.diff(bp) <= 0):
            raise ProfileError("breakpoints must be strictly increasing")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(c: float) -> "FrictionProfile":
        return FrictionProfile(np.array([-1.0, 1.0]), (ConstantPiece(c),))

    @staticmethod
    def from_steps(breakpoints: Sequence[float],
                   values: Sequence[float]) -> "FrictionProfile":
        return FrictionProfile(
            np.asarray(breakpoints, dtype=float),
            tuple(ConstantPiece(v) for v in values))

    @staticmethod
    def from_callable(fn: Callable, lipschitz_bound: float,
                      breakpoints: Sequence[float] = (-1.0, 1.0)
                      ) -> "FrictionProfile":
        bp = np.asarray(breakpoints, dtype=float)
        return FrictionProfile(
            bp, tuple(FuncPiece(fn, lipschitz_bound)
                      for _ in range(len(bp) - 1)))

    @staticmethod
    def polynomial(coeffs: Sequence[float]) -> "FrictionProfile":
        return FrictionProfile(np.array([-1.0, 1.0]),
                               (PolyPiece(tuple(coeffs)),))

    # -- evaluation ---------------------------------------------------------

    def piece_index(self, x) -> np.ndarray:
        idx = np.searchsorted(self.breakpoints, np.asarray(x, dtype=float),
                              side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xv = np.atleast_1d(x)
        idx = self.piece_index(xv)
        out = np.empty_like(xv)
        for i, piece in enumerate(self.pieces):
            mask = idx == i
            if np.any(mask):
                out[mask] = piece(xv[mask])
        return float(out[0]) if scalar else out

    def limit_left(self, xi: float) -> float:
        i = int(np.searchsorted(self.breakpoints, xi) - 1)
        i = min(max(i, 0), len(self.pieces) - 1)
        return float(self.pieces[i](np.array([xi]))[0])

    def limit_right(self, xi: float) -> float:
        i = int(np.searchsorted(self.breakpoints, xi, side="right") - 1)
        i = min(max(i, 0), len(self.pieces) - 1)
        return float(self.pieces[i](np.array([xi]))[0])

    # -- structure ----------------------------------------------------------

    def jumps(self, tol: float = 1e-12) -> List[Tuple[float, float, float]]:
        """Interior breakpoints with (x_i, f(x_i-), f(x_i+)) where the
        one-sided limits differ by more than tol."""
        out = []
        for xi in self.breakpoints[1:-1]:
            fl, fr = self.limit_left(xi), self.limit_right(xi)
            if abs(fl - fr) > tol:
                out.append((float(xi), fl, fr))
        return out

    def decreasing_jumps(self, tol: float = 1e-12):
        return [j for j in self.jumps(tol) if j[1] > j[2]]

    def increasing_jumps(self, tol: float = 1e-12):
        return [j for j in self.jumps(tol) if j[1] < j[2]]

    @property
    def is_lipschitz(self) -> bool:
        return len(self.jumps()) == 0

    @property
    def all_constant(self) -> bool:
        return all(p.kind == "constant" for p in self.pieces)

    @property
    def sup_norm(self) -> float:
        m = 0.0
        for lo, hi, piece in zip(self.breakpoints[:-1], self.breakpoints[1:],
                                 self.pieces):
            xs = np.linspace(lo, hi, 257)
            m = max(m, float(np.max(np.abs(piece(xs)))))
        return m

    @property
    def lipschitz_bound(self) -> float:
        return max(piece.lipschitz(lo, hi) for lo, hi, piece in
                   zip(self.breakpoints[:-1], self.breakpoints[1:],
                       self.pieces))

    # -- transforms ---------------------------------------------------------

    def scaled(self, c: float) -> "FrictionProfile":
        pieces = []
        for p in self.pieces:
            if isinstance(p, ConstantPiece):
                pieces.append(ConstantPiece(c * p.value))
            elif isinstance(p, PolyPiece):
                pieces.append(PolyPiece(tuple(c * np.asarray(p.coeffs))))
            else:
                fn = p.fn
                pieces.append(FuncPiece(lambda x, fn=fn, c=c: c * fn(x),
                                        c * p.lipschitz_bound))
        return FrictionProfile(self.breakpoints.copy(), tuple(pieces))

    def restrict_affine(self, center: float, half: float) -> "FrictionProfile":
        """Profile xi -> f(center + half*xi) on (-1,1); used when a
        contact subinterval [center-half, center+half] is mapped back
        to the reference interval."""
        if half <= 0:
            raise ProfileError("half-width must be positive")
        lo, hi = center - half, center + half
        inner = [b for b in self.breakpoints if lo < b < hi]
        new_bp = np.concatenate([[-1.0], (np.asarray(inner) - center) / half,
                                 [1.0]])
        pieces = []
        edges_global = np.concatenate([[lo], inner, [hi]])
        for a, b in zip(edges_global[:-1], edges_global[1:]):
            mid = 0.5 * (a + b)
            src = self.pieces[int(self.piece_index(mid))]
            if isinstance(src, ConstantPiece):
                pieces.append(src)
            elif isinstance(src, PolyPiece):
                # compose p(x) with x = center + half*xi
                comp = np.polynomial.polynomial.Polynomial(
                    np.asarray(src.coeffs))(
                    np.polynomial.polynomial.Polynomial([center, half]))
                pieces.append(PolyPiece(tuple(comp.coef)))
            else:
                fn = src.fn
                pieces.append(FuncPiece(
                    lambda xi, fn=fn, c=center, h=half: fn(c + h * xi),
                    src.lipschitz_bound * half))
        return FrictionProfile(new_bp, tuple(pieces))
