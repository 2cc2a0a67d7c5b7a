"""Sampled scalar and coefficient-vector paths on a shared time grid.

A ScalarPath carries values and first-derivative samples (optionally
second derivatives) of one scalar function on a strictly increasing grid;
interpolation is piecewise Hermite and exact at the nodes.  ElementPath
does the same for a ten-component algebra coefficient vector.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import BPoly

__all__ = ["ScalarPath", "ElementPath", "require_same_grid"]


def _check_grid(grid):
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or len(g) < 2 or np.any(np.diff(g) <= 0):
        raise ValueError("grid must be 1-d and strictly increasing")
    return g


def require_same_grid(*objs):
    g0 = objs[0].grid
    for o in objs[1:]:
        if len(o.grid) != len(g0) or not np.allclose(o.grid, g0, rtol=0, atol=0):
            raise ValueError("paths live on different grids")
    return g0


@dataclass(frozen=True)
class ScalarPath:
    """Samples of one scalar function of time with derivative data."""

    grid: np.ndarray
    values: np.ndarray
    derivs: Optional[np.ndarray] = None
    accel: Optional[np.ndarray] = None
    jerk: Optional[np.ndarray] = None

    def __post_init__(self):
        g = _check_grid(self.grid)
        v = np.asarray(self.values, dtype=complex)
        if v.shape != g.shape:
            raise ValueError("values and grid length differ")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)
        for name in ("derivs", "accel", "jerk"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=complex)
                if arr.shape != g.shape:
                    raise ValueError(f"{name} and grid length differ")
                object.__setattr__(self, name, arr)

    @classmethod
    def from_callable(cls, grid, fn, dfn=None, ddfn=None):
        g = _check_grid(grid)
        vals = np.array([fn(t) for t in g], dtype=complex)
        der = np.array([dfn(t) for t in g], dtype=complex) if dfn else None
        acc = np.array([ddfn(t) for t in g], dtype=complex) if ddfn else None
        return cls(g, vals, der, acc)

    @property
    def is_real(self) -> bool:
        parts = [self.values] + [a for a in (self.derivs, self.accel, self.jerk)
                                 if a is not None]
        return all(np.all(p.imag == 0) for p in parts)

    def interpolant(self) -> BPoly:
        """Piecewise Hermite interpolant, one degree per stored derivative."""
        cols = [self.values]
        for arr in (self.derivs, self.accel, self.jerk):
            if arr is None:
                break
            cols.append(arr)
        data = np.column_stack(cols)
        if np.all(data.imag == 0):
            return BPoly.from_derivatives(self.grid, data.real)
        re = BPoly.from_derivatives(self.grid, data.real)
        im = BPoly.from_derivatives(self.grid, data.imag)
        re.im_part = im  # evaluated via __call__ below

        class _C:
            def __init__(self, re, im):
                self.re, self.im = re, im

            def __call__(self, t, nu=0):
                return self.re(t, nu) + 1j * self.im(t, nu)

            def derivative(self, nu=1):
                return _C(self.re.derivative(nu), self.im.derivative(nu))

        return _C(re, im)

    def _parts(self):
        return (self.derivs, self.accel, self.jerk)

    def __neg__(self):
        return ScalarPath(self.grid, -self.values,
                          *[None if a is None else -a for a in self._parts()])

    def __add__(self, other: "ScalarPath"):
        require_same_grid(self, other)
        def _sum(a, b):
            if a is None or b is None:
                return None
            return a + b
        return ScalarPath(self.grid, self.values + other.values,
                          *[_sum(a, b) for a, b in zip(self._parts(), other._parts())])

    def __mul__(self, s):
        s = complex(s)
        return ScalarPath(self.grid, self.values * s,
                          *[None if a is None else a * s for a in self._parts()])

    __rmul__ = __mul__

    def conj(self):
        return ScalarPath(self.grid, np.conj(self.values),
                          *[None if a is None else np.conj(a) for a in self._parts()])

    def to_csv(self) -> str:
        """Serialize as t,value,deriv rows with 17 significant digits."""
        buf = io.StringIO()
        buf.write("t,value,deriv\n")
        der = self.derivs if self.derivs is not None else np.zeros_like(self.values)
        for t, v, d in zip(self.grid, self.values, der):
            def fmt(z):
                if z.imag == 0:
                    return format(z.real, ".17g")
                return f"{format(z.real, '.17g')}{z.imag:+.17g}j"
            buf.write(f"{format(float(t), '.17g')},{fmt(v)},{fmt(d)}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class ElementPath:
    """Time-indexed algebra element: (n, 10) complex coefficient samples."""

    grid: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        g = _check_grid(self.grid)
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (len(g), 10):
            raise ValueError("coefficient array must have shape (n, 10)")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_callable(cls, grid, fn):
        g = _check_grid(grid)
        return cls(g, np.stack([np.asarray(fn(t), dtype=complex) for t in g]))

    def at(self, idx):
        from .algebra import AlgebraElement
        return AlgebraElement(self.coeffs[idx])

    def hermiticity_residuals(self) -> np.ndarray:
        return np.max(np.abs(self.coeffs.imag), axis=1)

    def max_hermiticity_residual(self) -> float:
        return float(np.max(self.hermiticity_residuals()))

    def __add__(self, other: "ElementPath"):
        require_same_grid(self, other)
        return ElementPath(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "ElementPath"):
        require_same_grid(self, other)
        return ElementPath(self.grid, self.coeffs - other.coeffs)

    def sup_distance(self, other: "ElementPath") -> float:
        require_same_grid(self, other)
        return float(np.max(np.abs(self.coeffs - other.coeffs)))

    def time_derivative(self) -> np.ndarray:
        """Fourth-order finite differences on a uniform grid, shape (n, 10)."""
        g, c = self.grid, self.coeffs
        h = g[1] - g[0]
        if not np.allclose(np.diff(g), h, rtol=1e-9, atol=0):
            raise ValueError("finite differences need a uniform grid")
        d = np.empty_like(c)
        d[2:-2] = (c[:-4] - 8 * c[1:-3] + 8 * c[3:-1] - c[4:]) / (12 * h)
        # one-sided fourth-order stencils at the edges
        edge = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12 * h)
        for i in (0, 1):
            d[i] = np.tensordot(edge, c[i:i + 5], axes=(0, 0))
            d[-1 - i] = -np.tensordot(edge, c[-1 - i:-6 - i:-1], axes=(0, 0))
        return d
