"""Exact arithmetic substrate for the toolkit.

Rational lattice parameters, common grids on which every lattice translation
is an exact cell shift, finite-support step functions, periodic step
functions, and the finite cyclic model behind the brute-force oracle.
Geometry lives in `fractions.Fraction`; cell values are complex doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import fsum
from typing import Iterable, Optional, Union

import numpy as np

Rational = Fraction

__all__ = [
    "Rational",
    "GridError",
    "LatticeError",
    "as_rational",
    "LatticeParams",
    "GridSpec",
    "common_grid",
    "lattice_cells",
    "StepFunction",
    "PeriodicStepFunction",
    "DiscreteGaborSystem",
    "translate",
    "modulated_inner_product",
    "step_fourier",
    "discrete_atom",
    "csum",
    "lattice_to_json",
    "lattice_from_json",
]


class GridError(ValueError):
    """An operation would leave the exact common grid."""


class LatticeError(ValueError):
    """Invalid lattice parameters."""


def as_rational(x: Union[int, Fraction, str]) -> Fraction:
    """Coerce an int, Fraction, or string like '2/3' to an exact Fraction.

    Floats are refused: the caller must state which rational is meant.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise LatticeError(f"cannot parse rational from {x!r}") from exc
    if isinstance(x, float):
        raise LatticeError(
            f"refusing inexact float {x!r}; pass a Fraction or 'num/den' string"
        )
    raise LatticeError(f"cannot interpret {x!r} as a rational")


def csum(values: Iterable[complex]) -> complex:
    """Compensated complex sum (fsum per component) in a fixed order."""
    arr = np.asarray(values, dtype=complex).ravel()
    if arr.size == 0:
        return 0j
    return complex(fsum(arr.real.tolist()), fsum(arr.imag.tolist()))


@dataclass(frozen=True)
class LatticeParams:
    """Time-frequency lattice: time shifts by multiples of a, modulations by
    multiples of b. The density ratio ab = p/q is kept in lowest terms."""

    a: Fraction
    b: Fraction

    def __post_init__(self) -> None:
        a = as_rational(self.a)
        b = as_rational(self.b)
        if a <= 0 or b <= 0:
            raise LatticeError("lattice parameters must be positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def ab(self) -> Fraction:
        return self.a * self.b

    @property
    def p(self) -> int:
        return self.ab.numerator

    @property
    def q(self) -> int:
        return self.ab.denominator


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of cell width `step`; cell c covers [c*step, (c+1)*step).

    s_a and s_b, when present, witness that the grid was built for a lattice:
    s_a = a/step and s_b = (1/b)/step, both integers.
    """

    step: Fraction
    s_a: Optional[int] = None
    s_b: Optional[int] = None

    def __post_init__(self) -> None:
        step = as_rational(self.step)
        if step <= 0:
            raise GridError("grid step must be positive")
        object.__setattr__(self, "step", step)

    def cells(self, length: Union[int, Fraction]) -> int:
        """Number of cells in a span of the given rational length."""
        n = as_rational(length) / self.step
        if n.denominator != 1:
            raise GridError(f"length {length} is not a whole number of cells")
        return n.numerator

    def cell_of(self, t: Fraction) -> int:
        """Global index of the cell containing time t (cells close left)."""
        r = as_rational(t) / self.step
        return r.numerator // r.denominator


def common_grid(a, b, resolution: int = 1) -> GridSpec:
    """Grid on which translations by a and by 1/b are exact cell shifts.

    Returns step = 1/(resolution*M) with M the least positive integer making
    a*M, b*M, and M/b all integers; the b*M condition keeps the grid usable
    for both Zak normalizations (window side 1/b and dual side a).
    """
    a = as_rational(a)
    b = as_rational(b)
    if a <= 0 or b <= 0:
        raise LatticeError("lattice parameters must be positive")
    if not isinstance(resolution, int) or resolution < 1:
        raise GridError("resolution must be a positive integer")
    m = math.lcm(a.denominator, b.denominator, b.numerator)
    step = Fraction(1, resolution * m)
    s_a = a / step
    s_b = (1 / b) / step
    return GridSpec(step, int(s_a), int(s_b))


def lattice_cells(lat: LatticeParams, grid: GridSpec) -> tuple[int, int]:
    """Validate grid/lattice compatibility; return (s_a, s_b) recomputed."""
    s_a = lat.a / grid.step
    s_b = (1 / lat.b) / grid.step
    if s_a.denominator != 1 or s_b.denominator != 1:
        raise GridError(
            f"grid step {grid.step} does not divide both a={lat.a} and 1/b={1 / lat.b}"
        )
    return int(s_a), int(s_b)


def _as_grid(grid: Union[GridSpec, Fraction, int, str]) -> GridSpec:
    if isinstance(grid, GridSpec):
        return grid
    return GridSpec(as_rational(grid))


class StepFunction:
    """Finite-support piecewise-constant complex function.

    Cell j of `values` occupies [(lo+j)*step, (lo+j+1)*step). The stored
    array is zero-trimmed at both ends and read-only.
    """

    __slots__ = ("grid", "lo", "values")

    def __init__(self, grid: Union[GridSpec, Fraction], lo: int, values) -> None:
        g = _as_grid(grid)
        vals = np.ascontiguousarray(values, dtype=complex)
        if vals.ndim != 1:
            raise GridError("values must be one-dimensional")
        nz = np.flatnonzero(vals)
        if nz.size == 0:
            lo = 0
            vals = np.zeros(0, dtype=complex)
        else:
            first, last = int(nz[0]), int(nz[-1])
            lo = int(lo) + first
            vals = vals[first : last + 1].copy()
        vals.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):  # immutable after construction
        raise AttributeError("StepFunction is immutable")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def box(
        cls,
        grid: Union[GridSpec, Fraction],
        start: Union[int, Fraction, str],
        stop: Union[int, Fraction, str],
        value: complex = 1.0,
    ) -> "StepFunction":
        """Indicator `value * chi_[start, stop)`; endpoints must be cell-aligned."""
        g = _as_grid(grid)
        lo_r = as_rational(start) / g.step
        hi_r = as_rational(stop) / g.step
        if lo_r.denominator != 1 or hi_r.denominator != 1:
            raise GridError("box endpoints must be whole cells")
        lo, hi = int(lo_r), int(hi_r)
        if hi < lo:
            raise GridError("empty or negative box")
        return cls(g, lo, np.full(hi - lo, value, dtype=complex))

    @classmethod
    def zero(cls, grid: Union[GridSpec, Fraction]) -> "StepFunction":
        return cls(grid, 0, np.zeros(0, dtype=complex))

    # -- basic geometry --------------------------------------------------------

    @property
    def step(self) -> Fraction:
        return self.grid.step

    @property
    def hi(self) -> int:
        """One past the last supported global cell index."""
        return self.lo + len(self.values)

    @property
    def support(self) -> tuple[Fraction, Fraction]:
        return (self.lo * self.step, self.hi * self.step)

    def value_at(self, t: Union[int, Fraction, str]) -> complex:
        c = self.grid.cell_of(as_rational(t))
        if self.lo <= c < self.hi:
            return complex(self.values[c - self.lo])
        return 0j

    def cell_values(self, lo: int, n: int) -> np.ndarray:
        """Values on global cells [lo, lo+n), zero-padded outside support."""
        out = np.zeros(n, dtype=complex)
        a = max(lo, self.lo)
        b = min(lo + n, self.hi)
        if a < b:
            out[a - lo : b - lo] = self.values[a - self.lo : b - self.lo]
        return out

    # -- norms -----------------------------------------------------------------

    @property
    def norm_sq(self) -> float:
        d = float(self.step)
        return d * fsum((np.abs(self.values) ** 2).tolist()) if self.values.size else 0.0

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm_sq)

    @property
    def l1(self) -> float:
        d = float(self.step)
        return d * fsum(np.abs(self.values).tolist()) if self.values.size else 0.0

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    # -- algebra ---------------------------------------------------------------

    def __add__(self, other: "StepFunction") -> "StepFunction":
        if not isinstance(other, StepFunction):
            return NotImplemented
        if self.step != other.step:
            raise GridError("grid mismatch; resample to a common refinement first")
        if not self.values.size:
            return other
        if not other.values.size:
            return self
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        return StepFunction(
            self.grid, lo, self.cell_values(lo, hi - lo) + other.cell_values(lo, hi - lo)
        )

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return self + (other * (-1.0))

    def __mul__(self, scalar: complex) -> "StepFunction":
        if isinstance(scalar, StepFunction):
            return NotImplemented
        return StepFunction(self.grid, self.lo, self.values * complex(scalar))

    __rmul__ = __mul__

    def conjugate(self) -> "StepFunction":
        return StepFunction(self.grid, self.lo, np.conj(self.values))

    def resample(self, target: Union[GridSpec, Fraction]) -> "StepFunction":
        """Refine to a finer grid by duplicating cell values (never interpolates)."""
        g = _as_grid(target)
        ratio = self.step / g.step
        if ratio.denominator != 1 or ratio < 1:
            raise GridError(f"target step {g.step} does not refine {self.step}")
        r = int(ratio)
        if r == 1 and g == self.grid:
            return self
        return StepFunction(g, self.lo * r, np.repeat(self.values, r))

    # -- equality and serialization ---------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (
            self.step == other.step
            and self.lo == other.lo
            and self.values.shape == other.values.shape
            and bool(np.all(self.values == other.values))
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"StepFunction(step={self.step}, support=[{self.support[0]}, "
            f"{self.support[1]}), cells={len(self.values)})"
        )

    def to_json_obj(self) -> dict:
        if self.step.numerator != 1:
            raise GridError("only unit-fraction grid steps serialize to grid_den")
        return {
            "grid_den": self.step.denominator,
            "lo": self.lo,
            "re": [float(v) for v in self.values.real],
            "im": [float(v) for v in self.values.imag],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "StepFunction":
        den = obj["grid_den"]
        if not isinstance(den, int) or den < 1:
            raise GridError("grid_den must be a positive integer")
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
        if re.shape != im.shape:
            raise GridError("re and im must have equal length")
        return cls(GridSpec(Fraction(1, den)), int(obj["lo"]), re + 1j * im)


class PeriodicStepFunction:
    """Periodic piecewise-constant function with period period_cells * step.

    values[c % period_cells] is the value on global cell c.
    """

    __slots__ = ("grid", "period_cells", "values")

    def __init__(self, grid: Union[GridSpec, Fraction], period_cells: int, values) -> None:
        g = _as_grid(grid)
        if period_cells < 1:
            raise GridError("period must contain at least one cell")
        vals = np.ascontiguousarray(values, dtype=complex)
        if vals.shape != (period_cells,):
            raise GridError("values must have exactly period_cells entries")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "period_cells", int(period_cells))
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):
        raise AttributeError("PeriodicStepFunction is immutable")

    @property
    def step(self) -> Fraction:
        return self.grid.step

    @property
    def period(self) -> Fraction:
        return self.period_cells * self.step

    def cell(self, c: int) -> complex:
        return complex(self.values[c % self.period_cells])

    def value_at(self, t: Union[int, Fraction, str]) -> complex:
        return self.cell(self.grid.cell_of(as_rational(t)))

    def tile(self, lo: int, n: int) -> np.ndarray:
        """Values on global cells [lo, lo+n)."""
        idx = (np.arange(lo, lo + n) % self.period_cells + self.period_cells) % self.period_cells
        return self.values[idx]

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PeriodicStepFunction):
            return NotImplemented
        return (
            self.step == other.step
            and self.period_cells == other.period_cells
            and bool(np.all(self.values == other.values))
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"PeriodicStepFunction(step={self.step}, period={self.period})"

    def to_json_obj(self) -> dict:
        return {
            "period_cells": self.period_cells,
            "re": [float(v) for v in self.values.real],
            "im": [float(v) for v in self.values.imag],
        }

    @classmethod
    def from_json_obj(cls, grid: Union[GridSpec, Fraction], obj: dict) -> "PeriodicStepFunction":
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
        return cls(grid, int(obj["period_cells"]), re + 1j * im)


class DiscreteGaborSystem:
    """Window on the cyclic group Z_N with shift step a_d and L modulation
    levels. Constraints: a_d | N, L | N, and a_d * L <= N (discrete density)."""

    __slots__ = ("N", "a_d", "L", "window")

    def __init__(self, N: int, a_d: int, L: int, window) -> None:
        if N < 1 or a_d < 1 or L < 1:
            raise LatticeError("N, a_d, L must be positive")
        if N % a_d != 0:
            raise LatticeError(f"shift step a_d={a_d} must divide N={N}")
        if N % L != 0:
            raise LatticeError(f"modulation count L={L} must divide N={N}")
        if a_d * L > N:
            raise LatticeError(f"overcritical discrete lattice: a_d*L={a_d * L} > N={N}")
        w = np.ascontiguousarray(window, dtype=complex)
        if w.shape != (N,):
            raise LatticeError("window must have exactly N samples")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "N", int(N))
        object.__setattr__(self, "a_d", int(a_d))
        object.__setattr__(self, "L", int(L))
        object.__setattr__(self, "window", w)

    def __setattr__(self, name, value):
        raise AttributeError("DiscreteGaborSystem is immutable")

    @property
    def num_shifts(self) -> int:
        return self.N // self.a_d

    @property
    def num_atoms(self) -> int:
        return self.num_shifts * self.L

    def __repr__(self) -> str:
        return f"DiscreteGaborSystem(N={self.N}, a_d={self.a_d}, L={self.L})"

    def to_json_obj(self) -> dict:
        return {
            "N": self.N,
            "a": self.a_d,
            "L": self.L,
            "re": [float(v) for v in self.window.real],
            "im": [float(v) for v in self.window.imag],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "DiscreteGaborSystem":
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
        return cls(int(obj["N"]), int(obj["a"]), int(obj["L"]), re + 1j * im)


def translate(f: StepFunction, shift: Union[int, Fraction, str]) -> StepFunction:
    """Time shift T_s f(t) = f(t - s); s must be a whole number of cells."""
    s = as_rational(shift)
    offset = s / f.step
    if offset.denominator != 1:
        raise GridError(f"shift {s} is not a whole number of grid cells")
    return StepFunction(f.grid, f.lo + int(offset), f.values)


def modulated_inner_product(f: StepFunction, g: StepFunction, y: float) -> complex:
    """<f, E_y g> = integral of f(t) * conj(g(t)) * exp(-2 pi i y t) dt.

    Exact per cell up to rounding: the integral of exp(-2 pi i y t) over the
    cell [t0, t0 + step) is step * sinc(y*step) * exp(-i pi y step) *
    exp(-2 pi i y t0), which is stable for all y. The y = 0 branch reduces to
    step * sum(f * conj(g)) bit-exactly.
    """
    if f.step != g.step:
        raise GridError("grid mismatch; resample to a common refinement first")
    lo = max(f.lo, g.lo)
    hi = min(f.hi, g.hi)
    if lo >= hi:
        return 0j
    fv = f.values[lo - f.lo : hi - f.lo]
    gv = g.values[lo - g.lo : hi - g.lo]
    prod = fv * np.conj(gv)
    d = float(f.step)
    y = float(y)
    if y == 0.0:
        return d * csum(prod)
    # cell [t0, t0+d): integral = d * sinc(y d) * exp(-i pi y d) * exp(-2 pi i y t0)
    kernel = d * np.sinc(y * d) * np.exp(-1j * math.pi * y * d)
    t0 = d * np.arange(lo, hi)
    phases = np.exp(-2j * math.pi * y * t0)
    return kernel * csum(prod * phases)


def step_fourier(f: StepFunction, xi) -> np.ndarray:
    """Fourier transform hat f(xi) = integral f(t) exp(-2 pi i xi t) dt.

    Closed form per cell (the removable singularity at xi = 0 is handled by
    the sinc limit); vectorized over an array of frequencies.
    """
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if not f.values.size:
        out = np.zeros(xi_arr.shape, dtype=complex)
        return out if np.ndim(xi) else out[0]
    d = float(f.step)
    kernel = d * np.sinc(xi_arr * d) * np.exp(-1j * math.pi * xi_arr * d)
    cells = np.arange(f.lo, f.hi)
    phases = np.exp(-2j * math.pi * d * np.outer(xi_arr, cells))
    out = kernel * (phases @ f.values)
    return out if np.ndim(xi) else out[0]


def discrete_atom(sys: DiscreteGaborSystem, m: int, n: int) -> np.ndarray:
    """Atom (m, n): j -> exp(2 pi i m j / L) * window((j - n*a_d) mod N)."""
    if not (0 <= m < sys.L):
        raise IndexError(f"modulation index m={m} out of range [0, {sys.L})")
    if not (0 <= n < sys.num_shifts):
        raise IndexError(f"shift index n={n} out of range [0, {sys.num_shifts})")
    j = np.arange(sys.N)
    phase = np.exp(2j * math.pi * m * j / sys.L)
    return phase * np.roll(sys.window, n * sys.a_d)


def lattice_to_json(lat: LatticeParams) -> dict:
    return {
        "a": [lat.a.numerator, lat.a.denominator],
        "b": [lat.b.numerator, lat.b.denominator],
    }


def lattice_from_json(obj: dict) -> LatticeParams:
    a_num, a_den = obj["a"]
    b_num, b_den = obj["b"]
    return LatticeParams(Fraction(a_num, a_den), Fraction(b_num, b_den))
