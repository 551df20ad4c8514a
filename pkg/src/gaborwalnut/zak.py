"""Zak transform of step windows and windows prescribed by Zak data.

(Z_lam f)(t, nu) = lam^{1/2} sum_k f(lam(t - k)) e^{2 pi i k nu}. For a step
window the sum is finite at every point; restricted to the unit square the
transform is cellwise constant in t (on a fine enough t grid) and a
trigonometric polynomial in nu. Counterexample windows travel the opposite
way: their Zak data is prescribed cellwise on the unit square and everything
time-domain is recovered from nu-Fourier coefficients in closed form.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple, Union

import numpy as np

from .correlations import CorrelationFamily
from .model import (
    GridError,
    GridSpec,
    LatticeError,
    LatticeParams,
    PeriodicStepFunction,
    StepFunction,
    as_rational,
    csum,
)

__all__ = [
    "ZakWindow",
    "ZakSampleGrid",
    "zak_point",
    "zak_transform",
    "window_from_zak",
    "materialize_window",
    "gk_from_zak",
    "zak_modulus_bound",
]


def _exact_mod1(nu: Union[int, float, Fraction]) -> Fraction:
    """nu mod 1 in exact arithmetic. Floats enter by their exact binary value,
    so nu and nu + 1 reduce to bit-identical phases whenever they are exact."""
    frac = nu if isinstance(nu, Fraction) else Fraction(nu)
    return frac - math.floor(frac)


class ZakWindow:
    """Zak data prescribed cellwise on the unit square.

    values[i, j] is the constant on [i/T, (i+1)/T) x [j/n, (j+1)/n) with
    T = t_cells, n = nu_cells; the extension to the plane follows the
    quasi-periodicity relations. When the data stands for a squared modulus
    the values must be real and nonnegative (not enforced here; the consumers
    that need it check).
    """

    __slots__ = ("t_cells", "nu_cells", "values", "lam")

    def __init__(self, values, lam: Union[int, Fraction, str] = 1) -> None:
        arr = np.array(values, dtype=complex)
        if arr.ndim != 2 or not arr.size:
            raise GridError("Zak data must be a nonempty 2-d array")
        arr.setflags(write=False)
        lam = as_rational(lam)
        if lam <= 0:
            raise LatticeError("lambda must be positive")
        object.__setattr__(self, "t_cells", int(arr.shape[0]))
        object.__setattr__(self, "nu_cells", int(arr.shape[1]))
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "lam", lam)

    def __setattr__(self, name, value):  # immutable after construction
        raise AttributeError("ZakWindow is immutable")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZakWindow):
            return NotImplemented
        return (
            self.lam == other.lam
            and self.values.shape == other.values.shape
            and bool(np.all(self.values == other.values))
        )

    __hash__ = None

    def cell(self, i: int, j: int) -> complex:
        return complex(self.values[i % self.t_cells, j % self.nu_cells])

    def value_at(self, t, nu) -> complex:
        """Quasi-periodic extension to the plane: Z(t+1, nu) = e^{2 pi i nu}
        Z(t, nu) and Z(t, nu+1) = Z(t, nu), with exact cell lookup."""
        t = as_rational(t)
        nur = _exact_mod1(nu)
        m = math.floor(t)
        i = math.floor((t - m) * self.t_cells)
        j = math.floor(nur * self.nu_cells)
        base = complex(self.values[i, j])
        if m == 0:
            return base
        return cmath.exp(2j * math.pi * m * float(nur)) * base

    def squared_modulus(self) -> "ZakWindow":
        return ZakWindow(np.abs(self.values) ** 2, self.lam)

    # -- serialization ----------------------------------------------------------

    def to_json_obj(self) -> dict:
        if self.lam != 1:
            raise LatticeError("only lambda = 1 Zak data serializes")
        flat = self.values.reshape(-1)
        return {
            "t_cells": self.t_cells,
            "nu_cells": self.nu_cells,
            "re": [float(v) for v in flat.real],
            "im": [float(v) for v in flat.imag],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ZakWindow":
        t_cells = int(obj["t_cells"])
        nu_cells = int(obj["nu_cells"])
        arr = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
        if arr.size != t_cells * nu_cells:
            raise GridError("re/im length does not match t_cells * nu_cells")
        return cls(arr.reshape(t_cells, nu_cells))


@dataclass(frozen=True)
class ZakSampleGrid:
    """Samples of Z_lam f at t_i = (i + 1/2)/t_points, nu_j = j/nu_points,
    with the unitarity and quasi-periodicity residuals attached."""

    lam: Fraction
    t_points: int
    nu_points: int
    values: np.ndarray
    diagnostics: dict


def _k_window(f: StepFunction, lam: Fraction, t: Fraction) -> Tuple[int, int]:
    # f(lam(t-k)) can be nonzero only for lo*step <= lam(t-k) < hi*step
    lo_x = f.lo * f.step
    hi_x = f.hi * f.step
    return math.floor(t - hi_x / lam) + 1, math.floor(t - lo_x / lam)


def _gather(f: StepFunction, lam: Fraction, t: Fraction) -> Tuple[np.ndarray, np.ndarray]:
    """(k indices, f(lam(t-k)) values) over the support range at time t."""
    if not f.values.size:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=complex)
    k_min, k_max = _k_window(f, lam, t)
    ks = np.arange(k_min, k_max + 1)
    vs = np.array([f.value_at(lam * (t - k)) for k in range(k_min, k_max + 1)], dtype=complex)
    return ks, vs


def _phase_row(sqrt_lam: float, ks: np.ndarray, vs: np.ndarray, nu_fracs) -> np.ndarray:
    """sqrt_lam * sum_k v_k e^{2 pi i k nu} with every nu reduced mod 1 first."""
    nur = np.array([float(_exact_mod1(x)) for x in nu_fracs])
    if not ks.size:
        return np.zeros(nur.size, dtype=complex)
    return sqrt_lam * (vs @ np.exp(2j * np.pi * np.outer(ks, nur)))


def zak_point(f: StepFunction, lam, t, nu) -> complex:
    """(Z_lam f)(t, nu) as the exact finite sum over the support range of k.

    nu is reduced mod 1 in exact arithmetic before any phase is formed, so
    nu-periodicity holds bit-exactly for exact rational inputs.
    """
    lam = as_rational(lam)
    if lam <= 0:
        raise LatticeError("lambda must be positive")
    t = as_rational(t)
    if not f.values.size:
        return 0j
    nur = float(_exact_mod1(nu))
    k_min, k_max = _k_window(f, lam, t)
    terms = []
    for k in range(k_min, k_max + 1):
        v = f.value_at(lam * (t - k))
        if v:
            terms.append(v * cmath.exp(2j * math.pi * k * nur))
    return math.sqrt(float(lam)) * csum(terms)


def zak_transform(f: StepFunction, lam, t_points: int, nu_points: int) -> ZakSampleGrid:
    """Sample Z_lam f at midpoints t_i = (i + 1/2)/t_points, nu_j = j/nu_points.

    In t the transform is a step function with breakpoints on (step/lam) Z, so
    the midpoint samples represent their whole t-cell exactly as long as
    t_points * step / lam is an integer (else the sampling is ambiguous and
    refused). In nu each row is a trigonometric polynomial; the attached
    Riemann mean of |Z|^2 equals the squared norm exactly once nu_points
    exceeds the polynomial's frequency span.
    """
    lam = as_rational(lam)
    if lam <= 0:
        raise LatticeError("lambda must be positive")
    if t_points < 1 or nu_points < 1:
        raise ValueError("sample counts must be positive")
    ratio = Fraction(t_points) * f.step / lam
    if f.values.size and ratio.denominator != 1:
        raise GridError(
            f"incompatible lambda: t_points*step/lambda = {ratio} is not an integer"
        )
    sqrt_lam = math.sqrt(float(lam))
    nu_fracs = [Fraction(j, nu_points) for j in range(nu_points)]
    nu_floats = np.array([float(x) for x in nu_fracs])
    vals = np.zeros((t_points, nu_points), dtype=complex)
    rows = []
    for i in range(t_points):
        t = Fraction(2 * i + 1, 2 * t_points)
        ks, vs = _gather(f, lam, t)
        rows.append((t, ks, vs))
        vals[i] = _phase_row(sqrt_lam, ks, vs, nu_fracs)

    # quasi-periodicity residuals recomputed from the definition, not reindexed
    quasi_t = 0.0
    shift_phase = np.exp(2j * np.pi * nu_floats)
    nu_shifted = [x + 1 for x in nu_fracs]
    nu_period = 0.0
    for i, (t, ks, vs) in enumerate(rows):
        ks2, vs2 = _gather(f, lam, t + 1)
        row_t1 = _phase_row(sqrt_lam, ks2, vs2, nu_fracs)
        quasi_t = max(quasi_t, float(np.max(np.abs(row_t1 - shift_phase * vals[i]), initial=0.0)))
        row_n1 = _phase_row(sqrt_lam, ks, vs, nu_shifted)
        nu_period = max(nu_period, float(np.max(np.abs(row_n1 - vals[i]), initial=0.0)))

    riemann = float(np.mean(np.abs(vals) ** 2)) if vals.size else 0.0
    diagnostics = {
        "quasi_t_residual": quasi_t,
        "nu_period_residual": nu_period,
        "riemann_norm_sq": riemann,
        "window_norm_sq": f.norm_sq,
        "unitarity_gap": abs(riemann - f.norm_sq),
    }
    return ZakSampleGrid(lam, t_points, nu_points, vals, diagnostics)


def window_from_zak(zw: ZakWindow, k_range: Tuple[int, int]) -> Dict[int, np.ndarray]:
    """Time values g(lam(t - k)) per t-cell for k in the inclusive range.

    These are the nu-Fourier coefficients of the prescribed data against
    e^{-2 pi i k nu}, integrated in closed form over the nu cells (scaled by
    lam^{-1/2}); no quadrature.
    """
    k_lo, k_hi = int(k_range[0]), int(k_range[1])
    if k_lo > k_hi:
        raise ValueError("empty k range")
    n = zw.nu_cells
    # column r of the FFT is sum_j Z[:, j] e^{-2 pi i j r / n}
    fft_cols = np.fft.fft(zw.values, axis=1)
    scale = 1.0 / math.sqrt(float(zw.lam))
    out = {}
    for k in range(k_lo, k_hi + 1):
        if k % n == 0:
            # whole cycles per cell integrate to exactly 0 unless k = 0
            w = 1.0 / n if k == 0 else 0.0
        else:
            w = (1.0 - cmath.exp(-2j * math.pi * k / n)) / (2j * math.pi * k)
        out[k] = scale * w * fft_cols[:, k % n]
    return out


def materialize_window(zw: ZakWindow, k_trunc: int = 512) -> StepFunction:
    """Assemble g on the time grid of step lam/t_cells from the coefficients
    with |k| <= k_trunc.

    Exact when the data is a nu-trigonometric polynomial resolved within the
    truncation; genuinely nu-step data leaves a dropped 1/k coefficient tail.
    """
    if k_trunc < 0:
        raise ValueError("truncation order must be nonnegative")
    coeffs = window_from_zak(zw, (-k_trunc, k_trunc))
    t_cells = zw.t_cells
    step = zw.lam / t_cells
    lo = -k_trunc * t_cells
    arr = np.zeros((2 * k_trunc + 1) * t_cells, dtype=complex)
    for k, cell_vals in coeffs.items():
        start = -k * t_cells - lo  # t-cell i of shift k lands in global cell i - k*t_cells
        arr[start : start + t_cells] = cell_vals
    return StepFunction(GridSpec(step), lo, arr)


def _gk_coefficients_from_cells(power: np.ndarray, k_max: int) -> Dict[int, np.ndarray]:
    """Closed-form G_k rows of a nu-step |Z|^2 array: the coefficient against
    e^{+2 pi i k nu} of each t-row, for |k| <= k_max."""
    n = power.shape[1]
    # column r of n*ifft is sum_j P[:, j] e^{+2 pi i j r / n}
    inv_cols = power.shape[1] * np.fft.ifft(power, axis=1)
    out = {}
    for k in range(-k_max, k_max + 1):
        if k % n == 0:
            # whole cycles per cell integrate to exactly 0 unless k = 0
            w = 1.0 / n if k == 0 else 0.0
        else:
            w = (cmath.exp(2j * math.pi * k / n) - 1.0) / (2j * math.pi * k)
        out[k] = w * inv_cols[:, k % n]
    return out


def gk_from_zak(source: Union[ZakWindow, ZakSampleGrid], k_max: int = 512) -> CorrelationFamily:
    """Correlation family of the a = b = 1 system whose |Zg|^2 is the given data.

    ZakWindow source: |zw|^2 is a nu-step function and G_k(t) = integral of
    |zw|^2 e^{+2 pi i k nu} d nu is closed-form per t-cell; the family is
    truncated at |k| <= k_max (exact_tail only when the data is nu-constant,
    where the single coefficient is the whole series). ZakSampleGrid source:
    the coefficient integrals become discrete nu-means, exact as soon as the
    sample count exceeds the frequency span of the trigonometric polynomial
    |Zf|^2.
    """
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    if isinstance(source, ZakWindow):
        if source.lam != 1:
            raise LatticeError("correlation extraction is defined on lambda = 1 data")
        power = np.abs(source.values) ** 2
        t_cells = source.t_cells
        coeffs = _gk_coefficients_from_cells(power, k_max)
        exact_tail = source.nu_cells == 1
    elif isinstance(source, ZakSampleGrid):
        if source.lam != 1:
            raise LatticeError("correlation extraction is defined on lambda = 1 data")
        power = np.abs(source.values) ** 2
        t_cells = source.t_points
        n = source.nu_points
        # discrete means alias k and k +/- n; beyond the Nyquist index the
        # columns carry no new information, so the range is clamped there
        k_eff = min(k_max, n // 2)
        means = np.fft.ifft(power, axis=1)
        coeffs = {k: means[:, k % n] for k in range(-k_eff, k_eff + 1)}
        exact_tail = False
    else:
        raise TypeError("source must be a ZakWindow or ZakSampleGrid")
    grid = GridSpec(Fraction(1, t_cells), s_a=t_cells, s_b=t_cells)
    lat = LatticeParams(Fraction(1), Fraction(1))
    entries = {
        k: PeriodicStepFunction(grid, t_cells, v)
        for k, v in coeffs.items()
        if np.any(v != 0)
    }
    return CorrelationFamily(lat, grid, entries, exact_tail=exact_tail, validate=True)


def zak_modulus_bound(zw: ZakWindow) -> float:
    """max over cells of |zw|^2: a necessary lower estimate for any upper
    frame bound of the represented (g, 1, 1) system."""
    return float(np.max(np.abs(zw.values) ** 2))
