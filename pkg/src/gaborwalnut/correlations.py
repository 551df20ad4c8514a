"""Correlation functions G_k and the summability conditions built on them.

G_k(t) = sum_n g(t - n a) conj(g(t - n a - k/b)) is a-periodic; on the common
grid it is an exact finite sum per cell. The checks here (CC, uniform CC,
Condition A, Wiener amalgam norms, the A_f/B_f weights) are the paper-side
counterparts of the discrete oracle's eigenvalue bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .model import (
    GridError,
    GridSpec,
    LatticeError,
    LatticeParams,
    PeriodicStepFunction,
    StepFunction,
    as_rational,
    lattice_cells,
    lattice_from_json,
    lattice_to_json,
    modulated_inner_product,
    translate,
)

__all__ = [
    "CorrelationFamily",
    "ConditionReport",
    "ConditionASums",
    "WienerNormReport",
    "AfBfWeights",
    "correlation_family",
    "cc_check",
    "ucc_check",
    "condition_a_partial_sums",
    "wexler_raz_check",
    "wiener_norm",
    "af_bf_weights",
    "cesaro_mean",
]


def _fold_periodic(lo: int, arr: np.ndarray, period: int) -> np.ndarray:
    """Sum arr onto Z_period: out[c] = sum of arr[j] over lo+j = c (mod period)."""
    out = np.zeros(period, dtype=arr.dtype)
    idx = (lo + np.arange(arr.size)) % period
    np.add.at(out, idx, arr)
    return out


class CorrelationFamily:
    """The nonzero correlation functions of a window, stored per k over one
    a-period. exact_tail means every omitted k is exactly zero (compactly
    supported window); assembled truncations of infinite constructions set it
    to False and all downstream verdicts degrade to inconclusive-truncated.
    """

    __slots__ = ("lattice", "grid", "entries", "exact_tail")

    def __init__(
        self,
        lattice: LatticeParams,
        grid: GridSpec,
        entries: dict,
        exact_tail: bool,
        validate: bool = True,
    ) -> None:
        s_a, s_b = lattice_cells(lattice, grid)
        ents = {}
        for k, fn in entries.items():
            if not isinstance(fn, PeriodicStepFunction):
                raise GridError("entries must be PeriodicStepFunction values")
            if fn.step != grid.step or fn.period_cells != s_a:
                raise GridError(f"entry {k} is not a-periodic on the family grid")
            if np.any(fn.values != 0):
                ents[int(k)] = fn
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "entries", ents)
        object.__setattr__(self, "exact_tail", bool(exact_tail))
        if validate:
            self._check_hermitian(s_a, s_b)

    def __setattr__(self, name, value):
        raise AttributeError("CorrelationFamily is immutable")

    def _check_hermitian(self, s_a: int, s_b: int) -> None:
        # G_{-k}(t) = conj(G_k(t + k/b)) cellwise; k/b shifts by k*s_b cells
        scale = 1.0 + max((e.sup for e in self.entries.values()), default=0.0)
        for k, fn in self.entries.items():
            other = self.entries.get(-k)
            mirrored = np.conj(np.roll(fn.values, -((k * s_b) % s_a)))
            ref = other.values if other is not None else np.zeros_like(mirrored)
            if not np.allclose(ref, mirrored, atol=1e-9 * scale, rtol=0):
                raise LatticeError(f"entries break Hermitian symmetry at k={k}")

    # -- geometry ---------------------------------------------------------------

    @property
    def s_a(self) -> int:
        return lattice_cells(self.lattice, self.grid)[0]

    @property
    def s_b(self) -> int:
        return lattice_cells(self.lattice, self.grid)[1]

    @property
    def k_range(self) -> tuple:
        return tuple(sorted(self.entries))

    def entry(self, k: int) -> PeriodicStepFunction:
        fn = self.entries.get(k)
        if fn is None:
            return PeriodicStepFunction(self.grid, self.s_a, np.zeros(self.s_a))
        return fn

    def magnitude_table(self) -> tuple:
        """(sorted ks, |G_k[c]| matrix of shape (len(ks), s_a))."""
        ks = self.k_range
        if not ks:
            return (), np.zeros((0, self.s_a))
        return ks, np.abs(np.stack([self.entries[k].values for k in ks]))

    # -- serialization ------------------------------------------------------------

    def to_json_obj(self) -> dict:
        obj = lattice_to_json(self.lattice)
        if self.grid.step.numerator != 1:
            raise GridError("only unit-fraction grid steps serialize to grid_den")
        obj["grid_den"] = self.grid.step.denominator
        obj["entries"] = {str(k): fn.to_json_obj() for k, fn in sorted(self.entries.items())}
        obj["exact_tail"] = self.exact_tail
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "CorrelationFamily":
        lat = lattice_from_json(obj)
        grid = GridSpec(Fraction(1, int(obj["grid_den"])))
        entries = {
            int(k): PeriodicStepFunction.from_json_obj(grid, sub)
            for k, sub in obj["entries"].items()
        }
        return cls(lat, grid, entries, bool(obj["exact_tail"]))


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of a summability check; tail_profile rows are (K, sup-tail)."""

    condition: str
    bound: float
    tail_profile: tuple
    verdict: str
    note: str = ""
    details: Optional[dict] = None

    def to_json_obj(self) -> dict:
        out = {
            "condition": self.condition,
            "bound": self.bound,
            "tail_profile": [[int(k), float(v)] for k, v in self.tail_profile],
            "verdict": self.verdict,
            "note": self.note,
        }
        if self.details is not None:
            out["details"] = self.details
        return out


def correlation_family(
    g: StepFunction,
    lat: LatticeParams,
    h: Optional[StepFunction] = None,
) -> CorrelationFamily:
    """All nonzero G_k of the window g (or cross-correlations of g against h).

    Exact per cell: G_k restricted to [0, a) is the fold of the pointwise
    product g * conj(T_{k/b} h) onto Z_{s_a}. Compact support makes the k
    range finite and the omitted tail exactly zero.
    """
    auto = h is None
    if h is None:
        h = g
    if g.step != h.step:
        raise GridError("windows must share a grid")
    s_a, s_b = lattice_cells(lat, g.grid)
    entries = {}
    if g.values.size and h.values.size:
        k_lo = math.floor((g.lo - h.hi) / s_b) + 1
        k_hi = math.ceil((g.hi - h.lo) / s_b) - 1
        for k in range(k_lo, k_hi + 1):
            lo = max(g.lo, h.lo + k * s_b)
            hi = min(g.hi, h.hi + k * s_b)
            if lo >= hi:
                continue
            prod = g.cell_values(lo, hi - lo) * np.conj(h.cell_values(lo - k * s_b, hi - lo))
            vals = _fold_periodic(lo, prod, s_a)
            if np.any(vals != 0):
                entries[k] = PeriodicStepFunction(g.grid, s_a, vals)
    return CorrelationFamily(lat, g.grid, entries, exact_tail=True, validate=auto)


def _tail_profile(fam: CorrelationFamily) -> tuple:
    """Sup-tails T(K) = sup_t sum_{|k| >= K} |G_k(t)| for K = 0 .. k_max+1."""
    ks, mags = fam.magnitude_table()
    k_max = max((abs(k) for k in ks), default=0)
    profile = []
    for bignum in range(k_max + 2):
        sel = [i for i, k in enumerate(ks) if abs(k) >= bignum]
        tail = float(np.max(mags[sel].sum(axis=0))) if sel else 0.0
        profile.append((bignum, tail))
    return tuple(profile)


def cc_check(fam: CorrelationFamily) -> ConditionReport:
    """sup_t sum_k |G_k(t)|, exact over cells; finite iff the CC-condition
    holds for the represented family."""
    ks, mags = fam.magnitude_table()
    bound = float(np.max(mags.sum(axis=0))) if ks else 0.0
    profile = _tail_profile(fam)
    if fam.exact_tail:
        verdict, note = "holds", ""
    else:
        verdict, note = "inconclusive-truncated", "truncated family: bound is a lower estimate"
    return ConditionReport("CC", bound, profile, verdict, note)


def ucc_check(fam: CorrelationFamily, epsilons: Sequence[float]) -> ConditionReport:
    """Least K with sup_t sum_{|k| >= K} |G_k(t)| < eps, per requested eps."""
    profile = _tail_profile(fam)
    ranks = []
    for eps in epsilons:
        hit = next((bignum for bignum, tail in profile if tail < eps), None)
        ranks.append([float(eps), hit])
    bound = profile[0][1] if profile else 0.0
    if fam.exact_tail:
        verdict, note = "holds", ""
    else:
        verdict = "inconclusive-truncated"
        note = "non-uniform onset possible beyond truncation"
    return ConditionReport("UCC", bound, profile, verdict, note, details={"epsilon_K": ranks})


@dataclass(frozen=True)
class ConditionASums:
    """|<g, E_{l/a} T_{k/b} g>| over the adjoint-lattice rectangle, with the
    running totals of growing square partial sums."""

    ks: tuple
    ls: tuple
    magnitudes: np.ndarray  # shape (2K+1, 2L+1)
    running: tuple  # ((r, total over |k|,|l| <= r), ...)

    @property
    def total(self) -> float:
        return self.running[-1][1] if self.running else 0.0


def condition_a_partial_sums(
    g: StepFunction, lat: LatticeParams, K: int, L: int
) -> ConditionASums:
    """Rectangular partial sums of the Tolimieri-Orr series over the adjoint
    lattice: time shifts k/b, modulations l/a."""
    inv_b = 1 / lat.b
    inv_a = 1 / lat.a
    ks = tuple(range(-K, K + 1))
    ls = tuple(range(-L, L + 1))
    mags = np.zeros((2 * K + 1, 2 * L + 1))
    for i, k in enumerate(ks):
        shifted = translate(g, k * inv_b)
        for j, ell in enumerate(ls):
            mags[i, j] = abs(modulated_inner_product(g, shifted, float(ell * inv_a)))
    running = []
    for r in range(max(K, L) + 1):
        ki = min(r, K)
        li = min(r, L)
        block = mags[K - ki : K + ki + 1, L - li : L + li + 1]
        running.append((r, float(block.sum())))
    return ConditionASums(ks, ls, mags, tuple(running))


def wexler_raz_check(
    g: StepFunction, h: StepFunction, lat: LatticeParams, K: int, L: int
) -> float:
    """Worst biorthogonality violation max |<h, E_{l/a} T_{k/b} g> - ab d_k0 d_l0|
    over |k| <= K, |l| <= L; zero certifies duality on the tested rectangle.
    Time shifts run over the adjoint step 1/b, modulations over 1/a, matching
    the pairing in condition_a_partial_sums."""
    inv_b = 1 / lat.b
    inv_a = 1 / lat.a
    ab = float(lat.ab)
    worst = 0.0
    for k in range(-K, K + 1):
        shifted = translate(g, k * inv_b)
        for ell in range(-L, L + 1):
            val = modulated_inner_product(h, shifted, float(ell * inv_a))
            target = ab if (k == 0 and ell == 0) else 0.0
            worst = max(worst, abs(val - target))
    return worst


@dataclass(frozen=True)
class WienerNormReport:
    """Exact W(L^inf, l^1) norm with the per-block profile used to diagnose
    divergence of truncated infinite constructions."""

    value: float
    blocks: tuple  # ((block index n, sup over block), ...)
    partial_sums: tuple

    def __float__(self) -> float:
        return self.value


def wiener_norm(g: StepFunction, window_len: Union[Fraction, int, str]) -> WienerNormReport:
    """Sum over n of sup |g| on [n*window_len, (n+1)*window_len)."""
    a_prime = as_rational(window_len)
    if a_prime <= 0:
        raise GridError("block length must be positive")
    s = a_prime / g.step
    if s.denominator != 1:
        raise GridError(f"block length {a_prime} is not a whole number of cells")
    s = int(s)
    if not g.values.size:
        return WienerNormReport(0.0, (), ())
    n_lo = math.floor(g.lo / s)
    n_hi = math.ceil(g.hi / s)
    blocks = []
    for n in range(n_lo, n_hi):
        sup = float(np.max(np.abs(g.cell_values(n * s, s))))
        blocks.append((n, sup))
    sums = np.cumsum([b[1] for b in blocks])
    return WienerNormReport(float(sums[-1]), tuple(blocks), tuple(float(x) for x in sums))


@dataclass(frozen=True)
class AfBfWeights:
    """A_f = sup_l sum_k |f(t - l a - k/b)| and B_f with the roles of k and l
    swapped, both a-periodic, plus the certificate integral of max(A,B)^2."""

    a_f: PeriodicStepFunction
    b_f: PeriodicStepFunction
    integral_max_sq: float


def af_bf_weights(f: StepFunction, lat: LatticeParams) -> AfBfWeights:
    s_a, s_b = lattice_cells(lat, f.grid)
    absf = np.abs(f.values)
    if absf.size:
        # row sums over k are s_b-periodic; over l are s_a-periodic
        row_k = _fold_periodic(f.lo, absf, s_b)
        row_l = _fold_periodic(f.lo, absf, s_a)
    else:
        row_k = np.zeros(s_b)
        row_l = np.zeros(s_a)
    g = math.gcd(s_a, s_b)
    # sup over the lattice orbit = max over the residue class mod gcd(s_a, s_b)
    max_k = np.array([np.max(row_k[r::g]) for r in range(g)])
    max_l = np.array([np.max(row_l[r::g]) for r in range(g)])
    cells = np.arange(s_a)
    a_vals = max_k[cells % g]
    b_vals = max_l[cells % g]
    integral = float(f.step) * float(np.sum(np.maximum(a_vals, b_vals) ** 2))
    return AfBfWeights(
        PeriodicStepFunction(f.grid, s_a, a_vals),
        PeriodicStepFunction(f.grid, s_a, b_vals),
        integral,
    )


def cesaro_mean(fam: CorrelationFamily, n: int, nu0: float) -> tuple:
    """Fejer mean sum_{|k|<n} (1 - |k|/n) G_k(t) e^{-2 pi i k nu0} at a = b = 1.

    Returns (real part as a PeriodicStepFunction, max |imaginary residue|).
    """
    if fam.lattice.a != 1 or fam.lattice.b != 1:
        raise LatticeError("Cesaro means are defined here only for a = b = 1")
    if n < 1:
        raise ValueError("n must be positive")
    period = fam.s_a
    acc = np.zeros(period, dtype=complex)
    for k, fn in fam.entries.items():
        if abs(k) >= n:
            continue
        weight = (1.0 - abs(k) / n) * np.exp(-2j * math.pi * k * nu0)
        acc += weight * fn.values
    residual = float(np.max(np.abs(acc.imag))) if period else 0.0
    mean = PeriodicStepFunction(fam.grid, period, acc.real.astype(complex))
    return mean, residual
