"""Partial-sum analysis of the weighted-translate form of the frame operator.

The frame operator of a rational-lattice translation/modulation system acts on
a signal as a series of weighted translates,

    S f = b^{-1} sum_k (T_{k/b} f) G_k,

where the G_k are the window's correlation functions.  This module studies the
finite truncations of that series:

* apply_walnut evaluates any truncation exactly, cell by cell;
* wh_identity_terms splits <Sf, f> into its diagonal and off-diagonal
  integrals, an independent route to the same number;
* multiplier_norm_a1b1 / multiplier_norm_rational bracket the L^2 operator
  norm of a truncation between a sampled lower bound and a coefficient-sum
  upper bound, via the unitary equivalence with multiplication operators in
  Zak coordinates;
* convergence_diagnose sweeps truncation families (symmetric, rectangular,
  subset/signed) and fits growth laws to the resulting norm profiles;
* thm610_certificate certifies absolute convergence of the series against a
  closed-form weight integral;
* cc_implies_unconditional_check stress-tests the a-priori truncation bound
  ||S_M f|| <= p * B * ||f|| that a finite coefficient sum implies.

Prefactor convention: truncations are the bare sums sum_{k in M} theta_k
(T_{k/b} f) G_k.  The b^{-1} of the full operator is an explicit flag,
default ON for apply_walnut and multiplier_norm_rational (so full truncations
reproduce S and its norm) and OFF inside the regime sweeps, which study the
bare partial sums.

Norm brackets: at a = b = 1 the truncated operator is unitarily equivalent to
multiplication by m(t, nu) = sum_k theta_k G_k(t) e^{-2 pi i k nu}, so its
norm is ess sup |m|; everything is cellwise constant in t, so the t-sup is
exact and only nu is sampled.  The lower end of a bracket is the max of |m|
over a uniform nu grid, the upper end the coefficient sum sup_t sum_k
|theta_k G_k(t)|.  For rational ab = p/q with p > 1 the same reduction
produces a p x p matrix symbol acting on vector-valued Zak coordinates; the
bracket then uses sampled spectral norms below and summed coefficient-matrix
spectral norms above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import curve_fit

from .model import (
    GridError,
    LatticeError,
    LatticeParams,
    StepFunction,
    csum,
)
from .correlations import (
    CorrelationFamily,
    ConditionReport,
    af_bf_weights,
    cc_check,
    correlation_family,
    wiener_norm,
)

__all__ = [
    "PartialSumSpec",
    "MultiplierBracket",
    "GrowthFit",
    "DiagnosticsReport",
    "UnconditionalReport",
    "apply_walnut",
    "wh_identity_terms",
    "multiplier_norm_a1b1",
    "multiplier_norm_rational",
    "fit_growth",
    "convergence_diagnose",
    "thm610_certificate",
    "cc_implies_unconditional_check",
]

# nu0 used by the alignment strategies alongside 0: a badly approximable
# fraction so that modulation phases never resonate with small denominators
GOLDEN_FRACTION = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# truncation specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartialSumSpec:
    """A finite truncation of the weighted-translate series.

    mode 'symmetric'  : indices -K..K, unit weights
    mode 'rectangular': indices -L..K, unit weights (one-sided via L = 0)
    mode 'subset'     : an arbitrary finite index set, unit weights
    mode 'signed'     : a finite map k -> theta_k; 0 and +-1 are the basic
                        weights, unit complex phases are accepted for the
                        alignment strategies

    terms holds the normalized (k, theta_k) pairs sorted by k with zero
    weights dropped; scale is the size measure used on profile axes (the
    radius K for symmetric/rectangular specs, the term count otherwise).
    """

    mode: str
    terms: Tuple[Tuple[int, complex], ...]
    scale: int

    _MODES = ("symmetric", "rectangular", "subset", "signed")

    def __post_init__(self) -> None:
        if self.mode not in self._MODES:
            raise ValueError(f"unknown truncation mode {self.mode!r}")

    @classmethod
    def symmetric(cls, k_max: int) -> "PartialSumSpec":
        if k_max < 0:
            raise ValueError("symmetric radius must be nonnegative")
        terms = tuple((k, (1 + 0j)) for k in range(-k_max, k_max + 1))
        return cls("symmetric", terms, max(k_max, 1))

    @classmethod
    def rectangular(cls, k_pos: int, k_neg: int) -> "PartialSumSpec":
        """Indices -k_neg .. k_pos inclusive."""
        if k_pos < 0 or k_neg < 0:
            raise ValueError("rectangular radii must be nonnegative")
        terms = tuple((k, (1 + 0j)) for k in range(-k_neg, k_pos + 1))
        return cls("rectangular", terms, max(k_pos, k_neg, 1))

    @classmethod
    def subset(cls, indices: Iterable[int]) -> "PartialSumSpec":
        ks = sorted({int(k) for k in indices})
        terms = tuple((k, (1 + 0j)) for k in ks)
        return cls("subset", terms, max(len(ks), 1))

    @classmethod
    def signed(cls, weights: Mapping[int, complex]) -> "PartialSumSpec":
        terms = []
        for k in sorted(weights):
            theta = complex(weights[k])
            if theta == 0:
                continue
            if not (math.isfinite(theta.real) and math.isfinite(theta.imag)):
                raise ValueError(f"weight for index {k} is not finite")
            if abs(theta) > 1 + 1e-12:
                raise ValueError(f"weight for index {k} exceeds modulus one")
            terms.append((int(k), theta))
        return cls("signed", tuple(terms), max(len(terms), 1))

    # -- views ------------------------------------------------------------------

    def indices(self) -> Tuple[int, ...]:
        return tuple(k for k, _ in self.terms)

    def weight(self, k: int) -> complex:
        for kk, theta in self.terms:
            if kk == k:
                return theta
        return 0j

    def __len__(self) -> int:
        return len(self.terms)

    def label(self) -> str:
        if self.mode == "symmetric":
            return f"sym K={self.terms[-1][0] if self.terms else 0}"
        if self.mode == "rectangular":
            lo = self.terms[0][0] if self.terms else 0
            hi = self.terms[-1][0] if self.terms else 0
            return f"rect [{lo},{hi}]"
        return f"{self.mode} n={len(self.terms)}"


def _spec_weights(fam: CorrelationFamily, spec: PartialSumSpec) -> Dict[int, complex]:
    """Nonzero weights restricted to indices the family actually carries."""
    return {k: theta for k, theta in spec.terms if k in fam.entries}


# ---------------------------------------------------------------------------
# exact application and the frame identity
# ---------------------------------------------------------------------------


def apply_walnut(
    fam: CorrelationFamily,
    f: StepFunction,
    spec: PartialSumSpec,
    include_prefactor: bool = True,
) -> StepFunction:
    """(b^{-1} if include_prefactor) sum_{k in spec} theta_k (T_{k/b} f) G_k.

    Exact per cell: every term is a shift of f's cells multiplied by the
    a-periodic cell values of G_k.
    """
    if f.step != fam.grid.step:
        raise GridError("signal grid does not match the family grid")
    weights = _spec_weights(fam, spec)
    if not weights or not f.values.size:
        return StepFunction(fam.grid, 0, np.zeros(0))
    s_b = fam.s_b
    ks = sorted(weights)
    lo = f.lo + ks[0] * s_b
    hi = f.hi + ks[-1] * s_b
    acc = np.zeros(hi - lo, dtype=complex)
    for k in ks:
        start = f.lo + k * s_b
        block = f.values * fam.entries[k].tile(start, f.values.size)
        theta = weights[k]
        if theta != 1:
            block = theta * block
        acc[start - lo : start - lo + f.values.size] += block
    if include_prefactor:
        acc *= 1.0 / float(fam.lattice.b)
    return StepFunction(fam.grid, lo, acc)


def wh_identity_terms(fam: CorrelationFamily, f: StepFunction) -> Tuple[complex, complex]:
    """The diagonal and off-diagonal integrals whose sum is <Sf, f>.

    F1 = b^{-1} int |f|^2 G_0,
    F2 = b^{-1} sum_{k != 0} int conj(f) (T_{k/b} f) G_k,

    computed as direct overlap integrals, independent of apply_walnut's
    accumulation order.
    """
    if f.step != fam.grid.step:
        raise GridError("signal grid does not match the family grid")
    step = float(f.step)
    binv = 1.0 / float(fam.lattice.b)
    if not f.values.size:
        return 0j, 0j
    g0 = fam.entry(0).tile(f.lo, f.values.size)
    f1 = binv * step * csum(np.abs(f.values) ** 2 * g0)
    s_b = fam.s_b
    parts = []
    for k in fam.k_range:
        if k == 0:
            continue
        lo = max(f.lo, f.lo + k * s_b)
        hi = min(f.hi, f.hi + k * s_b)
        if hi <= lo:
            continue
        fv = f.values[lo - f.lo : hi - f.lo]
        sv = f.values[lo - f.lo - k * s_b : hi - f.lo - k * s_b]
        gv = fam.entries[k].tile(lo, hi - lo)
        parts.append(step * csum(np.conj(fv) * sv * gv))
    f2 = binv * csum(parts) if parts else 0j
    return f1, f2


# ---------------------------------------------------------------------------
# multiplier norm brackets
# ---------------------------------------------------------------------------


def _pow2(n: int) -> int:
    return 1 << max(0, int(n) - 1).bit_length()


def _coefficient_rows(
    fam: CorrelationFamily, weights: Dict[int, complex]
) -> Tuple[Tuple[int, ...], np.ndarray]:
    """(ks, rows) with rows[i] = theta_k G_k over the s_a cells of one period."""
    ks = tuple(sorted(weights))
    rows = np.zeros((len(ks), fam.s_a), dtype=complex)
    for i, k in enumerate(ks):
        rows[i] = weights[k] * fam.entries[k].values
    return ks, rows


def _sample_trig(ks: Sequence[int], rows: np.ndarray, n: int) -> np.ndarray:
    """Values of sum_k rows[k, cell] e^{-2 pi i k j/n} on the n-point nu grid.

    Exact placement: n always exceeds twice the largest frequency, so the
    residues k mod n never collide.
    """
    cells = rows.shape[1]
    spectrum = np.zeros((cells, n), dtype=complex)
    for i, k in enumerate(ks):
        spectrum[:, k % n] += rows[i]
    return np.fft.fft(spectrum, axis=1)


def _scalar_bracket(
    fam: CorrelationFamily, spec: PartialSumSpec, nu_points: int
) -> Tuple[float, float]:
    weights = _spec_weights(fam, spec)
    if not weights:
        return (0.0, 0.0)
    ks, rows = _coefficient_rows(fam, weights)
    n = _pow2(max(nu_points, 2 * max(abs(k) for k in ks) + 2))
    low = float(np.max(np.abs(_sample_trig(ks, rows, n))))
    high = float(np.max(np.sum(np.abs(rows), axis=0)))
    return (min(low, high), high)


def multiplier_norm_a1b1(
    fam: CorrelationFamily, spec: PartialSumSpec, nu_points: int = 512
) -> Tuple[float, float]:
    """[norm_low, norm_high] for the truncated operator at a = b = 1.

    The truncation is unitarily equivalent to multiplication by
    m(t, nu) = sum_k theta_k G_k(t) e^{-2 pi i k nu}; its operator norm is
    ess sup |m|.  Exact in t (cellwise); in nu the bracket is
    [max over the sampled nu grid, sup_t sum_k |theta_k G_k(t)|].
    """
    if fam.lattice.a != 1 or fam.lattice.b != 1:
        raise LatticeError("the scalar multiplier bracket requires a = b = 1")
    return _scalar_bracket(fam, spec, nu_points)


@dataclass(frozen=True)
class MultiplierBracket:
    """Norm brackets for a truncation on a rational lattice ab = p/q.

    per_m:  p brackets, the m-th bounding sup_{t,nu} |sum_k theta_k F_km|
            (the per-entry criterion for the matrix symbol);
    matrix: bracket for ess sup of the spectral norm of the p x p symbol
            itself (the exact operator norm).

    The per-entry criterion controls the operator norm only up to an
    unspecified p-dependent factor; both numbers are reported and no
    equivalence constant is asserted.  prefactor records the multiplicative
    normalization (1/b or 1) already included in every number.
    """

    p: int
    per_m: Tuple[Tuple[float, float], ...]
    matrix: Tuple[float, float]
    prefactor: float

    def __post_init__(self) -> None:
        if len(self.per_m) != self.p:
            raise ValueError("per_m must hold exactly p brackets")
        for low, high in (*self.per_m, self.matrix):
            if low > high + 1e-12 * (1.0 + abs(high)):
                raise ValueError("bracket lower end exceeds upper end")

    def to_json_obj(self) -> dict:
        return {
            "p": self.p,
            "per_m": [[low, high] for low, high in self.per_m],
            "matrix": list(self.matrix),
            "prefactor": self.prefactor,
        }


def _f_coefficient_rows(
    fam: CorrelationFamily, weights: Dict[int, complex], resolution: int
) -> Tuple[Tuple[int, ...], np.ndarray]:
    """Coefficient arrays of the matrix-symbol entries in the nu variable.

    Entry m of the symbol is sum_k c[k, m](t) e^{-2 pi i k nu} with

        c[k, m](t) = theta_k e^{-2 pi i k m/p} (1/p)
                     sum_{r=0}^{p-1} e^{-2 pi i r m/p} G_k((t - r)/b),

    returned as an array of shape (len(ks), t_points, p) over the midpoint
    t grid of [0, 1) with t_points = resolution * s_b cells.  (t - r)/b lands
    mid-cell on the family grid, so the t dependence is exact.
    """
    p = fam.lattice.p
    s_a, s_b = fam.s_a, fam.s_b
    ks = tuple(sorted(weights))
    t_points = resolution * s_b
    base = np.arange(t_points) // resolution
    ms = np.arange(p)
    rs = np.arange(p)
    phase_rm = np.exp(-2j * np.pi * np.outer(rs, ms) / p) / p
    coefs = np.zeros((len(ks), t_points, p), dtype=complex)
    for i, k in enumerate(ks):
        vals = fam.entries[k].values
        shifted = np.stack([vals[(base - r * s_b) % s_a] for r in rs])
        inner = shifted.T @ phase_rm
        coefs[i] = (weights[k] * np.exp(-2j * np.pi * k * ms / p)) * inner
    return ks, coefs


def _rational_bracket(
    fam: CorrelationFamily,
    spec: PartialSumSpec,
    resolution: int,
    nu_points: int,
    include_prefactor: bool,
) -> MultiplierBracket:
    p = fam.lattice.p
    scale = (1.0 / float(fam.lattice.b)) if include_prefactor else 1.0
    weights = _spec_weights(fam, spec)
    if not weights:
        zero = tuple((0.0, 0.0) for _ in range(p))
        return MultiplierBracket(p, zero, (0.0, 0.0), scale)
    ks, coefs = _f_coefficient_rows(fam, weights, resolution)
    k_span = max(abs(k) for k in ks)
    n0 = _pow2(max(nu_points, -(-(2 * k_span + 2) // p)))
    n = p * n0
    t_points = coefs.shape[1]

    per_m = []
    vals_by_m = []
    for m in range(p):
        vals = _sample_trig(ks, coefs[:, :, m], n)
        vals_by_m.append(vals)
        low = float(np.max(np.abs(vals)))
        high = float(np.max(np.sum(np.abs(coefs[:, :, m]), axis=0)))
        per_m.append((min(low, high) * scale, high * scale))

    # symbol samples: row j of the matrix at (t, nu) is entry m evaluated at
    # nu + j/p, placed in column (j + m) mod p; the spectral-norm field is
    # 1/p-periodic in nu so the n0 samples of [0, 1/p) cover everything
    symbol = np.zeros((t_points, n0, p, p), dtype=complex)
    for m in range(p):
        for j in range(p):
            symbol[:, :, j, (j + m) % p] = vals_by_m[m][:, j * n0 : (j + 1) * n0]
    svals = np.linalg.svd(symbol.reshape(-1, p, p), compute_uv=False)
    mat_low = float(np.max(svals[:, 0]))

    # upper end: sum_k spectral norm of the coefficient matrix of e^{-2pi i k nu};
    # each is (a unitary diagonal times) a circulant built from c[k, :, m], so
    # its spectral norm is the largest modulus of the circulant eigenvalues
    circ_eigs = np.fft.ifft(coefs, axis=2) * p
    sigma_k = np.max(np.abs(circ_eigs), axis=2)
    mat_high = float(np.max(np.sum(sigma_k, axis=0)))
    matrix = (min(mat_low, mat_high) * scale, mat_high * scale)
    return MultiplierBracket(p, tuple(per_m), matrix, scale)


def multiplier_norm_rational(
    g: StepFunction,
    lat: LatticeParams,
    spec: PartialSumSpec,
    resolution: int = 1,
    nu_points: int = 512,
    include_prefactor: bool = True,
) -> MultiplierBracket:
    """Norm brackets for a truncation of the window's series at rational ab.

    Builds the correlation family of g and evaluates the p x p matrix symbol
    of the truncated operator in vector-valued Zak coordinates, returning the
    per-entry sup brackets and the exact-symbol spectral-norm bracket.  At
    p = q = 1 the symbol is the scalar sum_k theta_k G_k(t) e^{-2 pi i k nu}
    and the result coincides with multiplier_norm_a1b1.
    """
    if resolution < 1:
        raise GridError("resolution must be a positive integer")
    fam = correlation_family(g, lat)
    return _rational_bracket(fam, spec, resolution, nu_points, include_prefactor)


# ---------------------------------------------------------------------------
# growth fitting and regime sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares fit of a norm profile against one growth law.

    model 'log K':    y = coefficient * ln K + offset, parameter = coefficient
    model 'K^gamma':  y = coefficient * K^gamma + offset, parameter = gamma
    residual is the relative RMS misfit; family names the profile the fit
    was computed on.
    """

    model: str
    parameter: float
    residual: float
    coefficient: float
    offset: float
    family: str = ""

    def to_json_obj(self) -> dict:
        return {
            "model": self.model,
            "parameter": self.parameter,
            "residual": self.residual,
            "coefficient": self.coefficient,
            "offset": self.offset,
            "family": self.family,
        }


def _rel_residual(y: np.ndarray, fit: np.ndarray) -> float:
    scale = float(np.sqrt(np.mean(y**2)))
    if scale == 0.0:
        return 0.0
    return float(np.sqrt(np.mean((y - fit) ** 2)) / scale)


def fit_growth(
    sizes: Sequence[float],
    values: Sequence[float],
    family: str = "",
    models: Tuple[str, ...] = ("log K", "K^gamma"),
) -> Optional[GrowthFit]:
    """Best fit of a profile by c*log K + d or c*K^gamma + d.

    Returns None when fewer than four points are available or no candidate
    law converges.  Candidates (restrictable through models) are compared by
    relative RMS residual.
    """
    ks = np.asarray(sizes, dtype=float)
    ys = np.asarray(values, dtype=float)
    if ks.size < 4 or np.any(ks <= 0):
        return None
    fits = []
    if "log K" in models:
        logs = np.log(ks)
        design = np.stack([logs, np.ones_like(logs)], axis=1)
        (c, d), *_ = np.linalg.lstsq(design, ys, rcond=None)
        fits.append(GrowthFit("log K", float(c), _rel_residual(ys, design @ np.array([c, d])), float(c), float(d), family))
    if "K^gamma" in models and ys[-1] > ys[0]:
        spread = max(float(ys[-1] - ys.min()), 1e-9)
        p0 = (spread / max(ks[-1] ** 0.3, 1.0), 0.3, float(ys.min()))
        try:
            popt, _ = curve_fit(
                lambda k, cc, gamma, dd: cc * np.power(k, gamma) + dd,
                ks,
                ys,
                p0=p0,
                bounds=((1e-12, 0.01, -np.inf), (np.inf, 0.99, np.inf)),
                maxfev=20000,
            )
            cc, gamma, dd = (float(v) for v in popt)
            fit = cc * np.power(ks, gamma) + dd
            fits.append(GrowthFit("K^gamma", gamma, _rel_residual(ys, fit), cc, dd, family))
        except (RuntimeError, ValueError):
            pass
    return min(fits, key=lambda f: f.residual) if fits else None


@dataclass(frozen=True, eq=False)
class DiagnosticsReport:
    """Outcome of one regime sweep.

    norm_profile rows are (family label, size, norm_low, norm_high); the
    verdict aggregates per-family boundedness checks and growth fits.
    """

    regime: str
    norm_profile: Tuple[Tuple[str, int, float, float], ...]
    verdict: str
    growth_fit: Optional[GrowthFit]
    details: dict = field(default_factory=dict)

    _REGIMES = ("symmetric", "norm", "unconditional")
    _VERDICTS = ("bounded", "growing", "inconclusive")

    def __post_init__(self) -> None:
        if self.regime not in self._REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.verdict not in self._VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        for label, size, low, high in self.norm_profile:
            if low > high + 1e-12 * (1.0 + abs(high)):
                raise ValueError(f"profile entry {label!r} K={size} has low > high")

    def family_profile(self, family: str) -> Tuple[Tuple[int, float, float], ...]:
        return tuple((size, low, high) for label, size, low, high in self.norm_profile if label == family)

    def to_json_obj(self) -> dict:
        return {
            "regime": self.regime,
            "verdict": self.verdict,
            "families": [label for label, *_ in self.norm_profile],
            "norm_profile": [[size, low, high] for _, size, low, high in self.norm_profile],
            "growth_fit": self.growth_fit.to_json_obj() if self.growth_fit else None,
            "details": self.details,
        }


def _bracket_for(fam: CorrelationFamily, spec: PartialSumSpec, nu_points: int) -> Tuple[float, float]:
    """Operator-norm bracket of a bare truncation (no prefactor)."""
    if fam.lattice.a == 1 and fam.lattice.b == 1:
        return _scalar_bracket(fam, spec, nu_points)
    return _rational_bracket(fam, spec, 1, nu_points, include_prefactor=False).matrix


def _log_sizes(k_max: int) -> Tuple[int, ...]:
    sizes = []
    v = 1
    while v < k_max:
        sizes.append(v)
        v *= 2
    sizes.append(k_max)
    return tuple(sorted(set(sizes)))


def _pool(fam: CorrelationFamily, radius: int) -> Tuple[int, ...]:
    return tuple(k for k in fam.k_range if abs(k) <= radius)


def _alignment_cell(fam: CorrelationFamily) -> int:
    ks, mags = fam.magnitude_table()
    if not ks:
        return 0
    return int(np.argmax(mags.sum(axis=0)))


def _aligned_weights(
    fam: CorrelationFamily, pool: Sequence[int], cell: int, nu0: float, hard_signs: bool
) -> Dict[int, complex]:
    """Weights aligning the phases of G_k(t0) e^{-2 pi i k nu0} at one cell.

    hard_signs restricts to +-1 (the sign maximizing the real part);
    otherwise the exact conjugate phases are used, which witness the
    coefficient sum sum_k |G_k(t0)| at nu0 itself.
    """
    weights: Dict[int, complex] = {}
    for k in pool:
        z = fam.entries[k].values[cell % fam.s_a] * np.exp(-2j * np.pi * k * nu0)
        if z == 0:
            continue
        if hard_signs:
            weights[k] = 1.0 if z.real >= 0 else -1.0
        else:
            weights[k] = np.conj(z) / abs(z)
    return weights


def _family_verdict(
    sizes: Sequence[int], lows: Sequence[float], family: str
) -> Tuple[str, Optional[GrowthFit]]:
    ys = np.asarray(lows, dtype=float)
    scale = max(float(ys.max(initial=0.0)), 1e-12)
    # stabilized profile: the last two log-spaced steps add (almost) nothing;
    # decreasing steps count as stabilization (convergence from above)
    increments = np.diff(ys) if ys.size > 1 else np.zeros(1)
    if float(np.max(increments[-2:], initial=0.0)) <= 0.0075 * scale + 1e-12:
        return "bounded", None
    fit = fit_growth(sizes, ys, family)
    tail = ys[len(ys) // 2 :]
    monotone = bool(np.all(np.diff(tail) >= -1e-9 * scale))
    if fit is not None and fit.residual < 0.10 and monotone:
        return "growing", fit
    return "inconclusive", fit


def convergence_diagnose(
    source: Union[CorrelationFamily, Tuple[StepFunction, LatticeParams]],
    regime: str,
    k_max: int = 64,
    subset_strategy: str = "all",
    nu_points: int = 1024,
    seed: int = 7,
) -> DiagnosticsReport:
    """Sweep truncation families for one convergence regime and fit growth.

    regime 'symmetric'     : specs -K..K;
    regime 'norm'          : rectangular specs [ -L, K ] in the three corner
                             families (K, 0), (0, K), (K, K);
    regime 'unconditional' : signed/subset specs built per size from the
                             chosen strategies over the index pool |k| <= K.

    subset_strategy: 'aligned' (conjugate-phase weights at the dominating
    cell, nu0 in {0, golden fraction}), 'greedy' (same but weights clamped
    to +-1), 'random' (seeded random index subsets), or 'all'.

    Brackets are evaluated without the b^{-1} prefactor (bare partial sums);
    a uniform prefactor would rescale every profile and no verdict changes.
    The verdict is per family: 'bounded' when the second half of the profile
    adds under 2%, 'growing' when a growth law fits the lower ends with
    relative residual < 10% and the tail is monotone, else 'inconclusive'.
    Reports sum_k sup_t |G_k| in details for the unconditional regime, next
    to the Wiener-amalgam quantity 4 ||g||^2_{W,a} when the window is known.
    """
    if k_max < 4:
        raise ValueError("k_max must be at least 4")
    window: Optional[StepFunction] = None
    if isinstance(source, CorrelationFamily):
        fam = source
    else:
        window, lat = source
        fam = correlation_family(window, lat)
    sizes = _log_sizes(k_max)
    rng = np.random.default_rng(seed)

    profiles: Dict[str, list] = {}

    def add(family: str, size: int, spec: PartialSumSpec) -> None:
        low, high = _bracket_for(fam, spec, nu_points)
        profiles.setdefault(family, []).append((size, low, high))

    if regime == "symmetric":
        for k in sizes:
            add("sym", k, PartialSumSpec.symmetric(k))
    elif regime == "norm":
        for k in sizes:
            add("rect one-sided +", k, PartialSumSpec.rectangular(k, 0))
            add("rect one-sided -", k, PartialSumSpec.rectangular(0, k))
            add("rect balanced", k, PartialSumSpec.rectangular(k, k))
    elif regime == "unconditional":
        cell = _alignment_cell(fam)
        strategies = ("aligned", "greedy", "random") if subset_strategy == "all" else (subset_strategy,)
        for strategy in strategies:
            if strategy not in ("aligned", "greedy", "random"):
                raise ValueError(f"unknown subset strategy {strategy!r}")
        for k in sizes:
            pool = _pool(fam, k)
            if not pool:
                profiles.setdefault("signed aligned nu0=0", []).append((k, 0.0, 0.0))
                continue
            n_grid = _pow2(max(nu_points, 2 * k + 2))
            for strategy in strategies:
                if strategy in ("aligned", "greedy"):
                    hard = strategy == "greedy"
                    for tag, frac in (("0", 0.0), ("phi", GOLDEN_FRACTION)):
                        nu0 = round(frac * n_grid) / n_grid  # keep nu0 on the sampling grid
                        weights = _aligned_weights(fam, pool, cell, nu0, hard)
                        spec = PartialSumSpec.signed(weights) if weights else PartialSumSpec.subset(pool)
                        add(f"signed {strategy} nu0={tag}", k, spec)
                else:
                    for copy in range(2):
                        m = int(rng.integers(1, len(pool) + 1))
                        chosen = rng.choice(len(pool), size=m, replace=False)
                        spec = PartialSumSpec.subset(pool[i] for i in chosen)
                        add(f"subset random #{copy}", k, spec)
    else:
        raise ValueError(f"unknown regime {regime!r}")

    entries = []
    votes = []
    fits = []
    for family in sorted(profiles):
        rows = profiles[family]
        entries.extend((family, size, low, high) for size, low, high in rows)
        verdict, fit = _family_verdict([r[0] for r in rows], [r[1] for r in rows], family)
        votes.append(verdict)
        if fit is not None and verdict == "growing":
            fits.append(fit)
    if "growing" in votes:
        verdict = "growing"
        best = min(fits, key=lambda f: f.residual)
    elif all(v == "bounded" for v in votes):
        verdict, best = "bounded", None
    else:
        verdict, best = "inconclusive", None

    details: dict = {}
    if regime == "unconditional":
        ks, mags = fam.magnitude_table()
        details["sum_sup_gk"] = float(mags.max(axis=1).sum()) if ks else 0.0
        if window is not None:
            details["wiener_quantity"] = 4.0 * float(wiener_norm(window, fam.lattice.a)) ** 2
        else:
            details["wiener_quantity"] = None
    entries.sort(key=lambda e: (e[0], e[1]))
    return DiagnosticsReport(regime, tuple(entries), verdict, best, details)


# ---------------------------------------------------------------------------
# absolute-convergence certificate
# ---------------------------------------------------------------------------


def thm610_certificate(
    g: StepFunction, f: StepFunction, lat: LatticeParams
) -> Tuple[float, Tuple[Tuple[int, float], ...]]:
    """Certificate for absolute convergence of the series applied to f.

    certificate = B * integral over one a-period of max(A_f, B_f)^2, with
    B = sup_t sum_k |G_k(t)|^2 and A_f/B_f the lattice row-sup weights of f.
    The profile lists the squared L^2 norms of the absolute partial sums
    sum_{|k| <= K} |T_{k/b} f| |G_k|, which the certificate dominates; the
    function raises if the domination ever fails (it cannot, barring bugs).
    """
    if g.step != f.step:
        raise GridError("window and signal must share a grid")
    fam = correlation_family(g, lat)
    ks, mags = fam.magnitude_table()
    b_const = float(np.max(np.sum(mags**2, axis=0))) if ks else 0.0
    certificate = b_const * af_bf_weights(f, lat).integral_max_sq

    if not ks or not f.values.size:
        return certificate, ((0, 0.0),)
    s_b = fam.s_b
    lo = f.lo + min(ks) * s_b
    hi = f.hi + max(ks) * s_b
    acc = np.zeros(hi - lo, dtype=float)
    absf = np.abs(f.values)
    step = float(f.step)
    profile = []
    for radius in sorted({abs(k) for k in ks}):
        for k in ks:
            if abs(k) != radius:
                continue
            start = f.lo + k * s_b
            acc[start - lo : start - lo + absf.size] += absf * np.abs(
                fam.entries[k].tile(start, absf.size)
            )
        norm_sq = step * float(np.sum(acc**2))
        if norm_sq > certificate * (1.0 + 1e-9) + 1e-12:
            raise LatticeError(
                f"absolute partial sum {norm_sq} exceeds its certificate {certificate}"
            )
        profile.append((radius, norm_sq))
    return certificate, tuple(profile)


# ---------------------------------------------------------------------------
# a-priori truncation bound under a finite coefficient sum
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class UnconditionalReport:
    """Outcome of the randomized truncation-bound stress test.

    constant is the regrouping constant C = p (the truncation splits into p
    residue classes mod p, each an a-periodic block bounded by the
    coefficient sum); the verified inequality is
    ||sum_{k in M} theta_k (T_{k/b} f) G_k|| <= C * B * ||f||.
    """

    applicable: bool
    trials: int
    cc_bound: float
    constant: float
    max_ratio: float
    violations: int
    note: str = ""

    def to_json_obj(self) -> dict:
        return {
            "applicable": self.applicable,
            "trials": self.trials,
            "cc_bound": self.cc_bound,
            "constant": self.constant,
            "max_ratio": self.max_ratio,
            "violations": self.violations,
            "note": self.note,
        }


def cc_implies_unconditional_check(
    fam: Optional[CorrelationFamily],
    trials: int = 100,
    seed: int = 11,
    cc_report: Optional[ConditionReport] = None,
) -> UnconditionalReport:
    """Randomized verification of the truncation bound C * B * ||f||.

    Draws random step signals and random signed subsets of the family's
    indices, applies the bare truncation (no prefactor) and compares the
    output norm against C * B * ||f|| with B the coefficient-sum bound and
    C = p the residue-class regrouping constant.  The constant is reported,
    not assumed: every trial's ratio is recorded and any ratio beyond 1
    counts as a violation.

    Passing fam = None marks an irrational-density construction, for which
    no rational block structure exists: the report comes back flagged not
    applicable instead of asserting anything.
    """
    if fam is None:
        return UnconditionalReport(
            False, 0, 0.0, 0.0, 0.0, 0,
            "not applicable: irrational time-frequency density has no residue-class regrouping",
        )
    report = cc_report if cc_report is not None else cc_check(fam)
    if report.verdict not in ("holds", "inconclusive-truncated"):
        raise LatticeError("coefficient-sum condition must be certified before the truncation bound")
    bound = float(report.bound)
    constant = float(fam.lattice.p)
    note = ""
    if report.verdict == "inconclusive-truncated":
        note = "truncated family: the bound covers the represented indices only"
    if not fam.k_range or bound == 0.0:
        return UnconditionalReport(True, 0, bound, constant, 0.0, 0, note or "empty family")

    rng = np.random.default_rng(seed)
    ks = fam.k_range
    max_ratio = 0.0
    violations = 0
    for _ in range(trials):
        n_cells = int(rng.integers(1, 13))
        lo = int(rng.integers(-8, 9))
        values = rng.standard_normal(n_cells) + 1j * rng.standard_normal(n_cells)
        f = StepFunction(fam.grid, lo, values)
        m = int(rng.integers(1, len(ks) + 1))
        chosen = rng.choice(len(ks), size=m, replace=False)
        signs = rng.choice([-1.0, 1.0], size=m)
        spec = PartialSumSpec.signed({ks[i]: signs[j] for j, i in enumerate(chosen)})
        out = apply_walnut(fam, f, spec, include_prefactor=False)
        denom = constant * bound * f.norm
        ratio = out.norm / denom if denom > 0 else 0.0
        max_ratio = max(max_ratio, ratio)
        if ratio > 1.0 + 1e-9:
            violations += 1
    return UnconditionalReport(True, trials, bound, constant, max_ratio, violations, note)
