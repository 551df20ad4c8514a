"""Brute-force ground truth on Z_N.

Everything here is dense and unarguable: the frame operator as an explicit
Hermitian matrix, its eigenvalue frame bounds, the discrete Walnut and
Janssen representations (exact finite identities), duals by linear solve,
and the bridge that maps a step-function window onto a cyclic system so
continuous-side claims can be checked against discrete eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import (
    DiscreteGaborSystem,
    GridError,
    LatticeError,
    LatticeParams,
    StepFunction,
    discrete_atom,
    lattice_cells,
)

__all__ = [
    "FrameMatrix",
    "JanssenReport",
    "DualReport",
    "BridgeResult",
    "frame_matrix",
    "discrete_correlations",
    "walnut_discrete",
    "wh_identity_discrete",
    "janssen_discrete",
    "dual_discrete",
    "step_to_discrete",
]


@dataclass(frozen=True)
class FrameMatrix:
    """Dense frame operator with its exact spectral data."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    lambda_min: float
    lambda_max: float
    hermitian_defect: float


def _atom_rows(sys: DiscreteGaborSystem) -> np.ndarray:
    """All atoms as rows, shape (L * num_shifts, N)."""
    j = np.arange(sys.N)
    phases = np.exp(2j * math.pi * np.outer(np.arange(sys.L), j) / sys.L)
    rolls = np.stack([np.roll(sys.window, n * sys.a_d) for n in range(sys.num_shifts)])
    atoms = phases[:, None, :] * rolls[None, :, :]
    return atoms.reshape(sys.L * sys.num_shifts, sys.N)


def frame_matrix(sys: DiscreteGaborSystem) -> FrameMatrix:
    """S = sum over atoms of (outer product atom * atom^H), assembled densely."""
    atoms = _atom_rows(sys)
    s = atoms.T @ np.conj(atoms)
    defect = float(np.max(np.abs(s - s.conj().T)))
    eigs = np.linalg.eigvalsh(s)
    return FrameMatrix(s, eigs, float(eigs[0]), float(eigs[-1]), defect)


def discrete_correlations(sys: DiscreteGaborSystem) -> np.ndarray:
    """G_k(j) = sum_n w(j - n a_d) conj(w(j - n a_d - k L)), k = 0 .. N/L - 1.

    Returned as an (N/L, N) array; G is a_d-periodic in j by construction.
    """
    w = sys.window
    n_k = sys.N // sys.L
    out = np.zeros((n_k, sys.N), dtype=complex)
    for k in range(n_k):
        acc = np.zeros(sys.N, dtype=complex)
        for n in range(sys.num_shifts):
            rolled = np.roll(w, n * sys.a_d)
            acc += rolled * np.conj(np.roll(rolled, k * sys.L))
        out[k] = acc
    return out


def walnut_discrete(sys: DiscreteGaborSystem, f: np.ndarray) -> np.ndarray:
    """(Sf)(j) = L * sum_k f(j - k L mod N) G_k(j) — must equal frame_matrix @ f."""
    f = np.asarray(f, dtype=complex)
    if f.shape != (sys.N,):
        raise LatticeError("signal length must be N")
    gk = discrete_correlations(sys)
    out = np.zeros(sys.N, dtype=complex)
    for k in range(sys.N // sys.L):
        out += np.roll(f, k * sys.L) * gk[k]
    return sys.L * out


@dataclass(frozen=True)
class WHIdentityReport:
    lhs: float
    f1: float
    f2: complex
    residual: float


def wh_identity_discrete(sys: DiscreteGaborSystem, f: np.ndarray) -> WHIdentityReport:
    """sum_{m,n} |<f, atom>|^2 split into the diagonal term F1 and the
    off-diagonal correlation term F2; the identity is exact."""
    f = np.asarray(f, dtype=complex)
    atoms = _atom_rows(sys)
    coeffs = np.conj(atoms) @ f
    lhs = float(np.sum(np.abs(coeffs) ** 2))
    gk = discrete_correlations(sys)
    f1 = sys.L * float(np.real(np.sum(np.abs(f) ** 2 * gk[0].real)))
    f2 = 0j
    for k in range(1, sys.N // sys.L):
        f2 += sys.L * np.sum(np.conj(f) * np.roll(f, k * sys.L) * gk[k])
    residual = abs(lhs - (f1 + f2))
    return WHIdentityReport(lhs, f1, complex(f2), float(residual))


def _shift_mod_matrix(N: int, x: int, y: int) -> np.ndarray:
    """U_{x,y} f(j) = exp(2 pi i y j / N) f((j - x) mod N) as a dense matrix."""
    u = np.zeros((N, N), dtype=complex)
    j = np.arange(N)
    u[j, (j - x) % N] = np.exp(2j * math.pi * y * j / N)
    return u


@dataclass(frozen=True)
class JanssenReport:
    """Adjoint-lattice expansion S = (L/a_d) sum c_{k,l} U_{kL, lN/a_d}."""

    coefficients: np.ndarray  # shape (N/L, a_d)
    residual: float
    constant: float


def janssen_discrete(sys: DiscreteGaborSystem) -> JanssenReport:
    g = sys.window
    n_k = sys.N // sys.L
    mod_step = sys.N // sys.a_d
    coeffs = np.zeros((n_k, sys.a_d), dtype=complex)
    s_jan = np.zeros((sys.N, sys.N), dtype=complex)
    const = sys.L / sys.a_d
    for k in range(n_k):
        for ell in range(sys.a_d):
            u = _shift_mod_matrix(sys.N, k * sys.L, ell * mod_step)
            c = np.vdot(u @ g, g)  # <g, U g>
            coeffs[k, ell] = c
            s_jan += c * u
    s_jan *= const
    s_ref = frame_matrix(sys).matrix
    residual = float(np.linalg.norm(s_ref - s_jan))
    return JanssenReport(coeffs, residual, const)


@dataclass(frozen=True)
class DualReport:
    """Canonical dual by linear solve, with its duality certificates.

    The discrete Wexler-Raz constant is a_d / L: for the spike window on the
    full lattice the dual is g/N and <dual, g> = 1/N = a_d/L.
    """

    dual: np.ndarray
    lambda_min: float
    solve_residual: float
    biorthogonality_residual: float
    constant: float


def dual_discrete(sys: DiscreteGaborSystem) -> DualReport:
    fm = frame_matrix(sys)
    if fm.lambda_min <= 1e-8:
        raise LatticeError(f"not a frame: lambda_min = {fm.lambda_min:.3e}")
    dual = np.linalg.solve(fm.matrix, sys.window)
    solve_res = float(np.linalg.norm(fm.matrix @ dual - sys.window))
    const = sys.a_d / sys.L
    worst = 0.0
    mod_step = sys.N // sys.a_d
    for k in range(sys.N // sys.L):
        for ell in range(sys.a_d):
            u = _shift_mod_matrix(sys.N, k * sys.L, ell * mod_step)
            val = np.vdot(u @ sys.window, dual)  # <dual, U g>
            target = const if (k == 0 and ell == 0) else 0.0
            worst = max(worst, abs(val - target))
    return DualReport(dual, fm.lambda_min, solve_res, float(worst), const)


@dataclass(frozen=True)
class BridgeResult:
    """Discrete embodiment of a continuous step-function system.

    Continuous frame bounds equal scale * (discrete eigenvalues): the grid
    cell measure is the only unit conversion between the two models.
    """

    system: DiscreteGaborSystem
    scale: Fraction
    s_a: int
    s_b: int

    def mapped_eigenvalues(self) -> np.ndarray:
        return float(self.scale) * frame_matrix(self.system).eigenvalues


def step_to_discrete(g: StepFunction, lat: LatticeParams, N: int) -> BridgeResult:
    """Sample the window onto Z_N with a_d = a/step and L = (1/b)/step.

    Requires support inside [0, N) cells and 2*support_width <= N so that no
    cyclic wrap pairs two translates that never meet on the line.
    """
    s_a, s_b = lattice_cells(lat, g.grid)
    if N % s_a != 0 or N % s_b != 0:
        raise LatticeError(f"N={N} must be a multiple of both s_a={s_a} and s_b={s_b}")
    if s_a * s_b > N:
        raise LatticeError(f"overcritical discrete lattice: s_a*s_b={s_a * s_b} > N={N}")
    if g.values.size:
        if g.lo < 0 or g.hi > N:
            raise GridError(f"window support cells [{g.lo}, {g.hi}) must lie inside [0, {N})")
        if 2 * (g.hi - g.lo) > N:
            raise GridError("window support too wide: cyclic aliasing would corrupt G_k")
    window = g.cell_values(0, N)
    sys = DiscreteGaborSystem(N, s_a, s_b, window)
    return BridgeResult(sys, g.step, s_a, s_b)
