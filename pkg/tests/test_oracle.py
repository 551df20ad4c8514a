"""Brute-force oracle invariants on Z_N."""

from fractions import Fraction

import numpy as np
import pytest

from gaborwalnut.model import (
    DiscreteGaborSystem,
    GridError,
    GridSpec,
    LatticeError,
    LatticeParams,
    StepFunction,
    translate,
)
from gaborwalnut.oracle import (
    dual_discrete,
    frame_matrix,
    janssen_discrete,
    step_to_discrete,
    walnut_discrete,
    wh_identity_discrete,
)

F = Fraction


def _random_system(rng, n_max=48):
    while True:
        n = int(rng.integers(4, n_max + 1))
        divisors = [d for d in range(1, n + 1) if n % d == 0]
        a_d = int(rng.choice(divisors))
        l_choices = [d for d in divisors if a_d * d <= n]
        if not l_choices:
            continue
        ell = int(rng.choice(l_choices))
        w = rng.normal(size=n) + 1j * rng.normal(size=n)
        return DiscreteGaborSystem(n, a_d, ell, w)


def test_frame_matrix_spike_full_lattice():
    n = 8
    w = np.zeros(n)
    w[0] = 1.0
    sys = DiscreteGaborSystem(n, 1, n, w)
    fm = frame_matrix(sys)
    np.testing.assert_allclose(fm.matrix, n * np.eye(n), atol=1e-12)
    assert fm.lambda_min == pytest.approx(n)
    assert fm.lambda_max == pytest.approx(n)


def test_frame_matrix_single_orbit_rank_deficient():
    # one shift orbit and one modulation level: a rank-1 operator, not a frame
    n = 8
    sys = DiscreteGaborSystem(n, n, 1, np.full(n, 1 / np.sqrt(n)))
    fm = frame_matrix(sys)
    assert fm.lambda_min == pytest.approx(0.0, abs=1e-12)
    assert np.linalg.matrix_rank(fm.matrix) == 1


def test_frame_matrix_tiling_indicator_tight():
    # translates tile Z_N disjointly; the frame is tight with bound L/a_d
    n, a_d, ell = 12, 3, 4
    w = np.zeros(n)
    w[:a_d] = 1 / np.sqrt(a_d)
    fm = frame_matrix(DiscreteGaborSystem(n, a_d, ell, w))
    lam = ell / a_d
    assert np.max(np.abs(fm.matrix - lam * np.eye(n))) <= 1e-10
    np.testing.assert_allclose(fm.eigenvalues, lam, atol=1e-10)


def test_frame_matrix_hermitian_psd():
    rng = np.random.default_rng(3)
    for _ in range(10):
        fm = frame_matrix(_random_system(rng))
        assert fm.hermitian_defect <= 1e-12 * (1 + fm.lambda_max)
        assert fm.lambda_min >= -1e-10 * (1 + fm.lambda_max)


def test_frame_matrix_quadratic_form_matches_coefficients():
    # lambda_max equals the sup of <Sf, f> over unit f within tolerance
    rng = np.random.default_rng(11)
    sys = _random_system(rng)
    fm = frame_matrix(sys)
    for _ in range(20):
        f = rng.normal(size=sys.N) + 1j * rng.normal(size=sys.N)
        f /= np.linalg.norm(f)
        quad = np.real(np.vdot(f, fm.matrix @ f))
        assert quad <= fm.lambda_max + 1e-8
        assert quad >= fm.lambda_min - 1e-8


def test_walnut_discrete_equals_frame_matrix():
    rng = np.random.default_rng(5)
    for _ in range(10):
        sys = _random_system(rng)
        fm = frame_matrix(sys)
        for _ in range(5):
            f = rng.normal(size=sys.N) + 1j * rng.normal(size=sys.N)
            err = np.max(np.abs(walnut_discrete(sys, f) - fm.matrix @ f))
            assert err <= 1e-10 * (1 + fm.lambda_max * np.linalg.norm(f))


def test_walnut_discrete_spike():
    n = 8
    w = np.zeros(n)
    w[0] = 1.0
    sys = DiscreteGaborSystem(n, 1, n, w)
    rng = np.random.default_rng(0)
    f = rng.normal(size=n)
    np.testing.assert_allclose(walnut_discrete(sys, f), n * f, atol=1e-12)
    np.testing.assert_allclose(walnut_discrete(sys, np.zeros(n)), 0, atol=0)


def test_wh_identity_spike_and_random():
    n = 8
    w = np.zeros(n)
    w[0] = 1.0
    sys = DiscreteGaborSystem(n, 1, n, w)
    rng = np.random.default_rng(9)
    f = rng.normal(size=n) + 1j * rng.normal(size=n)
    rep = wh_identity_discrete(sys, f)
    assert rep.lhs == pytest.approx(n * np.linalg.norm(f) ** 2)
    assert abs(rep.f2) <= 1e-10
    for _ in range(20):
        sys = _random_system(rng)
        f = rng.normal(size=sys.N) + 1j * rng.normal(size=sys.N)
        rep = wh_identity_discrete(sys, f)
        assert rep.residual <= 1e-9 * (1 + rep.lhs)


def test_janssen_spike_single_coefficient():
    n = 8
    w = np.zeros(n)
    w[0] = 1.0
    rep = janssen_discrete(DiscreteGaborSystem(n, 1, n, w))
    assert rep.coefficients.shape == (1, 1)
    assert rep.coefficients[0, 0] == pytest.approx(1.0)
    assert rep.residual <= 1e-9


def test_janssen_random_windows():
    rng = np.random.default_rng(21)
    for _ in range(10):
        sys = _random_system(rng, n_max=36)
        rep = janssen_discrete(sys)
        scale = 1 + float(np.max(np.abs(rep.coefficients)))
        assert rep.residual <= 1e-9 * scale * sys.N


def test_janssen_zero_window():
    rep = janssen_discrete(DiscreteGaborSystem(6, 2, 3, np.zeros(6)))
    np.testing.assert_array_equal(rep.coefficients, 0)
    assert rep.residual == 0.0


def test_dual_tight_system():
    n = 8
    w = np.zeros(n)
    w[0] = 1.0
    rep = dual_discrete(DiscreteGaborSystem(n, 1, n, w))
    np.testing.assert_allclose(rep.dual, w / n, atol=1e-12)
    assert rep.biorthogonality_residual <= 1e-9
    assert rep.constant == pytest.approx(1 / n)  # a_d / L, not a_d * L / N


def test_dual_random_frames():
    rng = np.random.default_rng(13)
    done = 0
    while done < 10:
        sys = _random_system(rng, n_max=32)
        fm = frame_matrix(sys)
        if fm.lambda_min <= 1e-6:
            continue
        rep = dual_discrete(sys)
        assert rep.solve_residual <= 1e-10 * (1 + np.linalg.norm(sys.window))
        assert rep.biorthogonality_residual <= 1e-9 * (1 + np.linalg.norm(sys.window) ** 2)
        done += 1


def test_dual_rejects_non_frame():
    n = 8
    sys = DiscreteGaborSystem(n, n, 1, np.full(n, 1.0))
    with pytest.raises(LatticeError):
        dual_discrete(sys)


def test_bridge_tight_indicator():
    g = StepFunction.box(GridSpec(F(1, 4)), 0, 1)
    lat = LatticeParams(F(1), F(1))
    bridge = step_to_discrete(g, lat, 16)
    assert (bridge.system.a_d, bridge.system.L) == (4, 4)
    np.testing.assert_allclose(bridge.mapped_eigenvalues(), 1.0, atol=1e-10)


def test_bridge_two_level_window():
    g = StepFunction.box(GridSpec(F(1, 4)), 0, F(1, 2)) + 0.5 * StepFunction.box(
        GridSpec(F(1, 4)), F(1, 2), 1
    )
    lat = LatticeParams(F(1), F(1))
    eigs = step_to_discrete(g, lat, 16).mapped_eigenvalues()
    assert eigs.min() == pytest.approx(0.25, abs=1e-10)
    assert eigs.max() == pytest.approx(1.0, abs=1e-10)


def test_bridge_oversampled_indicator():
    g = StepFunction.box(GridSpec(F(1, 4)), 0, 1)
    lat = LatticeParams(F(1), F(1, 2))
    eigs = step_to_discrete(g, lat, 32).mapped_eigenvalues()
    np.testing.assert_allclose(eigs, 2.0, atol=1e-10)


def test_bridge_rejects_bad_geometry():
    grid = GridSpec(F(1, 4))
    g = StepFunction.box(grid, 0, 1)
    with pytest.raises(GridError):
        step_to_discrete(g, LatticeParams(F(1, 3), F(1)), 12)  # off-grid lattice
    with pytest.raises(LatticeError):
        step_to_discrete(g, LatticeParams(F(1), F(1)), 18)  # N not a multiple
    with pytest.raises(GridError):
        step_to_discrete(translate(g, -1), LatticeParams(F(1), F(1)), 16)  # negative support


def test_bridge_rejects_aliasing_support():
    grid = GridSpec(F(1, 4))
    g = StepFunction.box(grid, 0, 3)  # 12 cells wide, needs N >= 24
    with pytest.raises(GridError):
        step_to_discrete(g, LatticeParams(F(1), F(1)), 16)
