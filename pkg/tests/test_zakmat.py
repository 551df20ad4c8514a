"""Zak matrix fields: builders, transfer identities, bound brackets, duals."""

import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings

from gaborwalnut.model import (
    GridError,
    GridSpec,
    LatticeError,
    LatticeParams,
    StepFunction,
    common_grid,
    modulated_inner_product,
    step_fourier,
    translate,
)
from gaborwalnut.correlations import cc_check, correlation_family
from gaborwalnut.oracle import step_to_discrete
from gaborwalnut.zak import zak_point
from gaborwalnut.zakmat import (
    BoundBracket,
    ZakMatrixField,
    a_field,
    b_field,
    dual_window,
    field_coefficients,
    frame_bounds,
    phi_field,
    prop44_residual,
    psi_field,
    s_field,
    spectral_apply,
    ucc_of_dual,
)

from conftest import step_functions

LAT11 = LatticeParams(1, 1)
LAT12 = LatticeParams(1, F(1, 2))
LAT23 = LatticeParams(1, F(2, 3))

CHI = StepFunction(common_grid(1, 1, 1), 0, [1.0])
CHI_HALVES = StepFunction(common_grid(1, F(1, 2), 1), 0, [1.0, 1.0])
TWO_LEVEL = StepFunction(common_grid(1, 1, 2), 0, [1.0, 0.5])
# chi_[0, 5/2) at b = 1/2: the smallest all-ones window whose A field is
# genuinely nu-dependent (G_{+-1} survive), hence whose dual has infinite tails
WIDE_FIVE = StepFunction(common_grid(1, F(1, 2), 1), 0, [1.0] * 5)


def seeded_window(lat, cells, lo, seed, scale=3):
    rng = np.random.default_rng(seed)
    grid = common_grid(lat.a, lat.b, 1)
    re = rng.integers(-scale, scale + 1, cells)
    im = rng.integers(-scale, scale + 1, cells)
    return StepFunction(grid, lo, (re + 1j * im).astype(complex))


def hermitian_eigs(field):
    mats = field.matrices
    herm = 0.5 * (mats + np.conj(np.transpose(mats, (0, 1, 3, 2))))
    return np.linalg.eigvalsh(herm)


class TestFieldType:
    def test_shape_and_samples(self):
        mats = np.zeros((2, 4, 1, 1), dtype=complex)
        fld = ZakMatrixField("A", LAT11, F(1, 2), mats, nu_span=0)
        assert fld.t_points == 2 and fld.nu_points == 4 and fld.shape == (1, 1)
        assert fld.t_sample(0) == F(1, 4) and fld.t_sample(1) == F(3, 4)
        assert fld.nu_sample(3) == F(3, 4)

    def test_validation_and_immutability(self):
        with pytest.raises(LatticeError):
            ZakMatrixField("Q", LAT11, F(1, 2), np.zeros((1, 1, 1, 1)))
        with pytest.raises(GridError):
            ZakMatrixField("A", LAT11, F(1, 2), np.zeros((1, 1, 1)))
        fld = ZakMatrixField("A", LAT11, F(1), np.zeros((1, 1, 1, 1)))
        with pytest.raises(AttributeError):
            fld.kind = "S"
        with pytest.raises(ValueError):
            fld.matrices[0, 0, 0, 0] = 1.0

    def test_rectangular_guards(self):
        pf = phi_field(CHI_HALVES, LAT12)
        assert pf.shape == (1, 2)
        with pytest.raises(GridError):
            pf.hermitian_defect()
        with pytest.raises(GridError):
            pf.eigenvalue_range()

    def test_eigenvalue_range_two_level(self):
        af = a_field(TWO_LEVEL, None, LAT11)
        lo, hi = af.eigenvalue_range()
        assert lo == pytest.approx(0.25, abs=1e-14)
        assert hi == pytest.approx(1.0, abs=1e-14)


class TestPhiField:
    def test_indicator_is_one(self):
        pf = phi_field(CHI, LAT11)
        assert pf.kind == "Phi" and pf.shape == (1, 1)
        np.testing.assert_array_equal(pf.matrices, np.ones_like(pf.matrices))

    def test_matches_pointwise_zak_definition(self):
        # every entry is p^{-1/2} (Z_{1/b} g)(t - l*ab, nu + k/p)
        g = seeded_window(LAT23, 8, -2, 11)
        pf = phi_field(g, LAT23, 1, 16)
        lam = 1 / LAT23.b
        rng = np.random.default_rng(0)
        for _ in range(16):
            i = int(rng.integers(pf.t_points))
            j = int(rng.integers(pf.nu_points))
            k = int(rng.integers(LAT23.p))
            l = int(rng.integers(LAT23.q))
            want = zak_point(g, lam, pf.t_sample(i) - l * LAT23.ab, pf.nu_sample(j) + F(k, LAT23.p))
            want /= LAT23.p**0.5
            assert pf.matrices[i, j, k, l] == pytest.approx(want, abs=1e-12)

    def test_zero_window(self):
        zero = StepFunction(common_grid(1, 1, 1), 0, [])
        np.testing.assert_array_equal(phi_field(zero, LAT11).matrices, 0)

    def test_resolution_refines_t(self):
        assert phi_field(CHI, LAT11, 3).t_points == 3 * phi_field(CHI, LAT11, 1).t_points
        with pytest.raises(GridError):
            phi_field(CHI, LAT11, 0)


class TestAField:
    def test_indicator_identity(self):
        af = a_field(CHI, None, LAT11)
        np.testing.assert_array_equal(af.matrices, np.ones_like(af.matrices))

    def test_two_level_profile_is_window_squared(self):
        # A(t, nu) = g(t)^2: 1 on [0, 1/2), 1/4 on [1/2, 1), nu-independent
        af = a_field(TWO_LEVEL, None, LAT11)
        for i in range(af.t_points):
            want = abs(TWO_LEVEL.value_at(af.t_sample(i))) ** 2
            np.testing.assert_allclose(af.matrices[i], want, atol=1e-14)

    def test_uniform_two_for_oversampled_indicator(self):
        af = a_field(CHI_HALVES, None, LAT12)
        np.testing.assert_allclose(af.matrices, 2.0, atol=1e-12)

    def test_gram_is_hermitian_cross_is_not(self):
        g = seeded_window(LAT23, 8, -2, 11)
        h = seeded_window(LAT23, 6, 0, 12)
        assert a_field(g, None, LAT23).hermitian_defect() <= 1e-12
        assert a_field(g, h, LAT23).hermitian_defect() > 1e-3

    @settings(deadline=None, max_examples=40)
    @given(step_functions())
    def test_positive_semidefinite(self, g):
        for lat in (LAT11, LAT12):
            eigs = hermitian_eigs(a_field(g, None, lat, 1, 16))
            assert float(eigs.min(initial=0.0)) >= -1e-10

    def test_eigenvalues_shift_invariant_in_nu(self):
        # A(t, nu + 1/p) is a permutation conjugate of A(t, nu): spectra match
        g = seeded_window(LAT23, 8, -2, 11)
        af = a_field(g, None, LAT23, 1, 64)
        eigs = np.sort(hermitian_eigs(af), axis=-1)
        rolled = np.roll(eigs, -af.nu_points // LAT23.p, axis=1)
        np.testing.assert_allclose(eigs, rolled, atol=1e-9)

    def test_coefficients_reconstruct_field(self):
        g = seeded_window(LAT23, 8, -2, 5)
        af = a_field(g, None, LAT23, 1, 16)
        rs, coefs = field_coefficients(af)
        n = af.nu_points
        recon = np.zeros_like(af.matrices)
        for idx, r in enumerate(rs):
            phase = np.exp(2j * np.pi * r * np.arange(n) / n)
            recon += coefs[:, idx][:, None] * phase[None, :, None, None]
        np.testing.assert_allclose(recon, af.matrices, atol=1e-12 * (1 + np.abs(af.matrices).max()))


class TestSField:
    def test_indicator_identity(self):
        sf = s_field(CHI, LAT11)
        np.testing.assert_allclose(sf.matrices, 1.0, atol=1e-15)

    def test_two_level_equals_zero_lag_correlation(self):
        sf = s_field(TWO_LEVEL, LAT11)
        assert sf.nu_span == 0
        for i in range(sf.t_points):
            want = abs(TWO_LEVEL.value_at(sf.t_sample(i))) ** 2
            np.testing.assert_allclose(sf.matrices[i], want, atol=1e-14)

    @pytest.mark.parametrize("lat,cells,lo,seed", [(LAT11, 6, -1, 3), (LAT12, 7, -2, 4), (LAT23, 8, 0, 5)])
    def test_row_coefficient_l1_equals_cc_bound(self, lat, cells, lo, seed):
        # the nu-coefficients of row m are G_u(t + m/b), so their l1 norm at
        # the worst sample equals sup_t sum_k |G_k(t)|
        g = seeded_window(lat, cells, lo, seed)
        sf = s_field(g, lat, 1, 16)
        rs, coefs = field_coefficients(sf)
        l1 = float(np.max(np.sum(np.abs(coefs[:, :, :, 0]), axis=1)))
        bound = cc_check(correlation_family(g, lat)).bound
        assert l1 == pytest.approx(bound, rel=1e-12, abs=1e-12)

    def test_ell_max_truncates_to_flat_field(self):
        sf = s_field(WIDE_FIVE, LAT12, 1, 16, ell_max=0)
        assert sf.nu_span == 0
        assert np.max(np.abs(sf.matrices - sf.matrices[:, :1])) <= 1e-15


class TestProp44:
    CORPUS = [
        (LAT11, 4, 0, 21),
        (LAT11, 6, -2, 22),
        (LAT12, 7, -1, 23),
        (LAT23, 8, -2, 24),
        (LatticeParams(F(3, 2), F(1, 2)), 9, -3, 25),
    ]

    @pytest.mark.parametrize("lat,cells,lo,seed", CORPUS)
    def test_transfer_identities_on_corpus(self, lat, cells, lo, seed):
        g = seeded_window(lat, cells, lo, seed)
        assert prop44_residual(g, lat, 1, 16) <= 1e-9

    def test_single_index_case_is_exact(self):
        for cells, lo, seed in ((4, 0, 31), (6, -2, 32)):
            g = seeded_window(LAT11, cells, lo, seed)
            assert prop44_residual(g, LAT11, 1, 16) <= 1e-12

    def test_zero_window(self):
        zero = StepFunction(common_grid(1, 1, 1), 0, [])
        assert prop44_residual(zero, LAT11) == 0.0

    def test_rejects_undersampled_lattice(self):
        g = StepFunction(common_grid(1, 2, 1), 0, [1.0, 1.0])
        with pytest.raises(LatticeError):
            prop44_residual(g, LatticeParams(1, 2))


class TestPsiAndBField:
    def test_indicator_b_is_one(self):
        bf = b_field(CHI, LAT11)
        np.testing.assert_allclose(bf.matrices, 1.0, atol=1e-15)

    def test_psi_matches_pointwise_zak_definition(self):
        # entry (k, j) is p^{-1/2} (Z_a g)(t - kq/p, nu - j/q)
        g = seeded_window(LAT23, 8, -2, 11)
        ps = psi_field(g, LAT23, 1, 16)
        rng = np.random.default_rng(1)
        for _ in range(16):
            i = int(rng.integers(ps.t_points))
            j = int(rng.integers(ps.nu_points))
            k = int(rng.integers(LAT23.p))
            c = int(rng.integers(LAT23.q))
            want = zak_point(
                g, LAT23.a, ps.t_sample(i) - F(k * LAT23.q, LAT23.p), ps.nu_sample(j) - F(c, LAT23.q)
            )
            want /= LAT23.p**0.5
            assert ps.matrices[i, j, k, c] == pytest.approx(want, abs=1e-12)

    @pytest.mark.parametrize(
        "lat,cells,lo,seed",
        [(LAT12, 5, 0, 41), (LAT12, 7, -2, 42), (LAT23, 6, -1, 43), (LAT23, 8, 0, 44), (LAT23, 9, -3, 45)],
    )
    def test_correlation_route_equals_gram_product(self, lat, cells, lo, seed):
        # independent formulas: the G_k route vs the direct Psi Psi^* product
        g = seeded_window(lat, cells, lo, seed)
        bf = b_field(g, lat, 1, 16)
        ps = psi_field(g, lat, 1, bf.nu_points)
        prod = ps.matrices @ np.conj(np.transpose(ps.matrices, (0, 1, 3, 2)))
        assert np.max(np.abs(bf.matrices - prod)) <= 1e-9

    def test_zero_window(self):
        zero = StepFunction(common_grid(1, 1, 1), 0, [])
        np.testing.assert_array_equal(b_field(zero, LAT11).matrices, 0)


class TestFrameBounds:
    def test_tight_indicator(self):
        br = frame_bounds(a_field(CHI, None, LAT11))
        assert (br.A_low, br.A_high, br.B_low, br.B_high) == (1.0, 1.0, 1.0, 1.0)
        assert br.width == 0.0

    def test_two_level_bracket_and_oracle(self):
        br = frame_bounds(a_field(TWO_LEVEL, None, LAT11))
        assert br.A_low == pytest.approx(0.25, abs=1e-12)
        assert br.B_high == pytest.approx(1.0, abs=1e-12)
        eigs = step_to_discrete(TWO_LEVEL, LAT11, 16).mapped_eigenvalues()
        assert br.A_low - 1e-6 <= eigs.min() and eigs.max() <= br.B_high + 1e-6

    def test_oversampled_indicator_is_tight_two(self):
        br = frame_bounds(a_field(CHI_HALVES, None, LAT12))
        assert br.A_low == pytest.approx(2.0, abs=1e-12)
        assert br.B_high == pytest.approx(2.0, abs=1e-12)
        assert br.width <= 1e-12

    def test_wide_window_nu_dependent_bracket(self):
        # A(t, nu) = 5 + 4 cos(2 pi nu) on [0, 1/2), 4 on [1/2, 1): bounds [2, 10]
        br = frame_bounds(a_field(WIDE_FIVE, None, LAT12))
        assert br.A_low <= 2.0 <= br.A_high + 1e-12
        assert br.B_low - 1e-12 <= 10.0 <= br.B_high
        assert br.A_high == pytest.approx(2.0, abs=1e-3)
        assert br.B_high == pytest.approx(10.0, abs=1e-6)

    @pytest.mark.parametrize("lat,cells,seed,N", [(LAT11, 6, 51, 32), (LAT12, 6, 52, 32)])
    def test_bracket_contains_oracle_eigenvalues(self, lat, cells, seed, N):
        g = seeded_window(lat, cells, 0, seed)
        br = frame_bounds(a_field(g, None, lat))
        eigs = step_to_discrete(g, lat, N).mapped_eigenvalues()
        assert br.A_low - 1e-6 <= eigs.min() + 1e-12
        assert eigs.max() <= br.B_high + 1e-6

    def test_refinement_trace_monotone(self):
        br = frame_bounds(a_field(WIDE_FIVE, None, LAT12))
        widths = [max(ah - al, bh - bl) for _, al, ah, bl, bh in br.refinements]
        assert all(w2 <= w1 + 1e-15 for w1, w2 in zip(widths, widths[1:]))
        ns = [row[0] for row in br.refinements]
        assert ns == sorted(ns) and ns[0] >= 1024

    def test_zero_window_bracket(self):
        zero = StepFunction(common_grid(1, 1, 1), 0, [])
        br = frame_bounds(a_field(zero, None, LAT11))
        assert (br.A_low, br.A_high, br.B_low, br.B_high) == (0.0, 0.0, 0.0, 0.0)

    def test_json_shape(self):
        obj = frame_bounds(a_field(TWO_LEVEL, None, LAT11)).to_json_obj()
        assert sorted(obj) == ["A", "B", "refinements", "resolution"]
        assert obj["A"] == [0.25, 0.25] and obj["B"] == [1.0, 1.0]
        assert all(len(row) == 5 for row in obj["refinements"])
        json.dumps(obj)  # serializable as-is

    def test_rejections(self):
        g = seeded_window(LAT23, 6, 0, 53)
        h = seeded_window(LAT23, 5, 0, 54)
        with pytest.raises(GridError):
            frame_bounds(phi_field(g, LAT23))
        with pytest.raises(GridError):
            frame_bounds(a_field(g, h, LAT23))
        sparse = StepFunction(common_grid(1, 2, 1), 0, [1.0, 1.0])
        with pytest.raises(LatticeError):
            frame_bounds(a_field(sparse, None, LatticeParams(1, 2)))

    def test_bracket_validation(self):
        with pytest.raises(LatticeError):
            BoundBracket(1.0, 0.5, 2.0, 3.0, ())


class TestSpectralApply:
    def test_inverse_of_identity(self):
        inv = spectral_apply(a_field(CHI, None, LAT11), "inverse")
        np.testing.assert_allclose(inv.matrices, 1.0, atol=1e-14)
        assert inv.nu_span is None

    def test_two_level_inverse_values(self):
        inv = spectral_apply(a_field(TWO_LEVEL, None, LAT11), "inverse")
        for i in range(inv.t_points):
            want = 1.0 / abs(TWO_LEVEL.value_at(inv.t_sample(i))) ** 2
            np.testing.assert_allclose(inv.matrices[i], want, atol=1e-12)

    def test_power_two_equals_pointwise_square(self):
        g = seeded_window(LAT12, 6, -1, 61)
        af = a_field(g, None, LAT12, 1, 16)
        sq = spectral_apply(af, "power", n=2)
        np.testing.assert_allclose(sq.matrices, af.matrices @ af.matrices, atol=1e-10 * (1 + np.abs(af.matrices).max() ** 2))
        assert sq.nu_span == 2 * af.nu_span

    def test_power_zero_is_identity(self):
        af = a_field(TWO_LEVEL, None, LAT11)
        np.testing.assert_allclose(spectral_apply(af, "power", n=0).matrices, 1.0, atol=1e-14)

    def test_inv_sqrt_squares_to_inverse(self):
        af = a_field(TWO_LEVEL, None, LAT11)
        half = spectral_apply(af, "inv_sqrt")
        inv = spectral_apply(af, "inverse")
        np.testing.assert_allclose(half.matrices @ half.matrices, inv.matrices, atol=1e-12)

    def test_resolvent_identity(self):
        af = a_field(TWO_LEVEL, None, LAT11)
        res = spectral_apply(af, "resolvent", z=-1.0)
        prod = res.matrices @ (-1.0 * np.eye(1) - af.matrices)
        np.testing.assert_allclose(prod, 1.0, atol=1e-12)

    def test_singular_and_near_spectrum_rejections(self):
        gappy = StepFunction(common_grid(1, 1, 2), 0, [1.0])  # translates never cover [1/2, 1)
        af = a_field(gappy, None, LAT11)
        with pytest.raises(LatticeError):
            spectral_apply(af, "inverse")
        with pytest.raises(LatticeError):
            spectral_apply(a_field(CHI, None, LAT11), "resolvent", z=1.0)

    def test_argument_validation(self):
        af = a_field(CHI, None, LAT11)
        with pytest.raises(ValueError):
            spectral_apply(af, "log")
        with pytest.raises(ValueError):
            spectral_apply(af, "power")
        with pytest.raises(ValueError):
            spectral_apply(af, "resolvent")
        with pytest.raises(GridError):
            spectral_apply(phi_field(CHI_HALVES, LAT12), "inverse")


class TestDualWindow:
    def test_indicator_self_dual(self):
        res = dual_window(CHI, LAT11)
        assert res.window == CHI
        assert res.wr_deviation <= 1e-12

    def test_two_level_reciprocal_values(self):
        res = dual_window(TWO_LEVEL, LAT11)
        assert res.window == StepFunction(common_grid(1, 1, 2), 0, [1.0, 2.0])
        assert res.wr_deviation <= 1e-8
        assert res.bracket.A_low == pytest.approx(0.25, abs=1e-12)

    def test_oversampled_indicator_halves(self):
        res = dual_window(CHI_HALVES, LAT12)
        assert res.window == CHI_HALVES * 0.5

    def test_reciprocal_rule_width_one_support(self):
        g = StepFunction(common_grid(1, F(1, 2), 1), 0, [1.0, 0.5])
        res = dual_window(g, LAT12)
        assert res.window == StepFunction(common_grid(1, F(1, 2), 1), 0, [0.5, 1.0])
        assert res.wr_deviation <= 1e-8

    def test_dual_of_dual_round_trip(self):
        once = dual_window(TWO_LEVEL, LAT11).window
        assert dual_window(once, LAT11).window == TWO_LEVEL

    def test_wide_window_adjoint_biorthogonality(self):
        # infinite-support dual: check <gamma, E_{k/a} T_{l/b} g> = ab delta
        # directly (time shifts by 1/b, modulations by 1/a)
        res = dual_window(WIDE_FIVE, LAT12, nu_points=2048)
        gam = res.window
        worst = 0.0
        for k in (-2, -1, 0, 1, 2):
            for l in (-2, -1, 0, 1, 2):
                val = modulated_inner_product(gam, translate(WIDE_FIVE, F(2 * l)), float(k))
                target = 0.5 if (k == 0 and l == 0) else 0.0
                worst = max(worst, abs(val - target))
        assert worst <= 1e-9
        assert res.bracket.A_low >= 1.9

    def test_not_a_frame_rejected(self):
        gappy = StepFunction(common_grid(1, F(1, 2), 1), 0, [1.0])
        with pytest.raises(LatticeError):
            dual_window(gappy, LAT12)


class TestUccOfDual:
    def test_indicator_dual_tails_vanish(self):
        rep = ucc_of_dual(CHI, LAT11, nu_points=256)
        assert rep.condition == "UCC-dual" and rep.verdict == "holds"
        assert rep.bound == pytest.approx(1.0, abs=1e-12)
        assert dict(rep.tail_profile)[1] <= 1e-12

    def test_two_level_only_zero_coefficient(self):
        rep = ucc_of_dual(TWO_LEVEL, LAT11, nu_points=256)
        assert rep.verdict == "holds"
        assert rep.bound == pytest.approx(4.0, abs=1e-9)
        assert dict(rep.tail_profile)[1] <= 1e-12

    def test_random_two_cell_profile_decreasing(self):
        g = StepFunction(common_grid(1, F(1, 2), 1), 0, [2.0, 1.0 + 1.0j])
        rep = ucc_of_dual(g, LAT12, nu_points=256)
        tails = [tail for _, tail in rep.tail_profile]
        assert all(t2 <= t1 + 1e-15 for t1, t2 in zip(tails, tails[1:]))
        assert all(hit is not None for _, hit in rep.details["epsilon_K"])

    def test_wide_window_geometric_tails(self):
        rep = ucc_of_dual(WIDE_FIVE, LAT12, nu_points=1024)
        assert rep.verdict == "holds"
        assert rep.bound == pytest.approx(0.25, abs=1e-9)
        prof = dict(rep.tail_profile)
        assert prof[1] > 0.1          # the tail is genuinely infinite...
        assert prof[8] < 1e-3         # ...but decays geometrically
        assert prof[32] < 1e-10
        tails = [tail for _, tail in rep.tail_profile]
        assert all(t2 <= t1 + 1e-15 for t1, t2 in zip(tails, tails[1:]))
        assert rep.details["refinement_residual"] <= 1e-12

    def test_not_a_frame_rejected(self):
        gappy = StepFunction(common_grid(1, F(1, 2), 1), 0, [1.0])
        with pytest.raises(LatticeError):
            ucc_of_dual(gappy, LAT12, nu_points=128)


class TestTwoVariableSummability:
    """Example 4.13 separates the two summability regimes: coefficient mass
    in nu alone stays finite, joint (t, nu) coefficient mass grows like log."""

    def test_nu_direction_single_coefficient(self):
        af = a_field(TWO_LEVEL, None, LAT11)
        rs, coefs = field_coefficients(af)
        assert rs.tolist() == [0]
        assert float(np.max(np.abs(coefs))) == pytest.approx(1.0, abs=1e-14)

    def test_joint_partial_sums_grow_logarithmically(self):
        af = a_field(TWO_LEVEL, None, LAT11)
        profile = StepFunction(GridSpec(af.t_step), 0, af.matrices[:, 0, 0, 0])
        partials = []
        for K in (8, 16, 32, 64, 128, 256):
            js = np.arange(-K, K + 1)
            partials.append(float(np.sum(np.abs(step_fourier(profile, js)))))
        increments = np.diff(partials)
        assert np.all(increments > 0)  # unbounded joint mass
        ratios = increments[1:] / increments[:-1]
        assert np.all(np.abs(ratios - 1) < 0.1)  # constant increment per doubling = log growth
        assert increments[-1] == pytest.approx(3 * np.log(2) / (4 * np.pi), abs=0.01)


class TestModuleApi:
    def test_all_exports_resolve(self):
        import gaborwalnut.zakmat as zm

        for name in zm.__all__:
            assert getattr(zm, name) is not None
