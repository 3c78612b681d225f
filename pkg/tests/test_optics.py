"""Frequency grid and transfer-function unit tests with brute-force oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from microsim.config import OpticalConfig
from microsim.errors import DimensionError
from microsim.optics import (
    SpectrumField,
    apply_aberration,
    apply_na_mask,
    assemble_system_otf,
    lens_otf,
    make_frequency_grid,
    na_cutoff,
    slab_otf,
    total_otf,
    zernike_spherical_phase,
)


class TestFrequencyGrid:
    def test_dft_ordering_4x4(self):
        grid = make_frequency_grid(4, 4, 1e-6)
        np.testing.assert_allclose(grid.u[0], [0.0, 0.25e6, -0.5e6, -0.25e6])
        np.testing.assert_allclose(grid.v[:, 0], [0.0, 0.25e6, -0.5e6, -0.25e6])

    def test_nyquist_extreme(self):
        p = 0.37e-6
        grid = make_frequency_grid(2, 2, p)
        assert np.max(np.abs(grid.u)) == pytest.approx(1.0 / (2 * p))

    def test_frequency_step(self):
        grid = make_frequency_grid(256, 256, 0.1e-6)
        step = grid.u[0, 1] - grid.u[0, 0]
        assert step == pytest.approx(39062.5)

    def test_single_dc_cell(self):
        grid = make_frequency_grid(8, 6, 1e-6)
        dc = (grid.u == 0) & (grid.v == 0)
        assert np.count_nonzero(dc) == 1
        assert dc[0, 0]

    @pytest.mark.parametrize("w,h,p", [(1, 4, 1e-6), (4, 0, 1e-6), (4, 4, 0.0),
                                       (4, 4, -1e-6)])
    def test_invalid_arguments(self, w, h, p):
        with pytest.raises(ValueError):
            make_frequency_grid(w, h, p)


class TestLensOtf:
    def test_dc_is_unity(self):
        grid = make_frequency_grid(8, 8, 1e-7)
        field = lens_otf(grid, 50e-3, 632.8e-9)
        assert field.values[0, 0] == pytest.approx(1.0 + 0.0j)

    def test_phase_matches_direct_evaluation(self):
        # cell (0, 1) of a 10-px grid at 0.1 um pitch sits exactly at u=1e6
        grid = make_frequency_grid(10, 10, 1e-7)
        assert grid.u[0, 1] == pytest.approx(1e6)
        field = lens_otf(grid, 50e-3, 632.8e-9)
        phase = -np.pi * (1e6**2) * 632.8e-9 / 50e-3
        assert field.values[0, 1] == pytest.approx(np.exp(1j * phase), abs=1e-9)

    def test_unit_magnitude_everywhere(self):
        grid = make_frequency_grid(16, 12, 2e-7)
        field = lens_otf(grid, 20e-3, 500e-9)
        np.testing.assert_allclose(np.abs(field.values), 1.0, atol=1e-12)

    def test_invalid_arguments(self):
        grid = make_frequency_grid(4, 4, 1e-6)
        with pytest.raises(ValueError):
            lens_otf(grid, 0.0, 632.8e-9)
        with pytest.raises(ValueError):
            lens_otf(grid, 50e-3, -1e-9)


class TestSlabOtf:
    def test_dc_is_unity(self):
        grid = make_frequency_grid(8, 8, 1e-7)
        field = slab_otf(grid, 4.177e-7)
        assert field.values[0, 0] == pytest.approx(1.0 + 0.0j)

    def test_phase_matches_direct_evaluation(self):
        lam_cs = 632.8e-9 / 1.515
        grid = make_frequency_grid(10, 10, 1e-7)
        field = slab_otf(grid, lam_cs, sign=1)
        phase = 2 * np.pi * lam_cs * 1e12  # (u^2+v^2) = 1e12 at cell (0, 1)
        assert phase == pytest.approx(2.625e6, rel=1e-3)
        assert field.values[0, 1] == pytest.approx(np.exp(1j * phase), abs=1e-9)

    def test_sign_negation_conjugates(self):
        grid = make_frequency_grid(12, 8, 1.5e-7)
        plus = slab_otf(grid, 4e-7, sign=1)
        minus = slab_otf(grid, 4e-7, sign=-1)
        np.testing.assert_allclose(np.conj(plus.values), minus.values, atol=1e-12)

    def test_unit_magnitude(self):
        grid = make_frequency_grid(8, 8, 1e-7)
        field = slab_otf(grid, 4.2e-7, sign=1, scale=170e-6)
        np.testing.assert_allclose(np.abs(field.values), 1.0, atol=1e-12)

    def test_invalid_wavelength(self):
        grid = make_frequency_grid(4, 4, 1e-6)
        with pytest.raises(ValueError):
            slab_otf(grid, 0.0)


class TestTotalOtf:
    def test_single_component_unchanged(self):
        grid = make_frequency_grid(6, 6, 1e-7)
        field = lens_otf(grid, 50e-3, 632.8e-9)
        out = total_otf([field])
        np.testing.assert_array_equal(out.values, field.values)

    def test_unit_magnitude_product(self):
        grid = make_frequency_grid(6, 6, 1e-7)
        a = lens_otf(grid, 50e-3, 632.8e-9)
        b = slab_otf(grid, 4.1e-7)
        out = total_otf([a, b])
        np.testing.assert_allclose(np.abs(out.values), 1.0, atol=1e-12)

    def test_dc_product_unity(self):
        grid = make_frequency_grid(6, 6, 1e-7)
        out = total_otf([lens_otf(grid, 20e-3, 632.8e-9),
                         lens_otf(grid, 50e-3, 4.18e-7)])
        assert out.values[0, 0] == pytest.approx(1.0 + 0.0j)

    @given(st.permutations(range(4)))
    @settings(max_examples=20, deadline=None)
    def test_commutative_associative(self, order):
        grid = make_frequency_grid(5, 5, 1e-7)
        parts = [lens_otf(grid, f, 632.8e-9) for f in (10e-3, 20e-3, 30e-3, 50e-3)]
        base = total_otf(parts)
        shuffled = total_otf([parts[i] for i in order])
        np.testing.assert_allclose(base.values, shuffled.values, atol=1e-12)

    def test_grid_mismatch(self):
        a = lens_otf(make_frequency_grid(4, 4, 1e-6), 50e-3, 632.8e-9)
        b = lens_otf(make_frequency_grid(6, 6, 1e-6), 50e-3, 632.8e-9)
        with pytest.raises(DimensionError):
            total_otf([a, b])

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            total_otf([])


class TestNaCutoff:
    def test_reference_constants(self):
        cutoff = na_cutoff(OpticalConfig())
        assert cutoff == pytest.approx(1.45 * 1.515 / 632.8e-9)
        assert cutoff == pytest.approx(3.4715e6, rel=1e-3)

    def test_linear_in_na_and_index_inverse_in_wavelength(self):
        base = OpticalConfig()
        c0 = na_cutoff(base)
        import dataclasses
        assert na_cutoff(dataclasses.replace(base, na=base.na / 2)) == pytest.approx(c0 / 2)
        assert na_cutoff(dataclasses.replace(base, lambda_vac=2 * base.lambda_vac)) \
            == pytest.approx(c0 / 2)
        # n_oil also scales the slab terms but the cutoff must stay linear in it
        c_oil = na_cutoff(dataclasses.replace(base, n_oil=base.n_oil * 1.1))
        assert c_oil == pytest.approx(c0 * 1.1)


class TestNaMask:
    def test_open_mask_is_identity(self):
        grid = make_frequency_grid(16, 16, 1e-7)
        field = lens_otf(grid, 50e-3, 632.8e-9)
        out = apply_na_mask(field, cutoff=1e12)
        np.testing.assert_array_equal(out.values, field.values)

    def test_tiny_cutoff_keeps_only_dc(self):
        grid = make_frequency_grid(8, 8, 1e-7)
        field = SpectrumField(grid=grid, values=np.ones(grid.shape, dtype=complex))
        out = apply_na_mask(field, cutoff=1.0)
        assert out.values[0, 0] == 1.0
        assert np.count_nonzero(out.values) == 1

    def test_zero_count_matches_brute_force(self):
        rng = np.random.default_rng(7)
        grid = make_frequency_grid(32, 24, 1e-7)
        values = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        cutoff = 0.5 / (2 * 1e-7)  # half Nyquist
        out = apply_na_mask(SpectrumField(grid=grid, values=values), cutoff)
        expected_zeros = 0
        for i in range(grid.shape[0]):
            for j in range(grid.shape[1]):
                if np.hypot(grid.u[i, j], grid.v[i, j]) > cutoff:
                    expected_zeros += 1
                    assert out.values[i, j] == 0
                else:
                    assert out.values[i, j] == values[i, j]
        assert np.count_nonzero(out.values == 0) == expected_zeros

    def test_idempotent_bitwise(self):
        rng = np.random.default_rng(3)
        grid = make_frequency_grid(16, 16, 1e-7)
        field = SpectrumField(grid=grid,
                              values=rng.standard_normal(grid.shape) + 0j)
        once = apply_na_mask(field, 2e6)
        twice = apply_na_mask(once, 2e6)
        assert np.array_equal(once.values, twice.values)


class TestZernike:
    def test_anchor_points(self):
        sqrt3 = np.sqrt(3.0)
        grid = make_frequency_grid(10, 10, 1e-7)
        cutoff = 1e6
        z4 = zernike_spherical_phase(grid, cutoff)
        assert z4[0, 0] == pytest.approx(-sqrt3, abs=1e-12)       # rho = 0
        # cell (0, 1) has radius exactly 1e6 = cutoff -> rho = 1
        assert z4[0, 1] == pytest.approx(sqrt3, abs=1e-12)
        rho = grid.radius() / cutoff
        mid = np.isclose(rho, 1 / np.sqrt(2))
        if mid.any():
            np.testing.assert_allclose(z4[mid], 0.0, atol=1e-12)
        # analytic check at rho = 1/sqrt(2) regardless of grid sampling
        assert np.sqrt(3.0) * (2 * 0.5 - 1) == pytest.approx(0.0, abs=1e-15)

    def test_radial_symmetry(self):
        grid = make_frequency_grid(128, 128, 1e-7)
        z4 = zernike_spherical_phase(grid, 2e6)
        r = grid.radius()
        # mirrored cells share a radius; their Z4 must agree to 1e-12
        flipped = z4[:, ::-1]
        r_flipped = r[:, ::-1]
        same = np.isclose(r, r_flipped, rtol=0, atol=0)
        np.testing.assert_allclose(z4[same], flipped[same], atol=1e-12)

    def test_clamped_outside_pupil(self):
        grid = make_frequency_grid(16, 16, 1e-7)
        z4 = zernike_spherical_phase(grid, cutoff=1.0)  # all cells beyond cutoff
        np.testing.assert_allclose(z4.ravel()[1:], np.sqrt(3.0), atol=1e-12)


class TestApplyAberration:
    def test_zero_phase_is_identity(self):
        grid = make_frequency_grid(8, 8, 1e-7)
        field = lens_otf(grid, 50e-3, 632.8e-9)
        out = apply_aberration(field, np.zeros(grid.shape))
        np.testing.assert_allclose(out.values, field.values, atol=1e-15)

    def test_pi_phase_negates_unit_field(self):
        grid = make_frequency_grid(8, 8, 1e-7)
        field = SpectrumField(grid=grid, values=np.ones(grid.shape, dtype=complex))
        out = apply_aberration(field, np.full(grid.shape, np.pi))
        np.testing.assert_allclose(out.values, -1.0, atol=1e-12)

    def test_magnitude_preserved(self):
        rng = np.random.default_rng(11)
        grid = make_frequency_grid(12, 12, 1e-7)
        values = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        field = SpectrumField(grid=grid, values=values)
        out = apply_aberration(field, rng.standard_normal(grid.shape))
        np.testing.assert_allclose(np.abs(out.values), np.abs(values), atol=1e-12)

    def test_shape_mismatch(self):
        grid = make_frequency_grid(8, 8, 1e-7)
        field = lens_otf(grid, 50e-3, 632.8e-9)
        with pytest.raises(DimensionError):
            apply_aberration(field, np.zeros((4, 4)))


class TestSystemOtf:
    def test_band_limited_and_unit_inside(self):
        grid = make_frequency_grid(64, 64, 1e-7)
        config = OpticalConfig()
        h = assemble_system_otf(grid, config)
        cutoff = na_cutoff(config)
        outside = grid.radius() > cutoff
        assert np.all(h.values[outside] == 0)
        np.testing.assert_allclose(np.abs(h.values[~outside]), 1.0, atol=1e-12)

    def test_aberration_toggle_changes_phase_only(self):
        grid = make_frequency_grid(32, 32, 1e-7)
        config = OpticalConfig()
        with_ab = assemble_system_otf(grid, config, aberration=True)
        without = assemble_system_otf(grid, config, aberration=False)
        np.testing.assert_allclose(np.abs(with_ab.values), np.abs(without.values),
                                   atol=1e-12)
        assert not np.allclose(with_ab.values, without.values)
