"""Waveform primitives: monocycle rendering, inner products, delays."""

import numpy as np
import pytest

from dsuwb import (ConfigurationError, PulseShape, SampledWaveform, SampleGrid,
                   UsageError, delay, render_monocycle, windowed_inner_product)


def brute_inner(a, b, start, length):
    """Plain-Python left-Riemann sum, the independent oracle for inner products."""
    dt = a.sample_period
    total = 0.0
    n = round(start / dt)
    while n * dt < start + length - 1e-12:
        ia = n - round(a.origin / dt)
        ib = n - round(b.origin / dt)
        va = a.samples[ia] if 0 <= ia < len(a.samples) else 0.0
        vb = b.samples[ib] if 0 <= ib < len(b.samples) else 0.0
        total += va * vb * dt
        n += 1
    return total


class TestMonocycle:
    def test_unit_energy_default_grid(self):
        p = render_monocycle(PulseShape(1.0))
        assert abs(p.energy() - 1.0) < 1e-9

    def test_unit_energy_many_grids(self):
        for period in (0.125, 0.05, 0.025, 0.01):
            p = render_monocycle(PulseShape(1.0), sample_period=period)
            assert abs(p.energy() - 1.0) < 1e-9

    def test_rescaling_is_idempotent(self):
        p = render_monocycle(PulseShape(1.0))
        doubled = p.samples * 2.0
        renorm = doubled / np.sqrt(np.sum(doubled**2) * p.sample_period)
        np.testing.assert_allclose(renorm, p.samples, rtol=1e-12)

    def test_support_confined_to_width(self):
        p = render_monocycle(PulseShape(1.0))
        assert len(p.samples) == 20
        assert p.duration == pytest.approx(1.0)

    def test_too_coarse_grid_rejected(self):
        with pytest.raises(ConfigurationError):
            render_monocycle(PulseShape(1.0), sample_period=0.2)

    def test_zero_mean_ish(self):
        # second derivative of a Gaussian integrates to ~0
        p = render_monocycle(PulseShape(1.0))
        assert abs(np.sum(p.samples) * p.sample_period) < 2e-2


class TestInnerProduct:
    def setup_method(self):
        self.p = render_monocycle(PulseShape(1.0))

    def test_self_product_is_energy(self):
        v = windowed_inner_product(self.p, self.p, 0.0, 1.0)
        assert abs(v - 1.0) < 1e-9

    def test_disjoint_supports_zero(self):
        shifted = delay(self.p, 5.0)
        assert windowed_inner_product(self.p, shifted, 0.0, 10.0) == 0.0

    def test_frame_shifted_monocycles_orthogonal(self):
        shifted = delay(self.p, 10.0)
        v = windowed_inner_product(self.p, shifted, 0.0, 10.0)
        assert abs(v) < 1e-9

    def test_symmetry_and_bilinearity(self):
        rng = np.random.default_rng(0)
        a = SampledWaveform(0.05, rng.standard_normal(40))
        b = SampledWaveform(0.05, rng.standard_normal(40))
        c = SampledWaveform(0.05, rng.standard_normal(40))
        ab = windowed_inner_product(a, b, 0.0, 2.0)
        ba = windowed_inner_product(b, a, 0.0, 2.0)
        assert ab == pytest.approx(ba, rel=1e-12)
        lhs = windowed_inner_product(a, SampledWaveform(0.05, 2.0 * b.samples + c.samples), 0.0, 2.0)
        rhs = 2.0 * ab + windowed_inner_product(a, c, 0.0, 2.0)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(1)
        a = SampledWaveform(0.05, rng.standard_normal(60), origin=0.25)
        b = SampledWaveform(0.05, rng.standard_normal(30), origin=1.0)
        for start, length in ((0.0, 4.0), (0.5, 1.5), (1.25, 0.6)):
            got = windowed_inner_product(a, b, start, length)
            want = brute_inner(a, b, start, length)
            assert got == pytest.approx(want, abs=1e-12)

    def test_mismatched_periods_rejected(self):
        a = SampledWaveform(0.05, np.ones(4))
        b = SampledWaveform(0.1, np.ones(4))
        with pytest.raises(UsageError):
            windowed_inner_product(a, b, 0.0, 0.2)


class TestDelay:
    def test_identity_and_inverse(self):
        p = render_monocycle(PulseShape(1.0))
        assert delay(p, 0.0) == p
        back = delay(delay(p, 0.35), -0.35)
        assert back.origin == pytest.approx(p.origin)
        np.testing.assert_array_equal(back.samples, p.samples)

    def test_energy_preserved_exactly(self):
        p = render_monocycle(PulseShape(1.0))
        assert delay(p, 2.5).energy() == p.energy()

    def test_off_grid_delay_rejected(self):
        p = render_monocycle(PulseShape(1.0))
        with pytest.raises(UsageError):
            delay(p, 0.033)


def test_grid_alignment_check():
    g = SampleGrid(0.05)
    assert g.to_samples(10.0) == 200
    with pytest.raises(UsageError):
        g.to_samples(0.07)
