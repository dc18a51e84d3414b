import os
import unittest

import numpy as np
from scipy import signal

import sys
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '../..'))
from edastress.dsp.butterworth import (
    apply_filter, design_butterworth_lowpass, normalized_cutoff, preprocess_record,
    should_filter,
)
from edastress.errors import DataError, DomainError, FilterDesignError
from edastress.util.signal_record import SignalRecord


class TestFilterRule(unittest.TestCase):

    def test_should_filter(self):
        self.assertTrue(should_filter(700.0))
        self.assertTrue(should_filter(32.0))
        self.assertFalse(should_filter(4.0))
        self.assertFalse(should_filter(5.0))
        # Wn == 1 exactly is outside the open interval.
        self.assertFalse(should_filter(10.0))
        self.assertAlmostEqual(normalized_cutoff(700.0, 5.0), 5.0 / 350.0)
        with self.assertRaises(DomainError):
            normalized_cutoff(0.0, 5.0)

    def test_scale_invariance(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            fs = rng.uniform(1.0, 1000.0)
            cutoff = rng.uniform(0.1, 50.0)
            k = rng.uniform(0.01, 100.0)
            if abs(normalized_cutoff(fs, cutoff) - 1.0) < 1e-9:
                continue
            self.assertEqual(should_filter(fs, cutoff), should_filter(k * fs, k * cutoff))


class TestButterworthDesign(unittest.TestCase):

    def test_response(self):
        design = design_butterworth_lowpass(4, 5.0, 700.0)
        self.assertEqual(design.n_sections, 2)
        self.assertEqual(len(design.biquads()), 2)
        self.assertTrue(design.is_stable())
        self.assertAlmostEqual(design.dc_gain(), 1.0, places=9)
        gain_at_cutoff = abs(design.frequency_response([5.0])[0])
        self.assertAlmostEqual(gain_at_cutoff, 1.0 / np.sqrt(2.0), places=6)
        self.assertLess(abs(design.frequency_response([50.0])[0]), 1e-3)

    def test_order(self):
        self.assertEqual(design_butterworth_lowpass(8, 5.0, 700.0).n_sections, 4)
        for order in (0, 3, 2.5):
            with self.assertRaises(FilterDesignError):
                design_butterworth_lowpass(order, 5.0, 700.0)

    def test_cutoff_outside(self):
        with self.assertRaises(FilterDesignError):
            design_butterworth_lowpass(4, 5.0, 8.0)
        with self.assertRaises(FilterDesignError):
            design_butterworth_lowpass(4, 5.0)

    def test_apply(self):
        design = design_butterworth_lowpass(4, 5.0, 700.0)
        t = np.arange(7000) / 700.0
        steady = apply_filter(design, np.full(7000, 3.0))
        self.assertAlmostEqual(steady[-1], 3.0, places=6)
        # Zero initial state: the output starts from rest.
        self.assertLess(steady[0], 0.01)

        hum = apply_filter(design, np.sin(2 * np.pi * 50.0 * t))
        self.assertLess(np.max(np.abs(hum[3500:])), 1e-2)

        with self.assertRaises(DataError):
            apply_filter(design, [])
        with self.assertRaises(DataError):
            apply_filter(design, [1.0, np.nan])

    def test_impulse_response(self):
        design = design_butterworth_lowpass(4, 5.0, 700.0)
        n = 4096
        impulse = np.zeros(n)
        impulse[0] = 1.0
        h = apply_filter(design, impulse)

        b, a = signal.sos2tf(design.sections)
        np.testing.assert_allclose(h, signal.lfilter(b, a, impulse), atol=1e-6)

        freqs = np.arange(n // 2) * 700.0 / n
        np.testing.assert_allclose(np.fft.fft(h)[:n // 2],
                                   design.frequency_response(freqs), atol=1e-6)

    def test_stop_band_sine(self):
        design = design_butterworth_lowpass(4, 5.0, 700.0)
        x = np.sin(2 * np.pi * 100.0 * np.arange(7000) / 700.0)
        y = apply_filter(design, x)
        rms = lambda v: np.sqrt(np.mean(v ** 2))
        self.assertLess(rms(y[700:]), 0.01 * rms(x[700:]))

    def test_linearity(self):
        design = design_butterworth_lowpass(4, 5.0, 700.0)
        rng = np.random.default_rng(5)
        x = rng.normal(size=2000)
        y = rng.normal(size=2000)
        np.testing.assert_allclose(
            apply_filter(design, 2.5 * x - 0.75 * y),
            2.5 * apply_filter(design, x) - 0.75 * apply_filter(design, y), atol=1e-9)

    def test_steady_start(self):
        design = design_butterworth_lowpass(4, 5.0, 700.0)
        out = apply_filter(design, np.full(700, 7.25), initial='steady')
        np.testing.assert_allclose(out, 7.25, atol=1e-9)
        with self.assertRaises(FilterDesignError):
            apply_filter(design, [1.0, 2.0], initial='mirror')

    def test_read_only_input(self):
        design = design_butterworth_lowpass(4, 5.0, 700.0)
        samples = np.ones(100)
        samples.setflags(write=False)
        design.sections.setflags(write=False)
        self.assertEqual(len(apply_filter(design, samples)), 100)

    def test_preprocess_record(self):
        low = SignalRecord('S01', 'wrist', 4.0, np.linspace(1, 2, 40), np.zeros(40))
        signal, filtered = preprocess_record(low)
        self.assertFalse(filtered)
        np.testing.assert_array_equal(signal, low.samples)

        high = SignalRecord('S01', 'chest', 700.0, np.full(1400, 2.0), np.zeros(1400))
        signal, filtered = preprocess_record(high)
        self.assertTrue(filtered)
        self.assertEqual(len(signal), 1400)
        self.assertAlmostEqual(signal[-1], 2.0, places=4)

    def test_high_rate_record(self):
        t = np.arange(7000) / 700.0
        samples = 4.0 + 0.2 * np.sin(2 * np.pi * 0.1 * t) + 0.05 * np.sin(2 * np.pi * 50.0 * t)
        record = SignalRecord('S02', 'chest', 700.0, samples, np.zeros(7000))
        signal_out, filtered = preprocess_record(record)
        self.assertTrue(filtered)
        slow = 4.0 + 0.2 * np.sin(2 * np.pi * 0.1 * t)
        # No start-up transient: the first second already tracks the slow part.
        self.assertLess(np.max(np.abs(signal_out[:700] - slow[:700])), 0.05)

if __name__ == '__main__':
    unittest.main()
