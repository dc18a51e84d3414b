"""
Conditional Butterworth low-pass pre-processing.

A record is filtered only when the cutoff normalized by its Nyquist
frequency lies strictly inside (0, 1); low-rate wearables (4-5 Hz) have a
Nyquist frequency at or below the 5 Hz cutoff and pass through untouched.
"""

import dataclasses
import logging

import numpy as np
from scipy import signal

from edastress.constants import FILTER_CUTOFF_HZ, FILTER_ORDER
from edastress.errors import DataError, FilterDesignError
from edastress.util.asserts import assert_finite, assert_positive

logger = logging.getLogger(__name__)


def normalized_cutoff(sampling_rate_hz, cutoff_hz):
    assert_positive(sampling_rate_hz, 'sampling_rate_hz')
    assert_positive(cutoff_hz, 'cutoff_hz')
    return cutoff_hz / (sampling_rate_hz / 2.0)


def should_filter(sampling_rate_hz, cutoff_hz=FILTER_CUTOFF_HZ):
    """True iff the normalized cutoff lies in the open interval (0, 1)."""
    wn = normalized_cutoff(sampling_rate_hz, cutoff_hz)
    return bool(0.0 < wn < 1.0)


@dataclasses.dataclass(frozen=True)
class FilterDesign(object):
    """A low-pass filter as a cascade of second-order sections.

    `sections` has one row per biquad in scipy's sos layout
    ``[b0, b1, b2, 1, a1, a2]``.
    """

    order: int
    cutoff_hz: float
    sampling_rate_hz: float
    sections: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'sections', np.array(self.sections, dtype=float))

    @property
    def n_sections(self):
        return self.sections.shape[0]

    def biquads(self):
        """Returns a list of (b0, b1, b2, a1, a2) tuples."""
        return [(s[0], s[1], s[2], s[4], s[5]) for s in self.sections]

    def frequency_response(self, freqs_hz):
        """Complex response H(f) at the given frequencies in Hz."""
        _, h = signal.sosfreqz(self.sections, worN=np.atleast_1d(freqs_hz),
                               fs=self.sampling_rate_hz)
        return h

    def dc_gain(self):
        return float(np.abs(self.frequency_response([0.0])[0]))

    def poles(self):
        return np.concatenate([np.roots([1.0, s[4], s[5]]) for s in self.sections])

    def is_stable(self):
        """Every pole strictly inside the unit circle."""
        return bool(np.all(np.abs(self.poles()) < 1.0))


def design_butterworth_lowpass(order=FILTER_ORDER, cutoff_hz=FILTER_CUTOFF_HZ,
                               sampling_rate_hz=None):
    """Bilinear-transform Butterworth low-pass with frequency pre-warping.

    :param order: even filter order, realised as order/2 biquads.
    :param cutoff_hz: -3 dB frequency.
    :param sampling_rate_hz: rate of the signal the filter will run on.
    """
    if sampling_rate_hz is None:
        raise FilterDesignError("sampling_rate_hz is required.")
    if int(order) != order or order < 2 or order % 2:
        raise FilterDesignError("Filter order must be even and >= 2, got %r." % order)
    if not should_filter(sampling_rate_hz, cutoff_hz):
        raise FilterDesignError(
            "Normalized cutoff %.4g is outside (0, 1) for %g Hz at %g Hz." % (
                normalized_cutoff(sampling_rate_hz, cutoff_hz), cutoff_hz,
                sampling_rate_hz))
    # butter() pre-warps the digital cutoff before the bilinear transform.
    sos = signal.butter(int(order), cutoff_hz, btype='lowpass', output='sos',
                        fs=sampling_rate_hz)
    design = FilterDesign(int(order), float(cutoff_hz), float(sampling_rate_hz), sos)
    if not design.is_stable():
        raise FilterDesignError("Designed filter has a pole on or outside the unit circle.")
    return design


def apply_filter(design, samples, initial='zero'):
    """Forward (causal) pass through the biquad cascade.

    :param initial: 'zero' starts from rest; 'steady' starts in the steady
        state of a constant input equal to the first sample.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise DataError("Cannot filter an empty signal.")
    assert_finite(samples, 'signal to filter')
    sos = np.array(design.sections, dtype=float)
    if initial == 'zero':
        return signal.sosfilt(sos, samples)
    if initial == 'steady':
        zi = signal.sosfilt_zi(sos) * samples[0]
        filtered, _ = signal.sosfilt(sos, samples, zi=zi)
        return filtered
    raise FilterDesignError("Unknown initial filter state %r." % (initial,))


def preprocess_record(record, cutoff_hz=FILTER_CUTOFF_HZ, order=FILTER_ORDER):
    """Applies the conditional filter rule to one record.

    returns (signal, filtered) where `filtered` says whether the low-pass
    was applied.
    """
    if not should_filter(record.sampling_rate_hz, cutoff_hz):
        logger.info("%s: %g Hz cutoff is at/above Nyquist of %g Hz; not filtered",
                    record.stem(), cutoff_hz, record.sampling_rate_hz)
        return np.array(record.samples, dtype=float), False
    design = design_butterworth_lowpass(order, cutoff_hz, record.sampling_rate_hz)
    logger.info("%s: low-pass filtered (order %d, %g Hz cutoff, %g Hz)",
                record.stem(), order, cutoff_hz, record.sampling_rate_hz)
    return apply_filter(design, record.samples, initial='steady'), True
