"""
Per-window statistical EDA features.

Each window is split into a tonic level (SCL, centered moving median) and
a phasic response (SCR, the residual).  SCR events are detected on the
phasic part and summarised together with plain statistics of the three
channels.  The time-axis slope of the signal is deliberately not a
feature.
"""

import dataclasses
import logging

import numpy as np
import pandas as pd

from edastress.constants import (
    FILTER_CUTOFF_HZ, FILTER_ORDER, SCR_MIN_AMPLITUDE_US, SHIFT_S,
    TONIC_MEDIAN_WINDOW_S, WINDOW_S,
)
from edastress.dsp.butterworth import preprocess_record
from edastress.dsp.windowing import DROP, window_label, window_slices
from edastress.errors import ContractError, DataError
from edastress.util.asserts import assert_finite, assert_positive
from edastress.util.math_utils import round_half_up

logger = logging.getLogger(__name__)

_CHANNEL_STATS = ('mean', 'std', 'min', 'max', 'range')

FEATURE_NAMES = tuple(
    ['f%02d_%s_%s' % (1 + 5 * c + s, channel, stat)
     for c, channel in enumerate(('eda', 'scl', 'scr'))
     for s, stat in enumerate(_CHANNEL_STATS)]
    + [
        'f16_scr_peak_count',
        'f17_scr_amp_mean',
        'f18_scr_amp_max',
        'f19_scr_amp_std',
        'f20_scr_amp_sum',
        'f21_scr_rise_mean',
        'f22_scr_rise_sum',
        'f23_scr_auc',
        'f24_d1_mean_abs',
        'f25_d2_mean_abs',
    ]
)
N_FEATURES = len(FEATURE_NAMES)


@dataclasses.dataclass(frozen=True, eq=False)
class Decomposition(object):
    tonic: np.ndarray
    phasic: np.ndarray


@dataclasses.dataclass(frozen=True)
class ScrEvent(object):
    onset_index: int
    peak_index: int
    amplitude: float
    rise_time_s: float


@dataclasses.dataclass(frozen=True, eq=False)
class WindowFeatures(object):
    subject_id: str
    t_start_s: float
    label: int
    features: np.ndarray

    def as_dict(self):
        return dict(zip(FEATURE_NAMES, self.features.tolist()))


def median_window_samples(sampling_rate_hz, window_s=TONIC_MEDIAN_WINDOW_S):
    """Odd length of the centered median window."""
    return 2 * round_half_up(window_s / 2.0 * sampling_rate_hz) + 1


def decompose(samples, sampling_rate_hz, median_window_s=TONIC_MEDIAN_WINDOW_S):
    """Splits `samples` into tonic + phasic.

    The tonic level is a centered moving median, the edges clamped by
    repeating the first/last sample; signals shorter than half the median
    window get the global median as tonic level.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise DataError("Cannot decompose an empty signal.")
    assert_finite(x, 'signal to decompose')
    assert_positive(sampling_rate_hz, 'sampling_rate_hz')

    k = median_window_samples(sampling_rate_hz, median_window_s)
    half = k // 2
    if len(x) < k / 2.0:
        tonic = np.full_like(x, np.median(x))
    else:
        padded = np.pad(x, half, mode='edge')
        rolled = pd.Series(padded).rolling(k, center=True).median().to_numpy()
        tonic = rolled[half:half + len(x)]
    return Decomposition(tonic=tonic, phasic=x - tonic)


def detect_scr_events(phasic, sampling_rate_hz, min_amplitude=SCR_MIN_AMPLITUDE_US):
    """Finds SCR events in a phasic signal.

    An onset is a sample where the first difference turns positive; its
    peak is the first sample after it where the difference stops being
    positive.  A rise still going at the end of the signal is not an event.
    Events below `min_amplitude` are discarded.
    """
    phasic = np.asarray(phasic, dtype=float)
    if len(phasic) < 2:
        return []
    rising = np.diff(phasic) > 0
    was_rising = np.concatenate(([False], rising[:-1]))
    onsets = np.flatnonzero(rising & ~was_rising)
    stops = np.flatnonzero(~rising)

    pos = np.searchsorted(stops, onsets)
    complete = pos < len(stops)
    onsets = onsets[complete]
    peaks = stops[pos[complete]]

    events = []
    for onset, peak in zip(onsets, peaks):
        amplitude = phasic[peak] - phasic[onset]
        if amplitude >= min_amplitude:
            events.append(ScrEvent(
                onset_index=int(onset),
                peak_index=int(peak),
                amplitude=float(amplitude),
                rise_time_s=(peak - onset) / float(sampling_rate_hz),
            ))
    return events


def _channel_stats(values):
    lo, hi = np.min(values), np.max(values)
    return [np.mean(values), np.std(values), lo, hi, hi - lo]


def _event_stats(events):
    if not events:
        return [0.0] * 7
    amps = np.array([e.amplitude for e in events])
    rises = np.array([e.rise_time_s for e in events])
    return [
        float(len(events)),
        np.mean(amps), np.max(amps), np.std(amps), np.sum(amps),
        np.mean(rises), np.sum(rises),
    ]


def _mean_abs_diff(values, order):
    if len(values) <= order:
        return 0.0
    return float(np.mean(np.abs(np.diff(values, n=order))))


def feature_vector(samples, sampling_rate_hz, min_amplitude=SCR_MIN_AMPLITUDE_US):
    """The 25 features of FEATURE_NAMES, in order, for one stretch of signal."""
    x = np.asarray(samples, dtype=float)
    parts = decompose(x, sampling_rate_hz)
    events = detect_scr_events(parts.phasic, sampling_rate_hz, min_amplitude)
    values = (
        _channel_stats(x)
        + _channel_stats(parts.tonic)
        + _channel_stats(parts.phasic)
        + _event_stats(events)
        + [np.sum(np.maximum(parts.phasic, 0.0)) / sampling_rate_hz,
           _mean_abs_diff(x, 1),
           _mean_abs_diff(x, 2)]
    )
    vector = np.array(values, dtype=float)
    if vector.shape != (N_FEATURES,) or not np.all(np.isfinite(vector)):
        raise DataError("Feature computation produced a malformed vector.")
    return vector


def compute_features(window, sampling_rate_hz, subject_id=''):
    """Labels `window` by majority vote and computes its feature vector.

    Tie windows carry no label; passing one here is a contract error, the
    caller is expected to drop them first.
    """
    label = window_label(window)
    if label is DROP:
        raise ContractError("Window at %.1f s has tied labels." % window.start_time_s)
    return WindowFeatures(
        subject_id=str(subject_id),
        t_start_s=float(window.start_time_s),
        label=int(label),
        features=feature_vector(window.samples, sampling_rate_hz),
    )


def extract_record_features(record, window_s=WINDOW_S, shift_s=SHIFT_S,
                            cutoff_hz=FILTER_CUTOFF_HZ, order=FILTER_ORDER):
    """Filter (when the Nyquist rule allows) -> window -> label -> features.

    returns a list of WindowFeatures ordered by window start.
    """
    signal, _ = preprocess_record(record, cutoff_hz, order)
    windows = window_slices(record, window_s, shift_s, samples=signal)
    rows = []
    n_dropped = 0
    for window in windows:
        if window_label(window) is DROP:
            n_dropped += 1
            continue
        rows.append(compute_features(window, record.sampling_rate_hz, record.subject_id))
    if n_dropped:
        logger.debug("%s: dropped %d windows with tied labels", record.stem(), n_dropped)
    return rows
