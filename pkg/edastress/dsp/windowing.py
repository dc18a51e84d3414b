"""Fixed-size sliding windows over a record, anchored at its first sample."""

import dataclasses
import logging

import numpy as np

from edastress.constants import NON_STRESS, SHIFT_S, STRESS, WINDOW_S
from edastress.errors import ConfigError
from edastress.util.math_utils import round_half_up

logger = logging.getLogger(__name__)

# Returned by window_label for windows whose labels split exactly in half.
DROP = None


@dataclasses.dataclass(frozen=True, eq=False)
class Window(object):
    start_index: int
    end_index: int
    start_time_s: float
    samples: np.ndarray
    labels: np.ndarray

    def __len__(self):
        return self.end_index - self.start_index


class SlicedRecord(tuple):
    """The windows of one record, plus whether it was too short for any."""

    def __new__(cls, windows, short_record=False):
        obj = super(SlicedRecord, cls).__new__(cls, windows)
        obj.short_record = short_record
        return obj


def window_params(sampling_rate_hz, window_s=WINDOW_S, shift_s=SHIFT_S):
    """Window and shift in samples."""
    if not window_s > 0 or not shift_s > 0:
        raise ConfigError("Window and shift must be positive, got %r / %r." % (
            window_s, shift_s))
    w = round_half_up(window_s * sampling_rate_hz)
    s = round_half_up(shift_s * sampling_rate_hz)
    if w < 1 or s < 1:
        raise ConfigError("Window %g s / shift %g s is under one sample at %g Hz." % (
            window_s, shift_s, sampling_rate_hz))
    return w, s


def window_count(n_samples, w, s):
    if n_samples < w:
        return 0
    return (n_samples - w) // s + 1


def window_slices(record, window_s=WINDOW_S, shift_s=SHIFT_S, samples=None):
    """Cuts `record` into windows at offsets 0, S, 2S, ...

    `samples` optionally replaces the record's own samples (e.g. a filtered
    copy); labels always come from the record.  The trailing partial window
    is discarded.
    """
    fs = record.sampling_rate_hz
    w, s = window_params(fs, window_s, shift_s)
    values = record.samples if samples is None else np.asarray(samples, dtype=float)
    n = len(record)
    if len(values) != n:
        raise ConfigError("Replacement samples differ in length from the record.")

    count = window_count(n, w, s)
    if count == 0:
        logger.warning("%s: %.1f s record is shorter than one %g s window",
                       record.stem(), record.duration_s, window_s)
        return SlicedRecord((), short_record=True)

    windows = []
    for k in range(count):
        start = k * s
        windows.append(Window(
            start_index=start,
            end_index=start + w,
            start_time_s=start / fs,
            samples=values[start:start + w],
            labels=record.labels[start:start + w],
        ))
    return SlicedRecord(windows)


def window_label(window):
    """Majority vote over the window's labels; an exact tie returns DROP."""
    n_stress = int(np.count_nonzero(window.labels == STRESS))
    n_rest = len(window.labels) - n_stress
    if n_stress > n_rest:
        return STRESS
    elif n_rest > n_stress:
        return NON_STRESS
    return DROP
