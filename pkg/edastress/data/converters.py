"""Converters from documented dataset CSV exports to SignalRecords.

The original datasets ship in tool-specific binary archives; users export
one CSV per subject/device first.  Supported export layouts:

    WESAD           columns ``eda,label``; label = WESAD protocol code
    AffectiveROAD   columns ``eda,stress_metric``; metric continuous in [0, 1]
    generic         columns ``eda,label``; label already 0/1
"""

import abc
import dataclasses
import logging

import numpy as np
import pandas as pd

from edastress.constants import NON_STRESS, STRESS, STRESS_THRESHOLD
from edastress.errors import DomainError, ParseError, SchemaError
from edastress.util.signal_record import Device, SignalRecord

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class ContinuousStressLabel(object):
    """A continuous stress rating in [0, 1] and the cut that binarizes it."""

    values: np.ndarray
    threshold: float = STRESS_THRESHOLD

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise DomainError("threshold must lie in (0, 1), got %r." % self.threshold)
        object.__setattr__(self, 'values', np.asarray(self.values, dtype=float))


def threshold_labels(continuous):
    """Binarizes a continuous rating: 1 iff value >= threshold.

    A value exactly at the threshold counts as stress.
    """
    values = continuous.values
    outside = ~((values >= 0.0) & (values <= 1.0))  # also catches NaN
    if np.any(outside):
        idx = int(np.flatnonzero(outside)[0])
        raise DomainError("stress value %r at index %d is outside [0, 1]." % (
            values[idx], idx))
    return np.where(values >= continuous.threshold, STRESS, NON_STRESS).astype(np.int8)


class DatasetExportConverter(object):
    """Override this base class. Implement `_labels()` for one export layout."""

    COLUMNS = ('eda', 'label')

    def __init__(self, subject_id, device, sampling_rate_hz):
        self.subject_id = subject_id
        self.device = Device(device)
        self.sampling_rate_hz = float(sampling_rate_hz)

    def _read(self, csv_path):
        try:
            frame = pd.read_csv(csv_path)
        except pd.errors.ParserError as e:
            raise ParseError(csv_path, 0, str(e).strip())
        missing = [c for c in self.COLUMNS if c not in frame.columns]
        if missing:
            raise SchemaError("%s lacks columns %s." % (csv_path, missing))
        for column in self.COLUMNS:
            parsed = pd.to_numeric(frame[column], errors='coerce')
            bad = parsed.isna().to_numpy()
            if bad.any():
                row = int(np.flatnonzero(bad)[0])
                raise ParseError(csv_path, row + 2, "non-numeric %s value %r" % (
                    column, frame[column].iloc[row]))
            frame[column] = parsed
        return frame

    @abc.abstractmethod
    def _labels(self, frame):
        """Returns (labels, keep_mask) for the rows of `frame`."""
        raise NotImplementedError('Override me')

    def convert(self, csv_path):
        frame = self._read(csv_path)
        labels, keep = self._labels(frame)
        dropped = int(len(frame) - np.count_nonzero(keep))
        if dropped:
            logger.info("%s: dropped %d samples without a stress/non-stress label",
                        csv_path, dropped)
        return SignalRecord(
            subject_id=self.subject_id,
            device=self.device,
            sampling_rate_hz=self.sampling_rate_hz,
            samples=frame['eda'].to_numpy(dtype=float)[keep],
            labels=labels[keep],
        )


class WesadExportConverter(DatasetExportConverter):
    """WESAD export: protocol code 2 is stress; 1, 3 and 4 are non-stress.

    Transient (0) and ignored (5-7) codes are discarded.
    """

    SAMPLING_RATES = {Device.CHEST: 700.0, Device.WRIST: 4.0}
    STRESS_CODES = (2,)
    NON_STRESS_CODES = (1, 3, 4)

    def __init__(self, subject_id, device=Device.WRIST, sampling_rate_hz=None):
        device = Device(device)
        if sampling_rate_hz is None:
            if device not in self.SAMPLING_RATES:
                raise SchemaError("WESAD has no %s stream." % device.value)
            sampling_rate_hz = self.SAMPLING_RATES[device]
        super(WesadExportConverter, self).__init__(subject_id, device, sampling_rate_hz)

    def _labels(self, frame):
        codes = frame['label'].to_numpy()
        stress = np.isin(codes, self.STRESS_CODES)
        keep = stress | np.isin(codes, self.NON_STRESS_CODES)
        return np.where(stress, STRESS, NON_STRESS).astype(np.int8), keep


class AffectiveRoadExportConverter(DatasetExportConverter):
    """AffectiveROAD export: the continuous stress metric cut at `threshold`."""

    COLUMNS = ('eda', 'stress_metric')

    def __init__(self, subject_id, threshold=STRESS_THRESHOLD,
                 device=Device.WRIST, sampling_rate_hz=4.0):
        super(AffectiveRoadExportConverter, self).__init__(
            subject_id, device, sampling_rate_hz)
        self.threshold = threshold

    def _labels(self, frame):
        labels = threshold_labels(ContinuousStressLabel(
            frame['stress_metric'].to_numpy(dtype=float), self.threshold))
        return labels, np.ones(len(labels), dtype=bool)


class LabeledExportConverter(DatasetExportConverter):
    """Generic export whose label column already holds 0/1."""

    def _labels(self, frame):
        labels = frame['label'].to_numpy()
        if not np.all(np.isin(labels, (NON_STRESS, STRESS))):
            raise SchemaError("label column must hold only 0 and 1.")
        return labels.astype(np.int8), np.ones(len(labels), dtype=bool)


CONVERTERS = {
    'wesad': WesadExportConverter,
    'affectiveroad': AffectiveRoadExportConverter,
    'labeled': LabeledExportConverter,
}


def get_converter(kind, subject_id, device=None, sampling_rate_hz=None, threshold=None):
    kind = kind.lower()
    if kind == 'wesad':
        return WesadExportConverter(subject_id, device or Device.WRIST, sampling_rate_hz)
    elif kind == 'affectiveroad':
        return AffectiveRoadExportConverter(
            subject_id,
            threshold=STRESS_THRESHOLD if threshold is None else threshold,
            device=device or Device.WRIST,
            sampling_rate_hz=sampling_rate_hz or 4.0,
        )
    elif kind == 'labeled':
        if sampling_rate_hz is None or device is None:
            raise SchemaError("Generic exports need an explicit device and sampling rate.")
        return LabeledExportConverter(subject_id, device, sampling_rate_hz)
    else:
        raise SchemaError("Unknown export kind %s" % kind)
