"""
Classes and routines for loading EDA corpora
"""

import abc
import dataclasses
import logging
import math
import os

import numpy as np

from edastress.constants import DEFAULT_SEED, NON_STRESS, STRESS
from edastress.errors import ConfigError
from edastress.util.math_utils import make_rng, round_half_up
from edastress.util.signal_record import Device, SignalRecord, load_canonical_dir

logger = logging.getLogger(__name__)

# SCR pulse morphology: half-Gaussian rise, exponential decay.
PULSE_RISE_SIGMA_S = 1.0
PULSE_DECAY_TAU_S = 3.0
_PULSE_RISE_SPAN = 3.0    # in rise sigmas
_PULSE_DECAY_SPAN = 10.0  # in decay time constants


class SignalLoader(object):
    """Override this base class. Implement `load()` to return SignalRecords."""

    @abc.abstractmethod
    def load(self):
        """Construct or load a corpus into memory.

        returns a list of SignalRecord sorted by (subject_id, device)
        """
        raise NotImplementedError('Override me')


class CanonicalDirLoader(SignalLoader):
    """Loads every canonical `<subject>_<device>.csv` file in a directory."""

    def __init__(self, in_dir):
        if not os.path.isdir(in_dir):
            raise ConfigError("%s is not a directory." % in_dir)
        self.in_dir = in_dir

    def load(self):
        return load_canonical_dir(self.in_dir)


@dataclasses.dataclass(frozen=True)
class SyntheticConfig(object):
    """Parameters of a synthetic labelled EDA corpus.

    `segment_plan_s` lists segment durations in seconds; segments alternate
    non-stress, stress, non-stress, ...  Ranges are (low, high) pairs drawn
    uniformly once per subject (baseline, stress shift, rate and amplitude
    scales) or once per SCR event (amplitudes).  `arousal_scale_range` is
    drawn log-uniformly per subject and multiplies both SCR rates and SCR
    amplitudes.  A range with low == high pins the value.
    """

    n_subjects: int = 7
    sampling_rate_hz: float = 5.0
    segment_plan_s: tuple = (600.0, 600.0, 600.0, 600.0)
    baseline_scl_range: tuple = (2.0, 12.0)
    stress_scl_shift_range: tuple = (0.0, 0.0)
    rate_scale_range: tuple = (0.8, 1.25)
    amplitude_scale_range: tuple = (1.0, 1.0)
    arousal_scale_range: tuple = (1.0, 1.0)
    scr_rate_stress_per_min: float = 12.0
    scr_rate_rest_per_min: float = 2.0
    scr_amplitude_stress_range: tuple = (0.2, 1.0)
    scr_amplitude_rest_range: tuple = (0.05, 0.3)
    noise_std: float = 0.001
    rng_seed: int = DEFAULT_SEED
    device: str = Device.SYNTHETIC.value
    subject_prefix: str = 'S'

    def __post_init__(self):
        for name in ('segment_plan_s', 'baseline_scl_range', 'stress_scl_shift_range',
                     'rate_scale_range', 'amplitude_scale_range', 'arousal_scale_range',
                     'scr_amplitude_stress_range', 'scr_amplitude_rest_range'):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        self.validate()

    def validate(self):
        if int(self.n_subjects) != self.n_subjects or self.n_subjects < 1:
            raise ConfigError("n_subjects must be a positive integer.")
        if not self.sampling_rate_hz > 0:
            raise ConfigError("sampling_rate_hz must be positive.")
        if not self.segment_plan_s or sum(self.segment_plan_s) <= 0:
            raise ConfigError("Segment plan has zero total duration.")
        if any(d <= 0 for d in self.segment_plan_s):
            raise ConfigError("Every segment needs a positive duration: %s" % (
                self.segment_plan_s,))
        if any(round_half_up(d * self.sampling_rate_hz) == 0 for d in self.segment_plan_s):
            raise ConfigError("A segment is shorter than one sample period.")
        for name in ('baseline_scl_range', 'stress_scl_shift_range', 'rate_scale_range',
                     'amplitude_scale_range', 'arousal_scale_range',
                     'scr_amplitude_stress_range', 'scr_amplitude_rest_range'):
            low_high = getattr(self, name)
            if len(low_high) != 2 or low_high[0] > low_high[1] or low_high[0] < 0:
                raise ConfigError("%s must be an ordered non-negative (low, high) pair." % name)
        if self.baseline_scl_range[0] <= 0:
            raise ConfigError("Baseline skin conductance must be positive.")
        if self.arousal_scale_range[0] <= 0:
            raise ConfigError("arousal_scale_range must be strictly positive.")
        if self.scr_rate_stress_per_min < 0 or self.scr_rate_rest_per_min < 0:
            raise ConfigError("SCR event rates cannot be negative.")
        both_silent = self.scr_rate_stress_per_min == self.scr_rate_rest_per_min == 0
        if not both_silent and not self.scr_rate_stress_per_min > self.scr_rate_rest_per_min:
            raise ConfigError("Stress SCR rate must exceed the non-stress rate.")
        if self.noise_std < 0:
            raise ConfigError("noise_std cannot be negative.")
        try:
            Device(self.device)
        except ValueError:
            raise ConfigError("Unknown device %r." % self.device)

    @classmethod
    def from_dict(cls, values):
        known = set(f.name for f in dataclasses.fields(cls))
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError("Unknown synthetic config keys: %s" % unknown)
        return cls(**values)

    def to_dict(self):
        return dict((k, list(v) if isinstance(v, tuple) else v)
                    for k, v in dataclasses.asdict(self).items())

    def segment_labels(self):
        """Per-segment labels, alternating from non-stress."""
        return [NON_STRESS if i % 2 == 0 else STRESS
                for i in range(len(self.segment_plan_s))]


def heterogeneous_config(**overrides):
    """A corpus whose subjects differ strongly from each other.

    Baselines spread far wider than the stress shift of the tonic level,
    and a 40-fold arousal spread lets one subject's rest carry as many
    and as large SCRs as another subject's stress.  Within a subject the
    stress blocks stay separable.
    """
    values = dict(
        baseline_scl_range=(1.0, 20.0),
        stress_scl_shift_range=(0.2, 1.0),
        rate_scale_range=(0.8, 1.25),
        amplitude_scale_range=(0.8, 1.25),
        arousal_scale_range=(0.15, 6.0),
        noise_std=0.002,
    )
    values.update(overrides)
    return SyntheticConfig.from_dict(values)


def scr_pulse(sampling_rate_hz):
    """Unit-peak SCR pulse sampled at `sampling_rate_hz`.

    Returns (kernel, peak_offset): the kernel rises as a half-Gaussian with
    a 1 s sigma and decays exponentially with a 3 s time constant.
    """
    n_rise = int(math.ceil(_PULSE_RISE_SPAN * PULSE_RISE_SIGMA_S * sampling_rate_hz))
    n_decay = int(math.ceil(_PULSE_DECAY_SPAN * PULSE_DECAY_TAU_S * sampling_rate_hz))
    t_rise = np.arange(-n_rise, 0) / sampling_rate_hz
    t_decay = np.arange(0, n_decay + 1) / sampling_rate_hz
    kernel = np.concatenate([
        np.exp(-t_rise ** 2 / (2.0 * PULSE_RISE_SIGMA_S ** 2)),
        np.exp(-t_decay / PULSE_DECAY_TAU_S),
    ])
    return kernel, n_rise


def add_pulses(signal, event_indices, amplitudes, sampling_rate_hz):
    """Adds scaled SCR pulses peaking at `event_indices` into `signal` in place."""
    kernel, peak = scr_pulse(sampling_rate_hz)
    n = len(signal)
    for idx, amp in zip(event_indices, amplitudes):
        start = idx - peak
        lo, hi = max(start, 0), min(start + len(kernel), n)
        if lo < hi:
            signal[lo:hi] += amp * kernel[lo - start:hi - start]
    return signal


def _log_uniform(rng, low_high):
    low, high = low_high
    if low == high:
        return low
    return math.exp(rng.uniform(math.log(low), math.log(high)))


def _generate_subject(config, subject_index):
    rng = make_rng(config.rng_seed, subject_index)
    fs = config.sampling_rate_hz
    baseline = rng.uniform(*config.baseline_scl_range)
    shift = rng.uniform(*config.stress_scl_shift_range)
    rate_scale = rng.uniform(*config.rate_scale_range)
    amplitude_scale = rng.uniform(*config.amplitude_scale_range)
    arousal = _log_uniform(rng, config.arousal_scale_range)

    seg_lengths = [round_half_up(d * fs) for d in config.segment_plan_s]
    seg_labels = config.segment_labels()
    labels = np.repeat(np.array(seg_labels, dtype=np.int8), seg_lengths)
    n = len(labels)

    signal = baseline + shift * labels.astype(float)
    offset = 0
    for seg_len, label in zip(seg_lengths, seg_labels):
        if label == STRESS:
            rate, amp_range = config.scr_rate_stress_per_min, config.scr_amplitude_stress_range
        else:
            rate, amp_range = config.scr_rate_rest_per_min, config.scr_amplitude_rest_range
        expected = rate * rate_scale * arousal * (seg_len / fs) / 60.0
        n_events = rng.poisson(expected) if expected > 0 else 0
        event_idx = offset + np.sort(rng.integers(0, seg_len, size=n_events))
        amps = amplitude_scale * arousal * rng.uniform(amp_range[0], amp_range[1], size=n_events)
        add_pulses(signal, event_idx, amps, fs)
        offset += seg_len

    if config.noise_std > 0:
        signal = signal + rng.normal(0.0, config.noise_std, size=n)

    subject_id = '%s%02d' % (config.subject_prefix, subject_index + 1)
    return SignalRecord(subject_id, config.device, fs, signal, labels)


def generate_synthetic(config):
    """Generates the corpus described by `config`.

    Output is a pure function of `config`: every subject draws from its own
    PCG64 stream keyed by (rng_seed, subject index).
    """
    config.validate()
    records = [_generate_subject(config, i) for i in range(config.n_subjects)]
    logger.info("Generated %d synthetic subjects at %g Hz (%g s each, seed %d)",
                len(records), config.sampling_rate_hz,
                sum(config.segment_plan_s), config.rng_seed)
    return records


class SyntheticLoader(SignalLoader):
    """Labelled synthetic corpus: tonic baseline + Poisson-timed SCR pulses + noise.

    Stands in for datasets that cannot be redistributed; see SyntheticConfig.
    """

    def __init__(self, config=None, **overrides):
        if config is None:
            config = SyntheticConfig(**overrides)
        elif overrides:
            config = dataclasses.replace(config, **overrides)
        self.config = config

    def load(self):
        return generate_synthetic(self.config)


def decimate_record(record, target_fs, device=None):
    """Keeps every k-th sample, k = fs / target_fs (must be an integer).

    Builds the low-resolution twin of a high-resolution synthetic record;
    no anti-alias filter is applied, as a low-rate sensor has none either.
    """
    factor = record.sampling_rate_hz / float(target_fs)
    k = int(round(factor))
    if k < 1 or abs(factor - k) > 1e-9:
        raise ConfigError("Cannot decimate %g Hz to %g Hz by an integer factor." % (
            record.sampling_rate_hz, target_fs))
    return record.replace(
        sampling_rate_hz=record.sampling_rate_hz / k,
        samples=record.samples[::k],
        labels=record.labels[::k],
        device=device or record.device,
    )
