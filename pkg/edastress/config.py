"""Run configuration shared by every command.

Precedence: built-in defaults < JSON config file (``--config``) <
flags given on the command line.  The config file uses the flag names with
underscores, plus an optional ``"synthetic"`` section of SyntheticConfig
fields.
"""

import dataclasses
import json

from edastress import constants
from edastress.errors import ConfigError

# Fields that change where or how loudly a command runs, never its results.
_RUNTIME_ONLY = ('out', 'force', 'threads', 'log_level', 'config')

_CHOICES = (
    ('protocol', ('ud', 'ui', 'both')),
    ('svm_kernel', ('linear', 'rbf')),
    ('ad_table', ('size_adjusted', 'stephens')),
    ('log_level', ('DEBUG', 'INFO', 'WARNING', 'ERROR')),
)


@dataclasses.dataclass(frozen=True)
class RunConfig(object):
    seed: int = constants.DEFAULT_SEED
    threads: int = 1
    out: str = None
    force: bool = False
    log_level: str = 'INFO'
    config: str = None

    window_s: float = constants.WINDOW_S
    shift_s: float = constants.SHIFT_S
    cutoff_hz: float = constants.FILTER_CUTOFF_HZ
    filter_order: int = constants.FILTER_ORDER

    families: str = 'all'
    protocol: str = 'both'
    test_frac: float = constants.TEST_FRACTION
    svm_kernel: str = 'linear'
    mlp_class_weight: bool = False

    alpha1: float = constants.ALPHA_HYPOTHESIS1
    alpha2: float = constants.ALPHA_HYPOTHESIS2
    ci_level1: float = constants.CI_LEVEL_HYPOTHESIS1
    ci_level2: float = constants.CI_LEVEL_HYPOTHESIS2
    ad_table: str = 'size_adjusted'

    synthetic: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if not self.window_s > 0 or not self.shift_s > 0:
            raise ConfigError("Window and shift must be positive.")
        if not 0.0 < self.test_frac < 1.0:
            raise ConfigError("test_frac must lie in (0, 1).")
        for name in ('alpha1', 'alpha2', 'ci_level1', 'ci_level2'):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ConfigError("%s must lie in (0, 1)." % name)
        if self.threads < 1 and self.threads != -1:
            raise ConfigError("threads must be a positive count or -1 for all cores.")
        for name, allowed in _CHOICES:
            if getattr(self, name) not in allowed:
                raise ConfigError("%s must be one of %s, got %r." % (
                    name, ', '.join(allowed), getattr(self, name)))

    @classmethod
    def field_names(cls):
        return [f.name for f in dataclasses.fields(cls)]

    def updated(self, values, source='overrides'):
        """Copy with `values` applied; unknown keys are a ConfigError."""
        unknown = sorted(set(values) - set(self.field_names()))
        if unknown:
            raise ConfigError("Unknown settings in %s: %s" % (source, ', '.join(unknown)))
        values = dict(values)
        if 'synthetic' in values:
            merged = dict(self.synthetic)
            merged.update(values['synthetic'] or {})
            values['synthetic'] = merged
        return dataclasses.replace(self, **values)

    @staticmethod
    def from_file(path, base=None):
        base = base or RunConfig()
        try:
            with open(path) as fin:
                values = json.load(fin)
        except (IOError, OSError, ValueError) as e:
            raise ConfigError("Cannot read config %s: %s" % (path, e))
        if not isinstance(values, dict):
            raise ConfigError("Config %s must hold a JSON object." % path)
        return base.updated(values, source=path)

    def snapshot(self):
        """JSON-safe settings that can change results (for run manifests)."""
        return dict((k, v) for k, v in dataclasses.asdict(self).items()
                    if k not in _RUNTIME_ONLY)
