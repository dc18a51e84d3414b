"""Hyperparameter grids of the five classifier families.

Rows are declared in table order; candidate points expand the rows with
the first row outermost, which is also the tie-break order of grid search.
"""

import enum
import itertools

from edastress.constants import GRID_VERSION
from edastress.errors import ConfigError

C_VALUES = (0.001, 0.01, 0.1, 0.25, 0.5, 0.75, 1.0, 10.0)
CLASS_WEIGHT_MODES = (None, 'balance')


class Family(str, enum.Enum):
    LR = 'LR'
    RF = 'RF'
    SVM = 'SVM'
    MLP = 'MLP'
    KNN = 'KNN'

    @property
    def standardize(self):
        return self in (Family.SVM, Family.MLP, Family.KNN)

    @staticmethod
    def parse(name):
        if isinstance(name, Family):
            return name
        try:
            return Family(str(name).upper())
        except ValueError:
            raise ConfigError("Unknown model family %r; expected one of %s." % (
                name, ', '.join(f.value for f in Family)))


ALL_FAMILIES = tuple(Family)

GRIDS = {
    Family.LR: (
        ('C', C_VALUES),
        ('class_weight', CLASS_WEIGHT_MODES),
    ),
    Family.RF: (
        ('n_estimators', (500, 1000)),
        ('min_samples_split', (2, 4)),
        ('min_samples_leaf', (1, 4)),
        ('class_weight', CLASS_WEIGHT_MODES),
    ),
    Family.SVM: (
        ('C', C_VALUES),
        ('class_weight', CLASS_WEIGHT_MODES),
    ),
    Family.MLP: (
        ('hidden_layer_sizes', (64, 128, 256, 512)),
    ),
    Family.KNN: (
        ('n_neighbors', (3, 5, 7)),
        ('weights', ('uniform', 'distance')),
    ),
}


def parse_families(names):
    """'all' or a comma-separated list (or an iterable) of family names."""
    if isinstance(names, str):
        names = [n.strip() for n in names.split(',') if n.strip()]
    names = list(names)
    if not names or [n.lower() for n in names] == ['all']:
        return list(ALL_FAMILIES)
    families = []
    for name in names:
        family = Family.parse(name)
        if family not in families:
            families.append(family)
    return sorted(families, key=ALL_FAMILIES.index)


def candidate_points(family, grid=None):
    """Expands a grid (default: the family's table grid) into ordered dicts.

    `grid` may be given as rows ``((name, values), ...)`` or as a dict
    mapping names to value lists; an empty grid is an error.
    """
    family = Family.parse(family)
    rows = GRIDS[family] if grid is None else grid
    if isinstance(rows, dict):
        rows = tuple(rows.items())
    if not rows or any(len(values) == 0 for _, values in rows):
        raise ConfigError("Empty hyperparameter grid for %s." % family.value)
    names = [name for name, _ in rows]
    return [dict(zip(names, combo)) for combo in itertools.product(*[v for _, v in rows])]


def grid_snapshot():
    """JSON-safe description of every grid, for run manifests."""
    return {
        'grid_version': GRID_VERSION,
        'grids': dict(
            (family.value, [[name, list(values)] for name, values in rows])
            for family, rows in GRIDS.items()
        ),
    }
