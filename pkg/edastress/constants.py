"""Experiment-wide constants.

Defaults reproduce the configuration of the original stress-detection study:
running every command with no flags uses these values.
"""

DEFAULT_SEED = 1337

# Labels
NON_STRESS = 0
STRESS = 1
STRESS_THRESHOLD = 0.4

# Pre-processing
FILTER_ORDER = 4
FILTER_CUTOFF_HZ = 5.0

# Windowing, in seconds.
WINDOW_S = 60.0
SHIFT_S = 30.0

# Tonic/phasic decomposition and SCR detection.
TONIC_MEDIAN_WINDOW_S = 8.0
SCR_MIN_AMPLITUDE_US = 0.01

# Model training.
TEST_FRACTION = 0.286
INNER_CV_FOLDS = 5
FALLBACK_CV_FOLDS = 3

# Statistics.
ALPHA_HYPOTHESIS1 = 0.001
CI_LEVEL_HYPOTHESIS1 = 0.99
ALPHA_HYPOTHESIS2 = 0.05
CI_LEVEL_HYPOTHESIS2 = 0.95
NORMALITY_ALPHA = 0.05
EXACT_RANK_SUM_MAX_N = 20

# Versions written into every output so results stay traceable.
CANONICAL_FORMAT_VERSION = 1
MODEL_FORMAT_VERSION = 1
FEATURE_SET_VERSION = 'eda25-v1'
GRID_VERSION = 'table1-v1'
