"""Stress detection from electrodermal activity.

Subpackages:
    data                -- loaders, dataset-export converters, synthetic corpora
    dsp                 -- Butterworth low-pass filtering and windowing
    feature_extraction  -- tonic/phasic decomposition, SCR events, window features
    learners            -- the five classifier families and grid search
    protocol            -- user-dependent / user-independent evaluation
    stats               -- normality tests, rank-sum tests, hypothesis pipelines
"""

import logging

__version__ = '0.3.0'

logging.getLogger(__name__).addHandler(logging.NullHandler())
