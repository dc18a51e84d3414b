"""
Hypothesis 1 on synthetic data: are per-subject (user-dependent) models
better than models trained on the other subjects (user-independent)?

Runs the full pipeline on ten heterogeneous corpora of ten subjects each,
one per seed, and checks that H0 is rejected in at least 8 of 10 runs with
the median user-dependent score at least 0.05 above the user-independent one.

Usage: python exp_synthetic_hypothesis1.py [families] [out_dir] [n_seeds]
    families   'all' (default) or e.g. 'svm,lr'
"""

import os
import sys

import numpy as np

from edastress.constants import DEFAULT_SEED
from edastress.data.signal_loader import SyntheticLoader, heterogeneous_config
from edastress.feature_extraction.eda_features import extract_record_features
from edastress.feature_extraction.feature_table import FeatureTable
from edastress.learners.grids import parse_families
from edastress.protocol.evaluator import (
    Protocol, ScoreTable, run_user_dependent, run_user_independent,
)
from edastress.stats.hypotheses import run_hypothesis1
from edastress.util.print_utils import print_blue, print_green, print_red, setup_logging

N_SUBJECTS = 10
MIN_REJECTS = 8
MIN_GAP = 0.05

families = parse_families(sys.argv[1] if len(sys.argv) > 1 else 'all')
out_dir = sys.argv[2] if len(sys.argv) > 2 else 'results_hypothesis1'
n_seeds = int(sys.argv[3]) if len(sys.argv) > 3 else 10
setup_logging('INFO')

rejects = 0
gaps = []
for run in range(n_seeds):
    seed = DEFAULT_SEED + run
    dataset = 'heterogeneous_seed%d' % seed
    loader = SyntheticLoader(heterogeneous_config(n_subjects=N_SUBJECTS, rng_seed=seed))
    rows = []
    for record in loader.load():
        rows.extend(extract_record_features(record))
    features = FeatureTable.from_windows(rows, dataset=dataset)
    print_blue("%s: %d windows, %d subjects" % (dataset, len(features), len(features.subjects())))

    scores = ScoreTable.concat([
        run_user_dependent(features, families, seed=seed),
        run_user_independent(features, families, seed=seed),
    ])
    run_dir = os.path.join(out_dir, 'seed%d' % seed)
    scores.save(os.path.join(run_dir, 'scores.csv'))
    report = run_hypothesis1(scores.select(protocol=Protocol.USER_DEPENDENT),
                             scores.select(protocol=Protocol.USER_INDEPENDENT))
    report.save(run_dir)

    gap = report.medians['user_dependent'] - report.medians['user_independent']
    gaps.append(gap)
    rejects += int(report.test.reject_null)
    print("seed %d: median UD = %.3f, median UI = %.3f, p = %.3g" % (
        seed, report.medians['user_dependent'], report.medians['user_independent'],
        report.test.p_value))
    (print_green if report.test.reject_null else print_red)(report.decision)

median_gap = float(np.median(gaps))
print("H0 rejected in %d of %d runs; median UD - UI gap = %.3f" % (rejects, n_seeds, median_gap))
ok = rejects >= MIN_REJECTS * n_seeds / 10.0 and median_gap >= MIN_GAP
(print_green if ok else print_red)("PASS" if ok else "FAIL")
sys.exit(0 if ok else 1)
