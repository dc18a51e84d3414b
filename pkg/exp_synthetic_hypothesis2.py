"""
Hypothesis 2 on synthetic data: does a 700 Hz chest-like signal give
better user-dependent models than the same signal decimated to 4 Hz?

Both resolutions carry the same information, so the two-sided test should
fail to reject in at least 8 of 10 seeded runs.

Usage: python exp_synthetic_hypothesis2.py [families] [out_dir] [n_seeds]
"""

import os
import sys

from edastress.constants import DEFAULT_SEED
from edastress.data.signal_loader import SyntheticLoader, decimate_record
from edastress.feature_extraction.eda_features import extract_record_features
from edastress.feature_extraction.feature_table import FeatureTable
from edastress.learners.grids import parse_families
from edastress.protocol.evaluator import run_user_dependent
from edastress.stats.hypotheses import run_hypothesis2
from edastress.util.print_utils import print_blue, print_green, print_red, setup_logging
from edastress.util.signal_record import Device

CHEST_FS = 700.0
WRIST_FS = 4.0
N_SUBJECTS = 8
MIN_KEEPS = 8

families = parse_families(sys.argv[1] if len(sys.argv) > 1 else 'all')
out_dir = sys.argv[2] if len(sys.argv) > 2 else 'results_hypothesis2'
n_seeds = int(sys.argv[3]) if len(sys.argv) > 3 else 10
setup_logging('INFO')

keeps = 0
for run in range(n_seeds):
    seed = DEFAULT_SEED + run
    chest = SyntheticLoader(n_subjects=N_SUBJECTS, sampling_rate_hz=CHEST_FS,
                            device=Device.CHEST.value, rng_seed=seed).load()
    wrist = [decimate_record(r, WRIST_FS, device=Device.WRIST) for r in chest]

    run_dir = os.path.join(out_dir, 'seed%d' % seed)
    scores = {}
    for name, records in (('chest', chest), ('wrist', wrist)):
        rows = []
        for record in records:
            rows.extend(extract_record_features(record))
        features = FeatureTable.from_windows(rows, dataset='synthetic_%s' % name)
        print_blue("seed %d, %s: %d windows at %g Hz" % (
            seed, name, len(features), records[0].sampling_rate_hz))
        scores[name] = run_user_dependent(features, families, seed=seed,
                                          dataset='synthetic')
        scores[name].save(os.path.join(run_dir, 'scores_%s.csv' % name))

    report = run_hypothesis2(scores['chest'], scores['wrist'])
    report.save(run_dir)
    keeps += int(not report.test.reject_null)
    print("seed %d: median chest = %.3f, median wrist = %.3f, p = %.3g" % (
        seed, report.medians['chest'], report.medians['wrist'], report.test.p_value))
    (print_red if report.test.reject_null else print_green)(report.decision)

print("H0 kept in %d of %d runs" % (keeps, n_seeds))
ok = keeps >= MIN_KEEPS * n_seeds / 10.0
(print_green if ok else print_red)("PASS" if ok else "FAIL")
sys.exit(0 if ok else 1)
