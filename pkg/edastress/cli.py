"""
Command-line pipeline:

    synth      -> canonical synthetic corpus
    convert    -> canonical record from a dataset CSV export
    extract    -> feature file from a corpus directory
    evaluate   -> score table from feature files
    compare    -> hypothesis report + plot-ready CSVs from score tables
    summarize  -> per-dataset BA summary of one family/protocol

Every command writes a run manifest (manifest.json) next to its outputs.
Exit codes: 0 success, 2 usage error, 3 data error, 4 protocol/statistics
error.
"""

import argparse
import logging
import os
import sys

from edastress import __version__
from edastress.config import RunConfig
from edastress.data.converters import CONVERTERS, get_converter
from edastress.data.signal_loader import (
    CanonicalDirLoader, SyntheticConfig, decimate_record, generate_synthetic,
    heterogeneous_config,
)
from edastress.errors import EdaStressError, SchemaError, UsageError
from edastress.feature_extraction.eda_features import extract_record_features
from edastress.feature_extraction.feature_table import FeatureTable
from edastress.learners.grids import grid_snapshot, parse_families
from edastress.learners.models import LearnerOptions
from edastress.protocol.evaluator import (
    Protocol, ScoreTable, run_user_dependent, run_user_independent, summarize_per_subject,
)
from edastress.stats.hypotheses import run_hypothesis1, run_hypothesis2
from edastress.util.manifest import RunManifest
from edastress.util.print_utils import print_green, print_red, setup_logging
from edastress.util.signal_record import Device, write_canonical

logger = logging.getLogger('edastress.cli')

FEATURES_FILENAME = 'features.csv'
SCORES_FILENAME = 'scores.csv'
SUMMARY_FILENAME = 'summary.csv'


def _add_global_flags(parser):
    # SUPPRESS keeps unset flags out of the namespace, so only explicit
    # flags override the config file.
    s = argparse.SUPPRESS
    parser.add_argument('--seed', type=int, default=s, help='master seed (default 1337)')
    parser.add_argument('--threads', type=int, default=s, help='parallel jobs for grid search')
    parser.add_argument('--out', default=s, help='output directory')
    parser.add_argument('--force', action='store_true', default=s,
                        help='write into a non-empty output directory')
    parser.add_argument('--config', default=s, help='JSON config file mirroring the flags')
    parser.add_argument('--log-level', dest='log_level', default=s,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])


def build_parser():
    parser = argparse.ArgumentParser(
        prog='edastress', description='EDA stress-detection laboratory.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest='command')
    s = argparse.SUPPRESS

    p = sub.add_parser('synth', help='generate a synthetic corpus')
    _add_global_flags(p)
    p.add_argument('--subjects', type=int, default=s)
    p.add_argument('--fs', type=float, default=s, help='sampling rate in Hz')
    p.add_argument('--device', default=s, choices=[d.value for d in Device])
    p.add_argument('--heterogeneous', action='store_true', default=False,
                   help='strongly differing subjects')
    p.add_argument('--lowres-fs', dest='lowres_fs', type=float, default=None,
                   help='also write a decimated twin corpus at this rate')
    p.add_argument('--lowres-out', dest='lowres_out', default=None)

    p = sub.add_parser('convert', help='convert a dataset CSV export')
    _add_global_flags(p)
    p.add_argument('input')
    p.add_argument('--kind', required=True, choices=sorted(CONVERTERS))
    p.add_argument('--subject', required=True)
    p.add_argument('--device', default=None, choices=[d.value for d in Device])
    p.add_argument('--fs', type=float, default=None)
    p.add_argument('--threshold', type=float, default=None)

    p = sub.add_parser('extract', help='extract window features from a corpus')
    _add_global_flags(p)
    p.add_argument('--in', dest='in_dir', required=True)
    p.add_argument('--dataset', default=None, help='dataset name (default: input dir name)')
    p.add_argument('--window-s', dest='window_s', type=float, default=s)
    p.add_argument('--shift-s', dest='shift_s', type=float, default=s)
    p.add_argument('--cutoff-hz', dest='cutoff_hz', type=float, default=s)
    p.add_argument('--filter-order', dest='filter_order', type=int, default=s)

    p = sub.add_parser('evaluate', help='train and score models')
    _add_global_flags(p)
    p.add_argument('--features', nargs='+', required=True)
    p.add_argument('--protocol', default=s, choices=['ud', 'ui', 'both'])
    p.add_argument('--families', default=s, help="'all' or e.g. 'svm,rf'")
    p.add_argument('--test-frac', dest='test_frac', type=float, default=s)
    p.add_argument('--svm-kernel', dest='svm_kernel', default=s, choices=['linear', 'rbf'])
    p.add_argument('--mlp-class-weight', dest='mlp_class_weight', action='store_true',
                   default=s)

    p = sub.add_parser('compare', help='test hypothesis 1 or 2 on score tables')
    _add_global_flags(p)
    p.add_argument('--hypothesis', type=int, required=True, choices=[1, 2])
    p.add_argument('--scores', nargs='+', required=True,
                   help='hypothesis 1: score tables; hypothesis 2: chest table, wrist table')
    p.add_argument('--alpha1', type=float, default=s)
    p.add_argument('--alpha2', type=float, default=s)
    p.add_argument('--ci-level1', dest='ci_level1', type=float, default=s)
    p.add_argument('--ci-level2', dest='ci_level2', type=float, default=s)
    p.add_argument('--ad-table', dest='ad_table', default=s,
                   choices=['size_adjusted', 'stephens'])
    p.add_argument('--expected-n', dest='expected_n', type=int, default=None)

    p = sub.add_parser('summarize', help='per-dataset BA summary')
    _add_global_flags(p)
    p.add_argument('--scores', nargs='+', required=True)
    p.add_argument('--family', default='SVM')
    p.add_argument('--summary-protocol', dest='summary_protocol', default='ud')
    return parser


def resolve_config(args):
    """Defaults < config file < explicit flags."""
    explicit = vars(args)
    config = RunConfig()
    if 'config' in explicit:
        config = RunConfig.from_file(explicit['config'])
    overrides = dict((k, v) for k, v in explicit.items() if k in RunConfig.field_names())
    return config.updated(overrides, source='command line')


def _require_out(config):
    if not config.out:
        raise UsageError("--out is required.")
    return config.out


def _prepare_out_dir(path, force):
    if os.path.isdir(path) and os.listdir(path) and not force:
        raise UsageError("%s exists and is not empty; pass --force to overwrite." % path)
    os.makedirs(path, exist_ok=True)


def cmd_synth(args, config):
    out = _require_out(config)
    values = dict(config.synthetic)
    explicit = vars(args)
    if 'subjects' in explicit:
        values['n_subjects'] = explicit['subjects']
    if 'fs' in explicit:
        values['sampling_rate_hz'] = explicit['fs']
    if 'device' in explicit:
        values['device'] = explicit['device']
    values['rng_seed'] = config.seed
    if args.heterogeneous:
        synth = heterogeneous_config(**values)
    else:
        synth = SyntheticConfig.from_dict(values)

    _prepare_out_dir(out, config.force)
    records = generate_synthetic(synth)
    manifest = RunManifest('synth', _snapshot(config, synthetic=synth.to_dict()),
                           seeds={'seed': config.seed})
    paths = [write_canonical(r, out, manifest.digest()) for r in records]

    if args.lowres_fs:
        lowres_out = args.lowres_out or out.rstrip(os.sep) + '_lowres'
        _prepare_out_dir(lowres_out, config.force)
        lowres_manifest = RunManifest(
            'synth', _snapshot(config, synthetic=synth.to_dict(), lowres_fs=args.lowres_fs),
            seeds={'seed': config.seed})
        for record in records:
            paths.append(write_canonical(
                decimate_record(record, args.lowres_fs, device=Device.WRIST), lowres_out,
                lowres_manifest.digest()))
        lowres_manifest.save(lowres_out)

    manifest.save(out)
    logger.info("wrote %d records to %s", len(records), out)
    return paths


def cmd_convert(args, config):
    out = _require_out(config)
    converter = get_converter(args.kind, args.subject, device=args.device,
                              sampling_rate_hz=args.fs, threshold=args.threshold)
    record = converter.convert(args.input)
    os.makedirs(out, exist_ok=True)
    path = write_canonical(record, out)
    RunManifest('convert', _snapshot(config, kind=args.kind, subject=args.subject),
                input_files=[args.input]).save(out)
    logger.info("converted %s -> %s (%d samples)", args.input, path, len(record))
    return path


def cmd_extract(args, config):
    out = _require_out(config)
    records = CanonicalDirLoader(args.in_dir).load()
    subjects = [r.subject_id for r in records]
    if len(set(subjects)) != len(subjects):
        raise SchemaError("%s holds several records of one subject; keep one device "
                          "per dataset directory." % args.in_dir)

    rows = []
    for record in records:
        rows.extend(extract_record_features(
            record, config.window_s, config.shift_s, config.cutoff_hz, config.filter_order))
    dataset = args.dataset or os.path.basename(os.path.normpath(args.in_dir))
    table = FeatureTable.from_windows(rows, dataset=dataset, window_s=config.window_s,
                                      shift_s=config.shift_s)

    inputs = sorted(os.path.join(args.in_dir, fn) for fn in os.listdir(args.in_dir)
                    if fn.endswith('.csv') or (fn.endswith('.json') and fn != 'manifest.json'))
    manifest = RunManifest('extract', _snapshot(config, dataset=dataset), input_files=inputs)
    os.makedirs(out, exist_ok=True)
    path = table.save(os.path.join(out, FEATURES_FILENAME), manifest_hash=manifest.digest())
    manifest.save(out)
    logger.info("%s: %d windows from %d records", dataset, len(table), len(records))
    return path


def _learner_options(config):
    return LearnerOptions(svm_kernel=config.svm_kernel,
                          mlp_class_weight=config.mlp_class_weight,
                          n_jobs=config.threads)


def cmd_evaluate(args, config):
    out = _require_out(config)
    families = parse_families(config.families)
    protocols = {'ud': [Protocol.USER_DEPENDENT], 'ui': [Protocol.USER_INDEPENDENT],
                 'both': [Protocol.USER_DEPENDENT, Protocol.USER_INDEPENDENT]}[config.protocol]
    options = _learner_options(config)

    tables = []
    for path in args.features:
        features = FeatureTable.load(path)
        if Protocol.USER_DEPENDENT in protocols:
            tables.append(run_user_dependent(features, families, config.seed,
                                             config.test_frac, options=options))
        if Protocol.USER_INDEPENDENT in protocols:
            tables.append(run_user_independent(features, families, config.seed,
                                               options=options))
    scores = ScoreTable.concat(tables)
    scores.meta.update({
        'inner_cv': 'stratified 5-fold balanced accuracy (3-fold fallback)',
        'user_independent_grid_search': 'nested per fold',
        'families': [f.value for f in families],
    })

    sidecars = [os.path.splitext(p)[0] + '.json' for p in args.features]
    inputs = list(args.features) + [p for p in sidecars if os.path.exists(p)]
    manifest = RunManifest('evaluate', _snapshot(config, grids=grid_snapshot()),
                           seeds={'seed': config.seed}, input_files=inputs)
    os.makedirs(out, exist_ok=True)
    path = scores.save(os.path.join(out, SCORES_FILENAME), manifest_hash=manifest.digest())
    manifest.save(out)
    logger.info("%d scores, %d skipped", len(scores), len(scores.skips))
    return path


def cmd_compare(args, config):
    out = _require_out(config)
    tables = [ScoreTable.load(p) for p in args.scores]
    if args.hypothesis == 1:
        scores = ScoreTable.concat(tables)
        report = run_hypothesis1(
            scores.select(protocol=Protocol.USER_DEPENDENT),
            scores.select(protocol=Protocol.USER_INDEPENDENT),
            alpha=config.alpha1, ci_level=config.ci_level1, ad_table=config.ad_table,
            expected_n=args.expected_n)
    else:
        if len(tables) != 2:
            raise UsageError("Hypothesis 2 takes exactly two score tables: chest, wrist.")
        report = run_hypothesis2(
            tables[0].select(protocol=Protocol.USER_DEPENDENT),
            tables[1].select(protocol=Protocol.USER_DEPENDENT),
            alpha=config.alpha2, ci_level=config.ci_level2, ad_table=config.ad_table,
            expected_n=args.expected_n)

    manifest = RunManifest('compare', _snapshot(config, hypothesis=args.hypothesis),
                           input_files=args.scores)
    paths = report.save(out, manifest_hash=manifest.digest())
    manifest.save(out)
    (print_green if report.test.reject_null else print_red)(report.decision)
    return paths


def cmd_summarize(args, config):
    out = _require_out(config)
    scores = ScoreTable.concat([ScoreTable.load(p) for p in args.scores])
    summary = summarize_per_subject(scores, args.family, args.summary_protocol)
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, SUMMARY_FILENAME)
    summary.to_csv(path, float_format='%.12g', index_label='dataset')
    RunManifest('summarize', _snapshot(config, family=args.family,
                                       protocol=args.summary_protocol),
                input_files=args.scores).save(out)
    print(summary.to_string())
    return path


COMMANDS = {
    'synth': cmd_synth,
    'convert': cmd_convert,
    'extract': cmd_extract,
    'evaluate': cmd_evaluate,
    'compare': cmd_compare,
    'summarize': cmd_summarize,
}


def _snapshot(config, **extra):
    values = config.snapshot()
    values.update(extra)
    return values


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return UsageError.exit_code
    setup_logging(getattr(args, 'log_level', 'INFO'))
    try:
        config = resolve_config(args)
        setup_logging(config.log_level)
        COMMANDS[args.command](args, config)
    except EdaStressError as e:
        logger.error("%s", e)
        return e.exit_code
    return 0


if __name__ == '__main__':
    sys.exit(main())
