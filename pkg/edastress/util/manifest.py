"""Run manifests: what produced an output file, and with which inputs."""

import datetime
import hashlib
import json
import os

from edastress import __version__
from edastress.constants import FEATURE_SET_VERSION, GRID_VERSION

MANIFEST_FILENAME = 'manifest.json'

# Fields excluded from the manifest hash; everything else is deterministic.
_VOLATILE_FIELDS = ('started_at', 'finished_at')


def file_sha256(path, chunk_size=1 << 20):
    digest = hashlib.sha256()
    with open(path, 'rb') as fin:
        for chunk in iter(lambda: fin.read(chunk_size), b''):
            digest.update(chunk)
    return digest.hexdigest()


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(',', ':'), allow_nan=True)


class RunManifest(object):
    """Describes one CLI command invocation.

    The hash covers command, config, seeds, input hashes and versions but
    not the timestamps, so identical reruns share a hash and every output
    that embeds it stays byte-identical.
    """

    def __init__(self, command, config, seeds=None, input_files=(),
                 feature_set_version=FEATURE_SET_VERSION, grid_version=GRID_VERSION):
        self.command = command
        self.config = dict(config)
        self.seeds = dict(seeds or {})
        self.input_hashes = dict(
            (os.path.basename(p), file_sha256(p)) for p in sorted(input_files)
        )
        self.feature_set_version = feature_set_version
        self.grid_version = grid_version
        self.package_version = __version__
        self.started_at = _now()
        self.finished_at = None

    def add_input(self, path):
        self.input_hashes[os.path.basename(path)] = file_sha256(path)

    def to_dict(self):
        return {
            'command': self.command,
            'config': self.config,
            'seeds': self.seeds,
            'input_hashes': dict(sorted(self.input_hashes.items())),
            'feature_set_version': self.feature_set_version,
            'grid_version': self.grid_version,
            'package_version': self.package_version,
            'started_at': self.started_at,
            'finished_at': self.finished_at,
        }

    def digest(self):
        stable = dict(
            (k, v) for k, v in self.to_dict().items() if k not in _VOLATILE_FIELDS
        )
        return hashlib.sha256(canonical_json(stable).encode('utf-8')).hexdigest()

    def save(self, out_dir):
        """Stamps the finish time and writes `manifest.json` into `out_dir`."""
        self.finished_at = _now()
        os.makedirs(out_dir, exist_ok=True)
        payload = self.to_dict()
        payload['manifest_hash'] = self.digest()
        path = os.path.join(out_dir, MANIFEST_FILENAME)
        with open(path, 'w') as fout:
            json.dump(payload, fout, indent=2, sort_keys=True)
            fout.write('\n')
        return path


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec='seconds')
