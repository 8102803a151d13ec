"""
Result bundles: every file a subcommand emits, written once at the end of the run.
"""
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from gettext import gettext as _
import csv
import io
import json
import logging
import os

import numpy as np

from magic_blind import __version__
from magic_blind.app.settings import configure


log = logging.getLogger(__name__)

SUMMARY = 'summary.json'
TIMESTAMPS = 'timestamps.json'


def _plain(value):
    """JSON fallback for numpy scalars, arrays and Fractions."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, (set, frozenset, tuple)):
        return list(value)
    raise TypeError(_('{t} is not JSON serializable').format(t=type(value).__name__))


def dumps(payload):
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2, default=_plain) + '\n'


def _now():
    return datetime.now(timezone.utc).isoformat()


@dataclass
class ResultBundle:
    """
    The output of one subcommand.

    Everything except ``timestamps.json`` depends only on the configuration and the seed,
    so two runs with the same inputs write byte-identical files.

    Fields:
        subcommand (str): Which subcommand produced it.
        echo (dict): The experiment document as read.
        seed (int): Master seed actually used.
        files (dict): File name to text.
        results (dict): Goes to ``summary.json`` under ``results``.
        passed (bool): False when a check ran and its property did not hold.
        started (str): UTC start time.
    """

    subcommand: str
    echo: dict = field(default_factory=dict)
    seed: int = 0
    files: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    passed: bool = True
    started: str = field(default_factory=_now)

    def add_json(self, name, payload):
        """Add a JSON file."""
        self.files[name] = dumps(payload)

    def add_csv(self, name, header, rows):
        """Add a CSV file with a header row."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)
        self.files[name] = buffer.getvalue()

    def add_text(self, name, text):
        """Add a text file."""
        self.files[name] = text if text.endswith('\n') else text + '\n'

    def summary(self):
        """The self-describing ``summary.json`` payload."""
        return {
            'schema': configure()['RESULT_SCHEMA'],
            'version': __version__,
            'subcommand': self.subcommand,
            'seed': self.seed,
            'passed': self.passed,
            'config': self.echo,
            'files': sorted(self.files),
            'results': self.results,
        }

    def write(self, out_dir):
        """
        Write every file, the summary and the timestamp sidecar.

        Args:
            out_dir (str): Target directory, created when missing.

        Returns:
            list: Paths written, summary first.

        """
        os.makedirs(out_dir, exist_ok=True)
        payloads = {SUMMARY: dumps(self.summary())}
        payloads.update(self.files)
        payloads[TIMESTAMPS] = dumps({'started': self.started, 'finished': _now()})
        paths = []
        for name, text in payloads.items():
            path = os.path.join(out_dir, name)
            with open(path, 'w', encoding='utf-8', newline='') as handle:
                handle.write(text)
            paths.append(path)
        log.info(_('Wrote {c} files to {d}').format(c=len(paths), d=out_dir))
        return paths
