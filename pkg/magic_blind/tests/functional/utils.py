# coding=utf-8
"""Utilities for the functional tests."""
import copy
import csv
import json
import os

from magic_blind.app import cli
from magic_blind.app.clifford import CliffordStructure
from magic_blind.app.tasks.bundle import SUMMARY, TIMESTAMPS
from magic_blind.app.traps import singleton_family
from magic_blind.app.verifier import ROUND_MODEL, SyntheticComputation, VerificationConfig, \
    VerificationParams
from magic_blind.tests.functional.constants import EXPERIMENT, FULL_ACCEPTANCE


def sized(sizes):
    """The full or the reduced entry of a ``(full, reduced)`` pair."""
    full, reduced = sizes
    return full if FULL_ACCEPTANCE else reduced


def gen_experiment(**sections):
    """An experiment document with some sections replaced."""
    document = copy.deepcopy(EXPERIMENT)
    document.update(sections)
    return document


def run_cli(scratch, subcommand, document, *extra):
    """
    Write ``document`` into ``scratch`` and run one subcommand through :func:`cli.main`.

    Returns:
        tuple: ``(exit code, output directory)``.

    """
    path = os.path.join(scratch, 'experiment.json')
    with open(path, 'w') as handle:
        json.dump(document, handle)
    out_dir = os.path.join(scratch, subcommand)
    return cli.main([subcommand, '--config', path, '--out', out_dir] + list(extra)), out_dir


def read_summary(out_dir):
    """The parsed ``summary.json``."""
    with open(os.path.join(out_dir, SUMMARY)) as handle:
        return json.load(handle)


def read_csv(out_dir, name):
    """Rows of a CSV file as dicts."""
    with open(os.path.join(out_dir, name), newline='') as handle:
        return list(csv.DictReader(handle))


def output_bytes(out_dir):
    """Every deterministic output file, by name."""
    files = {}
    for name in sorted(os.listdir(out_dir)):
        if name == TIMESTAMPS:
            continue
        with open(os.path.join(out_dir, name), 'rb') as handle:
            files[name] = handle.read()
    return files


def gen_verification_config(d, s, w, n=1, t=0, c=0.0, z_star=0, seed=0, **kwargs):
    """A reduced-model verification of a synthetic computation on the identity structure."""
    structure = CliffordStructure.identity(n, t)
    return VerificationConfig(
        structure, ['+Z'] * n, VerificationParams(d, s, w, seed), singleton_family(structure),
        computation=SyntheticComputation(c, z_star), round_model=ROUND_MODEL.REDUCED, **kwargs)
