# coding=utf-8
"""Sizes and documents shared by the functional tests."""
import os


FULL_ACCEPTANCE = os.environ.get('MAGIC_BLIND_FULL_ACCEPTANCE') == '1'
"""Run the acceptance criteria at their full sizes.

Without it the same assertions run at reduced sizes with the same 3σ margins.
"""

GADGET_CONFIGS = (200, 10)
"""Random structures checked against the ideal resource, full and reduced."""

TRAP_STRUCTURES = (100, 8)

MERGE_STRUCTURES = (50, 8)

CROSS_BACKEND_INSTANCES = (500, 60)

REDUCTION_UNITARIES = (20, 4)

CORRECTNESS_TRIALS = (100000, 2000)

ROBUSTNESS_TRIALS = (10000, 300)

SWEEP_TRIALS = (10000, 200)

SIGMAS = 3

TOLERANCE = 1e-9

HADAMARD_STRUCTURE = {'n': 1, 't': 1, 'layers': [[['H', 1]], [['H', 1]]]}
"""One injection between two Hadamard layers."""

EXPERIMENT = {
    'structure': HADAMARD_STRUCTURE,
    'input': ['+Z'],
    'seed': 2019,
    'trials': 20,
    'verification': {'d': 5, 's': 5, 'w': 1, 'z_star': 0},
    'blindness': {'cases': [
        {'input': ['+Z']},
        {'input': ['-Y']},
        {'input': ['+X'], 'injections': ['+Z']},
    ]},
    'reduction': {'count': 2, 'w_priv': 1},
    'twirl': {'k': 1},
}
"""A document every subcommand accepts."""
