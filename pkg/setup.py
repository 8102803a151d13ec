#!/usr/bin/env python3

from setuptools import find_packages, setup

from magic_blind import __version__

requirements = [
    'numpy>=1.17',
    'scipy>=1.3',
    'networkx>=2.3',
    'Django~=2.2',
    'djangorestframework>=3.9',
]


with open('README.rst') as f:
    long_description = f.read()

setup(
    name='magic-blind',
    version=__version__,
    description='Blind and verifiable delegation of Clifford computations with magic-state '
                'injection',
    long_description=long_description,
    license='GPLv2+',
    python_requires='>=3.7',
    install_requires=requirements,
    include_package_data=True,
    packages=find_packages(exclude=['magic_blind.tests', 'magic_blind.tests.*']),
    classifiers=(
        'License :: OSI Approved :: GNU General Public License v2 or later (GPLv2+)',
        'Operating System :: POSIX :: Linux',
        'Framework :: Django',
        'Topic :: Scientific/Engineering :: Physics',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.7',
    ),
    entry_points={
        'console_scripts': [
            'magic-blind = magic_blind.app.cli:main',
        ]
    }
)
