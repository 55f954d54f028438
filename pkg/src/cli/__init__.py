"""
CLI module: argparse front end, canonical JSON codec, bundled examples and
certification suites.
"""

from .io import canonical, dumps, load_json, load_model
from .library import Example, all_examples, export_library, get_example, round_trips
from .verify import Check, SuiteReport, run_suite
from .main import RunConfig, build_parser, run, main

__all__ = [
    'canonical',
    'dumps',
    'load_json',
    'load_model',
    'Example',
    'all_examples',
    'export_library',
    'get_example',
    'round_trips',
    'Check',
    'SuiteReport',
    'run_suite',
    'RunConfig',
    'build_parser',
    'run',
    'main'
]
