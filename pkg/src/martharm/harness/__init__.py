"""Random corpora, verification suites, and report emission."""

from .corpus import (
    bmo_suite_functions,
    generate_bmo,
    random_atoms,
    random_jumps,
    random_martingale,
    random_terminal,
    standard_tree,
)
from .records import CorpusConfig, VerificationRecord, sort_records
from .reporting import emit_report, parse_json
from .suites import SUITES, run_suite, run_suites, suite_names

__all__ = [
    "CorpusConfig",
    "SUITES",
    "VerificationRecord",
    "bmo_suite_functions",
    "emit_report",
    "generate_bmo",
    "parse_json",
    "random_atoms",
    "random_jumps",
    "random_martingale",
    "random_terminal",
    "run_suite",
    "run_suites",
    "sort_records",
    "standard_tree",
    "suite_names",
]
