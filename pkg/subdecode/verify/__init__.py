"""Oracle checks for the decoding guarantees."""

from subdecode.verify.checks import (
    CHECKS,
    check_delta_table,
    check_lemma1,
    check_norm_lemmas,
    check_theorem1,
    check_theorem2,
    run_checks,
    spoke_scatter,
)
from subdecode.verify.reports import REPORT_HEADER, Statistic, VerificationReport

__all__ = [
    "CHECKS",
    "REPORT_HEADER",
    "Statistic",
    "VerificationReport",
    "check_delta_table",
    "check_lemma1",
    "check_norm_lemmas",
    "check_theorem1",
    "check_theorem2",
    "run_checks",
    "spoke_scatter",
]
