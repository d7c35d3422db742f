# -*- coding: utf-8 -*-
"""Palm identity checks on simulated paths"""
from gg1_ipa.pg_palm.palm_verify import (
    check_ergodic_equivalence,
    check_inversion,
    check_wald_lemma,
    ergodic_report,
    inversion_report,
    palm_reports,
    process_functional,
    wald_report,
)

__all__ = [
    "check_ergodic_equivalence",
    "check_inversion",
    "check_wald_lemma",
    "ergodic_report",
    "inversion_report",
    "palm_reports",
    "process_functional",
    "wald_report",
]
