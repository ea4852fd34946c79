"""DSEA chaotic stream cipher and its cryptanalysis."""

from .chaos import (
    CycleReport,
    Fixed8,
    MuFixed,
    PrecisionMode,
    Scheme,
    detect_cycle,
    generate_prbs,
    logistic_step,
    survey_quantization,
)
from .cipher import REFERENCE_KEY, DSEAStream, SecretKey, decrypt, encrypt
from .keyrecovery import AttackReport, Status, full_known_plaintext_attack
from .maskattack import PeriodEstimate, build_mask_texts, estimate_period_co
from .bruteforce import KeySpace, search, verify_key

__all__ = [
    "AttackReport", "CycleReport", "DSEAStream", "Fixed8", "KeySpace", "MuFixed", "REFERENCE_KEY",
    "PeriodEstimate", "PrecisionMode", "Scheme", "SecretKey", "Status", "build_mask_texts",
    "decrypt", "detect_cycle", "encrypt", "estimate_period_co", "full_known_plaintext_attack",
    "generate_prbs", "logistic_step", "search", "survey_quantization", "verify_key",
]
