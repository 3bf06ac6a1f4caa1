"""Desk-scale experiments: level sets, S5 certificates, roots and evidence."""

from .evidence import DEFAULT_BASIS, EvidenceReport, SearchRecord, conjecture_evidence
from .galois import CycleWitness, S5Certificate, S5Refusal, certify_s5, degree_pattern
from .levels import (ColthurstReport, LevelCaps, LevelSet, ScheduleStep, SeparationEstimate,
                     colthurst_search, enumerate_levels, separation)
from .roots import QuestionRoots, opaque_constants, question_roots

__all__ = [
    "DEFAULT_BASIS", "EvidenceReport", "SearchRecord", "conjecture_evidence",
    "CycleWitness", "S5Certificate", "S5Refusal", "certify_s5", "degree_pattern",
    "ColthurstReport", "LevelCaps", "LevelSet", "ScheduleStep", "SeparationEstimate",
    "colthurst_search", "enumerate_levels", "separation",
    "QuestionRoots", "opaque_constants", "question_roots",
]
