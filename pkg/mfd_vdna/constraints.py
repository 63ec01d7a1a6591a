# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""Module for checking nucleotide sequences against biochemical constraints."""

import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Pattern, Tuple

from mfd_common_libs import log_levels, add_logging_level

from mfd_vdna.data_structures import Violation, ViolationKind, ViolationReport
from mfd_vdna.exceptions import CodecConfigException, MalformedSequenceException

logger = logging.getLogger(__name__)
add_logging_level(level_name="MODULE_DEBUG", level_value=log_levels.MODULE_DEBUG)

NUCLEOTIDES = "ACGT"
DEFAULT_PATTERN_RULES = ((3, 2), (4, 2), (5, 2), (6, 3), (7, 3))
_INVALID_CHAR = re.compile(r"[^ACGT]")


@dataclass(frozen=True)
class ConstraintPolicy:
    """
    Configuration of oligo constraints.

    max_homopolymer_run: Longest accepted run of one nucleotide
    gc_min: Lowest accepted GC ratio, inclusive
    gc_max: Highest accepted GC ratio, inclusive
    pattern_rules: Pairs of (pattern length, max consecutive repeats)
    """

    max_homopolymer_run: int = 3
    gc_min: float = 0.40
    gc_max: float = 0.50
    pattern_rules: Tuple[Tuple[int, int], ...] = DEFAULT_PATTERN_RULES

    def __post_init__(self):
        if self.max_homopolymer_run < 1:
            raise CodecConfigException(f"Homopolymer limit must be positive, got {self.max_homopolymer_run}.")
        if not 0 <= self.gc_min <= self.gc_max <= 1:
            raise CodecConfigException(f"Invalid GC bounds: [{self.gc_min}, {self.gc_max}].")
        for length, repeats in self.pattern_rules:
            if length < 1 or repeats < 1:
                raise CodecConfigException(f"Invalid pattern rule: ({length}, {repeats}).")

    @classmethod
    def encoder(cls) -> "ConstraintPolicy":
        """Get policy used by oligo filter and header retry loop."""
        return cls()

    @classmethod
    def verifier(cls) -> "ConstraintPolicy":
        """Get policy used by standalone compliance check."""
        return cls(gc_max=0.60)


@lru_cache(maxsize=None)
def _homopolymer_regex(max_run: int) -> Pattern:
    return re.compile(rf"([ACGT])\1{{{max_run},}}")


@lru_cache(maxsize=None)
def _tandem_regex(length: int, max_repeats: int) -> Pattern:
    # lookahead, so overlapping starts are all visited
    return re.compile(rf"(?=(([ACGT]{{{length}}})\2{{{max_repeats},}}))")


def check_alphabet(seq: str) -> None:
    """
    Check that sequence contains only A, C, G, T.

    :param seq: Nucleotide sequence
    :raises MalformedSequenceException: on any other character
    """
    match = _INVALID_CHAR.search(seq)
    if match:
        raise MalformedSequenceException(f"Invalid nucleotide {match.group()!r} at position {match.start()}.")


def check_homopolymers(seq: str, max_run: int) -> List[Violation]:
    """
    Find runs of identical nucleotides longer than max_run.

    :param seq: Nucleotide sequence
    :param max_run: Longest accepted run
    :return: One violation per offending run, placed at run start
    :raises MalformedSequenceException: on invalid alphabet
    """
    check_alphabet(seq)
    return [
        Violation(ViolationKind.HOMOPOLYMER, match.start(), f"run of {len(match.group())} x {match.group(1)}")
        for match in _homopolymer_regex(max_run).finditer(seq)
    ]


def check_gc(seq: str, gc_min: float, gc_max: float) -> Tuple[float, Optional[Violation]]:
    """
    Compute GC ratio and check it against inclusive bounds.

    :param seq: Nucleotide sequence
    :param gc_min: Lowest accepted ratio
    :param gc_max: Highest accepted ratio
    :return: GC ratio and violation if ratio is out of bounds
    :raises MalformedSequenceException: on empty sequence or invalid alphabet
    """
    if not seq:
        raise MalformedSequenceException("Cannot compute GC content of empty sequence.")
    check_alphabet(seq)
    ratio = (seq.count("G") + seq.count("C")) / len(seq)
    if gc_min <= ratio <= gc_max:
        return ratio, None
    return ratio, Violation(ViolationKind.GC_CONTENT, 0, f"GC ratio {ratio:.3f} outside [{gc_min:.2f}, {gc_max:.2f}]")


def check_patterns(seq: str, rules: Tuple[Tuple[int, int], ...] = DEFAULT_PATTERN_RULES) -> List[Violation]:
    """
    Find patterns repeated in tandem more often than allowed.

    Only the leftmost start of every periodic region is reported, rotations and suffixes of the same
    region are skipped.

    :param seq: Nucleotide sequence
    :param rules: Pairs of (pattern length, max consecutive repeats)
    :return: Violations sorted by rule then position
    :raises MalformedSequenceException: on invalid alphabet
    """
    check_alphabet(seq)
    violations = []
    for length, max_repeats in rules:
        for match in _tandem_regex(length, max_repeats).finditer(seq):
            start = match.start()
            if start > 0 and seq[start - 1] == seq[start - 1 + length]:
                continue
            unit = match.group(2)
            repeats = len(match.group(1)) // length
            violations.append(
                Violation(ViolationKind.PATTERN_REPEAT, start, f"pattern {unit} repeated {repeats} times")
            )
    return violations


def validate_oligo(
    seq: str, policy: Optional[ConstraintPolicy] = None, expected_length: Optional[int] = None
) -> ViolationReport:
    """
    Run every constraint check on sequence.

    :param seq: Nucleotide sequence
    :param policy: Constraints to apply, encoder policy when not given
    :param expected_length: Required length, not checked when None
    :return: Aggregated report, empty violations when accepted
    :raises MalformedSequenceException: on empty sequence or invalid alphabet
    """
    policy = policy or ConstraintPolicy.encoder()
    violations = check_homopolymers(seq, policy.max_homopolymer_run)
    gc_ratio, gc_violation = check_gc(seq, policy.gc_min, policy.gc_max)
    if gc_violation:
        violations.append(gc_violation)
    violations.extend(check_patterns(seq, policy.pattern_rules))
    if expected_length is not None and len(seq) != expected_length:
        violations.append(
            Violation(
                ViolationKind.LENGTH, min(len(seq), expected_length), f"length {len(seq)}, expected {expected_length}"
            )
        )
    return ViolationReport(violations=tuple(violations), gc_ratio=gc_ratio)


def is_compliant(seq: str, policy: ConstraintPolicy) -> bool:
    """
    Check constraints, stopping at first failure.

    Same verdict as validate_oligo without length check.

    :param seq: Nucleotide sequence over A, C, G, T
    :param policy: Constraints to apply
    :return: True when sequence is accepted
    """
    if not seq or _homopolymer_regex(policy.max_homopolymer_run).search(seq):
        return False
    ratio = (seq.count("G") + seq.count("C")) / len(seq)
    if not policy.gc_min <= ratio <= policy.gc_max:
        return False
    return not any(_tandem_regex(length, repeats).search(seq) for length, repeats in policy.pattern_rules)
