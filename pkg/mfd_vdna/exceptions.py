# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""Module for exceptions."""

from subprocess import CalledProcessError


class DNACodecException(Exception):
    """Base codec exception."""


class MalformedSequenceException(DNACodecException):
    """Handle sequences with invalid alphabet or no content."""


class MalformedOligoException(DNACodecException):
    """Handle oligos that cannot be translated back into a packet."""


class UnknownCodewordException(DNACodecException):
    """Handle 5-nt header words that are not in the codebook."""


class CodebookConstructionException(DNACodecException):
    """Handle codebook enumeration producing too few codewords."""


class CodecConfigException(DNACodecException):
    """Handle invalid codec parameters."""


class EmptyPayloadException(DNACodecException):
    """Handle encoding of empty input."""


class EncodeFailureException(DNACodecException):
    """Handle exhausted trial id space during encoding."""


class RankDeficientException(DNACodecException):
    """Handle GF(2) systems that cannot be solved for every unknown."""

    def __init__(self, rank: int, unknowns: int, message: str = "") -> None:
        """
        Initialize exception.

        :param rank: Rank reached by the elimination
        :param unknowns: Number of unknowns of the system (L)
        :param message: Optional custom message
        """
        self.rank = rank
        self.unknowns = unknowns
        super().__init__(message or f"System rank {rank} is lower than number of unknowns {unknowns}.")


class NotEnoughOligosException(RankDeficientException):
    """Handle pools that do not carry enough independent packets to decode."""


class HeaderException(DNACodecException):
    """Base header exception."""


class HeaderMissingException(HeaderException):
    """Handle pools without header-bearing oligo."""


class AmbiguousHeaderException(HeaderException):
    """Handle pools with more than one header-bearing oligo."""


class CorruptedHeaderException(HeaderException):
    """Handle header segments that decode to invalid fields."""


class InvalidModeException(CorruptedHeaderException):
    """Handle mode byte outside of the known modes."""


class HeaderUnencodableException(HeaderException):
    """Handle header fields for which no S value yields a valid segment."""


class FastaParseException(DNACodecException):
    """Handle malformed FASTA input."""

    def __init__(self, line_number: int, message: str) -> None:
        """
        Initialize exception.

        :param line_number: 1-based line number where parsing failed
        :param message: Description of the problem
        """
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class ErasurePolicyException(DNACodecException):
    """Handle invalid erasure channel policies."""


class ToolNotAvailable(Exception):
    """Base external tool exception."""


class ToolNotConfigured(DNACodecException):
    """Handle missing command template for external tool."""


class ExternalToolException(CalledProcessError, DNACodecException):
    """Handling external image codec execution exceptions."""
