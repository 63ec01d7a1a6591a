# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""Data structures for MFD-VDNA."""

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import List, Optional, Tuple

import numpy as np

from mfd_vdna.exceptions import CodecConfigException

MAX_UINT32 = 0xFFFFFFFF


class Mode(IntEnum):
    """Mode byte stored in the header segment."""

    ENCODING = 0x00
    TRANSCODING = 0x11


class ViolationKind(str, Enum):
    """Kind of biochemical constraint violation."""

    HOMOPOLYMER = "Homopolymer"
    GC_CONTENT = "GcContent"
    PATTERN_REPEAT = "PatternRepeat"
    LENGTH = "Length"


@dataclass(frozen=True)
class Violation:
    """Single constraint violation, position is 0-based."""

    kind: ViolationKind
    position: int
    detail: str

    def to_dict(self) -> dict:
        """Get structured form of violation."""
        return {"kind": self.kind.value, "position": self.position, "detail": self.detail}


@dataclass(frozen=True)
class ViolationReport:
    """Result of oligo validation."""

    violations: Tuple[Violation, ...]
    gc_ratio: float

    @property
    def accepted(self) -> bool:
        """Whether sequence passed every check."""
        return not self.violations

    def to_lines(self, label: str = "") -> List[str]:
        """
        Get line-oriented form of report.

        :param label: Prefix identifying checked record
        :return: One line per violation
        """
        prefix = f"{label} " if label else ""
        return [f"{prefix}{v.kind.value} {v.position} {v.detail}" for v in self.violations]

    def to_dict(self) -> dict:
        """Get structured form of report."""
        return {
            "accepted": self.accepted,
            "gc_ratio": self.gc_ratio,
            "violations": [v.to_dict() for v in self.violations],
        }


@dataclass(frozen=True)
class Packet:
    """
    Binary form of one payload oligo.

    id: LT seed, 32-bit unsigned, stored unmasked
    payload: XOR of the selected intermediate blocks
    """

    id: int  # noqa: A003
    payload: bytes

    def __post_init__(self):
        if not 0 <= self.id <= MAX_UINT32:
            raise CodecConfigException(f"Packet id {self.id} does not fit in 32 bits.")


@dataclass(frozen=True)
class Oligo:
    """Nucleotide strand of the pool."""

    sequence: str
    is_header_bearing: bool = False

    def __len__(self) -> int:
        return len(self.sequence)


@dataclass(frozen=True)
class HeaderFields:
    """
    Fields carried by the header segment.

    n: Number of source blocks
    last_block_len: True byte count of the last source block
    mode: Workflow mode byte
    s_param: Seed of header mask, None until the segment is built
    """

    n: int
    last_block_len: int
    mode: int = Mode.ENCODING
    s_param: Optional[int] = None

    def __post_init__(self):
        if not 1 <= self.n <= MAX_UINT32:
            raise CodecConfigException(f"Source block count {self.n} out of range.")
        if not 1 <= self.last_block_len <= 0xFF:
            raise CodecConfigException(f"Last block length {self.last_block_len} out of range.")
        if self.mode not in set(Mode):
            raise CodecConfigException(f"Unsupported mode byte: {self.mode:#04x}.")
        if self.s_param is not None and not 0 <= self.s_param <= 0xFF:
            raise CodecConfigException(f"S parameter {self.s_param} out of range.")


@dataclass
class SourceBlockPool:
    """
    Fixed-size blocks segmented from payload.

    blocks: Array of shape (n, c), last block zero-padded
    last_block_len: True byte count of last block
    """

    blocks: np.ndarray
    last_block_len: int

    @property
    def n(self) -> int:
        """Number of source blocks."""
        return self.blocks.shape[0]

    @property
    def block_size(self) -> int:
        """Block size in bytes."""
        return self.blocks.shape[1]

    @property
    def data_length(self) -> int:
        """Payload length before padding."""
        return (self.n - 1) * self.block_size + self.last_block_len

    def reassemble(self) -> bytes:
        """Concatenate blocks and strip padding."""
        return self.blocks.tobytes()[: self.data_length]


@dataclass(frozen=True)
class AuxStructure:
    """
    Pre-code structure derived from number of source blocks.

    relations: For every auxiliary index j, contributing intermediate indices
    """

    n: int
    s_count: int
    h_count: int
    relations: Tuple[Tuple[int, ...], ...] = field(repr=False)

    @property
    def m(self) -> int:
        """Number of auxiliary blocks."""
        return self.s_count + self.h_count

    @property
    def intermediate_count(self) -> int:
        """Number of intermediate blocks (L)."""
        return self.n + self.m
