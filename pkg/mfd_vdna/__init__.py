# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""Module for encoding binary data and images into constrained DNA oligo pools."""

from .channel_sim import (
    DropCount as DropCount,
    DropProbability as DropProbability,
    ErasurePolicy as ErasurePolicy,
    erase as erase,
    run_trial as run_trial,
)
from .constraints import ConstraintPolicy as ConstraintPolicy, validate_oligo as validate_oligo
from .data_structures import Mode as Mode, Oligo as Oligo, Packet as Packet
from .fasta_io import read_fasta as read_fasta, write_fasta as write_fasta
from .pipeline import (
    EncodeConfig as EncodeConfig,
    FixedOverhead as FixedOverhead,
    PseudoDecoder as PseudoDecoder,
    decode_stream as decode_stream,
    encode_stream as encode_stream,
)
from .tools import CjxlTool as CjxlTool, DjxlTool as DjxlTool, ToolConfig as ToolConfig
