# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""Module for reading and writing oligo pools as FASTA."""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, TextIO, Union

from Bio.Seq import Seq
from Bio.SeqIO.FastaIO import FastaTwoLineWriter
from Bio.SeqRecord import SeqRecord
from mfd_common_libs import log_levels, add_logging_level

from mfd_vdna.data_structures import Oligo
from mfd_vdna.exceptions import FastaParseException

logger = logging.getLogger(__name__)
add_logging_level(level_name="MODULE_DEBUG", level_value=log_levels.MODULE_DEBUG)

RECORD_PREFIX = "oligo_"
_SEQUENCE_LINE = re.compile(r"[ACGT]+")


@dataclass(frozen=True)
class FastaRecord:
    """Single FASTA record."""

    description: str
    sequence: str


def _to_records(oligos: Iterable[Union[str, Oligo]]) -> List[SeqRecord]:
    records = []
    for index, oligo in enumerate(oligos):
        sequence = oligo.sequence if isinstance(oligo, Oligo) else oligo
        records.append(SeqRecord(Seq(sequence), id=f"{RECORD_PREFIX}{index}", description=""))
    return records


def write_fasta(oligos: Iterable[Union[str, Oligo]], destination: Union[Path, str, TextIO]) -> int:
    """
    Write pool as FASTA, one single-line record `oligo_<index>` per oligo, LF line endings.

    :param oligos: Sequences in output order
    :param destination: Path or text stream
    :return: Number of records written
    :raises ValueError: on empty pool
    :raises OSError: on write failure
    """
    records = _to_records(oligos)
    if not records:
        raise ValueError("Cannot write empty pool.")
    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="ascii", newline="\n") as handle:
            count = FastaTwoLineWriter(handle).write_records(records)
    else:
        count = FastaTwoLineWriter(destination).write_records(records)
    logger.log(log_levels.MODULE_DEBUG, msg=f"{count} FASTA records written")
    return count


def parse_fasta(text: str) -> List[FastaRecord]:
    """
    Parse FASTA text.

    Multi-line sequences are joined, blank lines skipped, lowercase upcased, CRLF accepted.

    :param text: FASTA content
    :return: Records in file order
    :raises FastaParseException: on empty input, missing header, empty record or invalid characters
    """
    records = []
    description = None
    header_line = 0
    chunks: List[str] = []

    def close_record() -> None:
        if description is None:
            return
        if not chunks:
            raise FastaParseException(header_line, f"record {description!r} has empty sequence")
        records.append(FastaRecord(description=description, sequence="".join(chunks)))

    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            close_record()
            description, header_line, chunks = line[1:].strip(), line_number, []
            continue
        if description is None:
            raise FastaParseException(line_number, "expected record header starting with '>'")
        line = line.upper()
        if not _SEQUENCE_LINE.fullmatch(line):
            raise FastaParseException(line_number, "sequence contains characters other than A, C, G, T")
        chunks.append(line)
    close_record()
    if not records:
        raise FastaParseException(1, "no FASTA records found")
    return records


def read_fasta(source: Union[Path, str, TextIO]) -> List[FastaRecord]:
    """
    Read FASTA file.

    :param source: Path or text stream
    :return: Records in file order
    :raises FastaParseException: on malformed content
    :raises OSError: on read failure
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="ascii", errors="replace") as handle:
            text = handle.read()
    else:
        text = source.read()
    records = parse_fasta(text)
    logger.log(log_levels.MODULE_DEBUG, msg=f"{len(records)} FASTA records read")
    return records
