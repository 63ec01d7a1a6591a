# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""Module for translating packets and header fields into oligos and back."""

import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from mfd_common_libs import log_levels, add_logging_level

from mfd_vdna.codebook import CODEWORD_LENGTH, decode_words, encode_bytes
from mfd_vdna.constraints import NUCLEOTIDES, ConstraintPolicy, is_compliant
from mfd_vdna.data_structures import HeaderFields, Mode, Oligo, Packet
from mfd_vdna.exceptions import (
    AmbiguousHeaderException,
    CorruptedHeaderException,
    HeaderMissingException,
    HeaderUnencodableException,
    InvalidModeException,
    MalformedOligoException,
    UnknownCodewordException,
)
from mfd_vdna.randomness import HEADER_MASK_SIZE, header_mask, payload_keystream
from mfd_vdna.raptor import DEFAULT_BLOCK_SIZE

logger = logging.getLogger(__name__)
add_logging_level(level_name="MODULE_DEBUG", level_value=log_levels.MODULE_DEBUG)

ID_MASK = 0xA5A5A5A5
ID_SIZE = 4
NT_PER_BYTE = 4
HEADER_SIZE = 7
HEADER_SEGMENT_LENGTH = HEADER_SIZE * CODEWORD_LENGTH
JOINT_LENGTH = 1
HEADER_EXTENSION = JOINT_LENGTH + HEADER_SEGMENT_LENGTH
MAX_S_PARAM = 0xFF

_NT_CODES = np.frombuffer(NUCLEOTIDES.encode("ascii"), dtype=np.uint8)
_INVALID_CODE = 0xFF
_CODE_OF_NT = np.full(256, _INVALID_CODE, dtype=np.uint8)
_CODE_OF_NT[_NT_CODES] = np.arange(len(NUCLEOTIDES), dtype=np.uint8)
_BIT_PAIR_SHIFTS = np.array([6, 4, 2, 0], dtype=np.uint8)


def payload_oligo_length(block_size: int = DEFAULT_BLOCK_SIZE) -> int:
    """Get length in nt of payload oligo carrying block_size bytes."""
    return (ID_SIZE + block_size) * NT_PER_BYTE


def header_oligo_length(block_size: int = DEFAULT_BLOCK_SIZE) -> int:
    """Get length in nt of header-bearing oligo."""
    return payload_oligo_length(block_size) + HEADER_EXTENSION


def map_to_dna(data: bytes) -> str:
    """
    Map bytes to nucleotides, most significant bit pair first: 00->A, 01->C, 10->G, 11->T.

    :param data: Bytes to map
    :return: Sequence of 4 nt per byte
    """
    values = np.frombuffer(data, dtype=np.uint8)
    pairs = (values[:, np.newaxis] >> _BIT_PAIR_SHIFTS) & 0b11
    return _NT_CODES[pairs.ravel()].tobytes().decode("ascii")


def unmap(seq: str) -> bytes:
    """
    Map nucleotides back to bytes.

    :param seq: Sequence with length multiple of 4
    :return: Bytes
    :raises MalformedOligoException: on wrong length or invalid alphabet
    """
    if len(seq) % NT_PER_BYTE:
        raise MalformedOligoException(f"Sequence length {len(seq)} is not a multiple of {NT_PER_BYTE}.")
    try:
        codes = _CODE_OF_NT[np.frombuffer(seq.encode("ascii"), dtype=np.uint8)]
    except UnicodeEncodeError:
        raise MalformedOligoException("Sequence contains non-ASCII characters.") from None
    if (codes == _INVALID_CODE).any():
        position = int(np.argmax(codes == _INVALID_CODE))
        raise MalformedOligoException(f"Invalid nucleotide {seq[position]!r} at position {position}.")
    values = np.bitwise_or.reduce(codes.reshape(-1, NT_PER_BYTE) << _BIT_PAIR_SHIFTS, axis=1)
    return values.astype(np.uint8).tobytes()


def _whiten(packet_id: int, payload: bytes) -> bytes:
    """XOR payload with keystream of packet id, own inverse."""
    keystream = np.frombuffer(payload_keystream(packet_id, len(payload)), dtype=np.uint8)
    return np.bitwise_xor(np.frombuffer(payload, dtype=np.uint8), keystream).tobytes()


def packet_to_oligo(packet: Packet) -> Oligo:
    """
    Translate packet into payload oligo: masked id (4 bytes, big-endian) followed by whitened payload.

    Whitening gives distinct candidate strands for distinct ids even when few payloads are possible.

    :param packet: Packet
    :return: Candidate oligo
    """
    wire = (packet.id ^ ID_MASK).to_bytes(ID_SIZE, "big") + _whiten(packet.id, packet.payload)
    return Oligo(map_to_dna(wire))


def oligo_to_packet(seq: str, block_size: int = DEFAULT_BLOCK_SIZE) -> Packet:
    """
    Translate payload oligo into packet.

    :param seq: Payload oligo
    :param block_size: Block size in bytes
    :return: Packet with unmasked id and payload
    :raises MalformedOligoException: on wrong length or invalid alphabet
    """
    expected = payload_oligo_length(block_size)
    if len(seq) != expected:
        raise MalformedOligoException(f"Payload oligo must have {expected} nt, got {len(seq)}.")
    wire = unmap(seq)
    packet_id = int.from_bytes(wire[:ID_SIZE], "big") ^ ID_MASK
    return Packet(id=packet_id, payload=_whiten(packet_id, wire[ID_SIZE:]))


def encode_header_bytes(fields: HeaderFields, s_param: int) -> str:
    """
    Encode header with given S, without constraint check.

    :param fields: Header fields, s_param of fields is ignored
    :param s_param: Seed of header mask
    :return: 35-nt segment
    """
    raw = fields.n.to_bytes(4, "big") + bytes([fields.last_block_len, fields.mode])
    masked = bytes(value ^ mask for value, mask in zip(raw, header_mask(s_param)))
    return encode_bytes(masked + bytes([s_param]))


def build_header_segment(
    fields: HeaderFields, policy: Optional[ConstraintPolicy] = None, start_s: int = 0
) -> Tuple[str, int]:
    """
    Find first S producing a constraint compliant header segment.

    :param fields: Header fields
    :param policy: Constraints for segment, encoder policy when not given
    :param start_s: First S value to try
    :return: 35-nt segment and S used
    :raises HeaderUnencodableException: when no S up to 255 yields compliant segment
    """
    policy = policy or ConstraintPolicy.encoder()
    for s_param in range(start_s, MAX_S_PARAM + 1):
        segment = encode_header_bytes(fields, s_param)
        if is_compliant(segment, policy):
            logger.log(log_levels.MODULE_DEBUG, msg=f"Header segment accepted with S={s_param}")
            return segment, s_param
    raise HeaderUnencodableException(
        f"No S value in {start_s}..{MAX_S_PARAM} gives compliant header segment for {fields}."
    )


def parse_header_segment(segment: str) -> HeaderFields:
    """
    Decode header segment.

    :param segment: 35-nt segment
    :return: Header fields including S
    :raises CorruptedHeaderException: on unknown codeword or out of range fields
    :raises InvalidModeException: on unknown mode byte
    """
    if len(segment) != HEADER_SEGMENT_LENGTH:
        raise CorruptedHeaderException(f"Header segment must have {HEADER_SEGMENT_LENGTH} nt, got {len(segment)}.")
    try:
        raw = decode_words(segment)
    except UnknownCodewordException as e:
        raise CorruptedHeaderException(f"Header segment is corrupted: {e}") from e
    s_param = raw[HEADER_MASK_SIZE]
    unmasked = bytes(value ^ mask for value, mask in zip(raw[:HEADER_MASK_SIZE], header_mask(s_param)))
    n = int.from_bytes(unmasked[:4], "big")
    last_block_len, mode = unmasked[4], unmasked[5]
    if mode not in set(Mode):
        raise InvalidModeException(f"Unknown mode byte {mode:#04x} in header.")
    if n < 1 or last_block_len < 1:
        raise CorruptedHeaderException(f"Header carries invalid values: n={n}, last block length={last_block_len}.")
    return HeaderFields(n=n, last_block_len=last_block_len, mode=mode, s_param=s_param)


def joint_nucleotide(left: str, right: str) -> str:
    """Get first nucleotide in A<C<G<T order different from both neighbours."""
    return next(nt for nt in NUCLEOTIDES if nt not in (left, right))


def attach_header(first: Union[str, Oligo], segment: str) -> Oligo:
    """
    Append header segment to first payload oligo through joint nucleotide.

    :param first: Payload oligo
    :param segment: 35-nt header segment
    :return: Header-bearing oligo
    """
    sequence = first.sequence if isinstance(first, Oligo) else first
    joint = joint_nucleotide(sequence[-1], segment[0])
    return Oligo(sequence + joint + segment, is_header_bearing=True)


def detect_and_parse_header(
    oligos: Sequence[str], block_size: int = DEFAULT_BLOCK_SIZE
) -> Tuple[HeaderFields, List[str]]:
    """
    Locate header-bearing oligo, decode header and strip it.

    :param oligos: Pool of sequences
    :param block_size: Block size in bytes
    :return: Header fields and pool with header-bearing oligo cut to payload length
    :raises HeaderMissingException: when no oligo is longer than payload oligos
    :raises AmbiguousHeaderException: when more than one oligo is longer than payload oligos
    :raises CorruptedHeaderException: when header-bearing oligo has unexpected size or content
    """
    payload_length = payload_oligo_length(block_size)
    long_oligos = [index for index, seq in enumerate(oligos) if len(seq) > payload_length]
    if not long_oligos:
        raise HeaderMissingException(f"No oligo longer than {payload_length} nt in pool of {len(oligos)}.")
    if len(long_oligos) > 1:
        raise AmbiguousHeaderException(f"{len(long_oligos)} oligos longer than {payload_length} nt found.")
    index = long_oligos[0]
    bearing = oligos[index]
    if len(bearing) != header_oligo_length(block_size):
        raise CorruptedHeaderException(
            f"Header-bearing oligo has {len(bearing)} nt, expected {header_oligo_length(block_size)}."
        )
    fields = parse_header_segment(bearing[payload_length + JOINT_LENGTH :])
    logger.log(log_levels.MODULE_DEBUG, msg=f"Header found in oligo {index}: {fields}")
    stripped = list(oligos)
    stripped[index] = bearing[:payload_length]
    return fields, stripped
