# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""Module for RU10 Raptor coding: segmentation, pre-code, LT packets and GF(2) decoding."""

import logging
from functools import lru_cache
from math import ceil, comb
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from mfd_common_libs import log_levels, add_logging_level

from mfd_vdna.data_structures import AuxStructure, Packet, SourceBlockPool
from mfd_vdna.exceptions import CodecConfigException, EmptyPayloadException, RankDeficientException
from mfd_vdna.randomness import RAPTOR_DISTRIBUTION, DegreeDistribution, prng_init, sample_degree, sample_indices

logger = logging.getLogger(__name__)
add_logging_level(level_name="MODULE_DEBUG", level_value=log_levels.MODULE_DEBUG)

DEFAULT_BLOCK_SIZE = 46
MAX_BLOCK_SIZE = 255
LDPC_CONTRIBUTIONS = 3


def segment(data: bytes, block_size: int = DEFAULT_BLOCK_SIZE) -> SourceBlockPool:
    """
    Split payload into equally sized blocks, last one padded with 0x00.

    :param data: Payload
    :param block_size: Block size in bytes, 1..255
    :return: Pool of ceil(len(data) / block_size) blocks
    :raises EmptyPayloadException: on empty payload
    :raises CodecConfigException: on block size out of range
    """
    if not 1 <= block_size <= MAX_BLOCK_SIZE:
        raise CodecConfigException(f"Block size must be in 1..{MAX_BLOCK_SIZE}, got {block_size}.")
    if not data:
        raise EmptyPayloadException("Cannot encode empty payload.")
    n = -(-len(data) // block_size)
    padded = np.zeros(n * block_size, dtype=np.uint8)
    padded[: len(data)] = np.frombuffer(data, dtype=np.uint8)
    last_block_len = len(data) - (n - 1) * block_size
    logger.log(
        log_levels.MODULE_DEBUG,
        msg=f"Payload of {len(data)} bytes split into {n} blocks of {block_size} bytes, last block: {last_block_len}",
    )
    return SourceBlockPool(blocks=padded.reshape(n, block_size), last_block_len=last_block_len)


def _is_prime(value: int) -> bool:
    if value < 2:
        return False
    return all(value % divisor for divisor in range(2, int(value**0.5) + 1))


def _gray_sequence(count: int, weight: int) -> List[int]:
    """Get first `count` Gray codes with exactly `weight` one-bits."""
    codes = []
    i = 0
    while len(codes) < count:
        gray = i ^ (i >> 1)
        if gray.bit_count() == weight:
            codes.append(gray)
        i += 1
    return codes


@lru_cache(maxsize=64)
def aux_structure(n: int) -> AuxStructure:
    """
    Derive LDPC and Half pre-code relations from number of source blocks.

    :param n: Number of source blocks
    :return: Auxiliary structure, relations indexed by auxiliary block
    :raises CodecConfigException: when n is not positive
    """
    if n < 1:
        raise CodecConfigException(f"Number of source blocks must be positive, got {n}.")
    x = 1
    while x * (x - 1) < 2 * n:
        x += 1
    s_count = ceil(0.01 * n) + x
    while not _is_prime(s_count):
        s_count += 1
    h_count = 1
    while comb(h_count, ceil(h_count / 2)) < n + s_count:
        h_count += 1

    ldpc = [[] for _ in range(s_count)]
    for i in range(n):
        a = 1 + (i // s_count) % (s_count - 1)
        b = i % s_count
        for _ in range(LDPC_CONTRIBUTIONS):
            ldpc[b].append(i)
            b = (b + a) % s_count

    half = [[] for _ in range(h_count)]
    for j, gray in enumerate(_gray_sequence(n + s_count, ceil(h_count / 2))):
        for h in range(h_count):
            if gray >> h & 1:
                half[h].append(j)

    logger.log(
        log_levels.MODULE_DEBUG,
        msg=f"Pre-code for n={n}: X={x}, LDPC blocks={s_count}, Half blocks={h_count}",
    )
    return AuxStructure(
        n=n,
        s_count=s_count,
        h_count=h_count,
        relations=tuple(tuple(sorted(relation)) for relation in ldpc + half),
    )


def build_intermediates(pool: SourceBlockPool, aux: AuxStructure) -> np.ndarray:
    """
    Extend source blocks with auxiliary blocks.

    :param pool: Source blocks
    :param aux: Structure derived from pool's n
    :return: Array of shape (L, c): source blocks, LDPC blocks, Half blocks
    :raises CodecConfigException: when aux does not match pool
    """
    if aux.n != pool.n:
        raise CodecConfigException(f"Pre-code built for n={aux.n} cannot extend pool of {pool.n} blocks.")
    intermediates = np.zeros((aux.intermediate_count, pool.block_size), dtype=np.uint8)
    intermediates[: pool.n] = pool.blocks
    # Half relations reference LDPC blocks, so auxiliary blocks are filled in order
    for j, relation in enumerate(aux.relations):
        if relation:
            intermediates[pool.n + j] = np.bitwise_xor.reduce(intermediates[list(relation)], axis=0)
    return intermediates


def packet_indices(
    packet_id: int, intermediate_count: int, distribution: DegreeDistribution = RAPTOR_DISTRIBUTION
) -> List[int]:
    """
    Regenerate intermediate indices combined into packet.

    :param packet_id: 32-bit packet id used as seed
    :param intermediate_count: Number of intermediate blocks (L)
    :param distribution: Degree distribution
    :return: Ascending distinct indices
    """
    state = prng_init(packet_id)
    degree, state = sample_degree(state, distribution, cap=intermediate_count)
    indices, _ = sample_indices(state, degree, intermediate_count)
    return indices


def lt_packet(
    packet_id: int, intermediates: np.ndarray, distribution: DegreeDistribution = RAPTOR_DISTRIBUTION
) -> Packet:
    """
    Produce LT packet.

    :param packet_id: 32-bit packet id used as seed
    :param intermediates: Array of shape (L, c)
    :param distribution: Degree distribution
    :return: Packet with XOR of selected blocks
    """
    indices = packet_indices(packet_id, intermediates.shape[0], distribution)
    payload = np.bitwise_xor.reduce(intermediates[indices], axis=0)
    return Packet(id=packet_id, payload=payload.tobytes())


def indices_to_row(indices: Iterable[int]) -> int:
    """Pack indices into GF(2) row, bit i set for index i."""
    row = 0
    for index in indices:
        row ^= 1 << index
    return row


def constraint_rows(aux: AuxStructure) -> List[int]:
    """
    Get zero right-hand side rows tying auxiliary blocks to their contributors.

    :param aux: Auxiliary structure
    :return: One packed row per auxiliary block
    """
    return [indices_to_row(relation) ^ (1 << (aux.n + j)) for j, relation in enumerate(aux.relations)]


def _eliminate(rows: List[int], rhs: List[int], unknowns: int) -> int:
    """
    Gauss-Jordan elimination with partial pivoting over GF(2), in place.

    Pivot is the lowest-index row with a one in pivot column.

    :return: Rank of system
    """
    count = len(rows)
    rank = 0
    for col in range(unknowns):
        bit = 1 << col
        pivot = next((r for r in range(rank, count) if rows[r] & bit), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        rhs[rank], rhs[pivot] = rhs[pivot], rhs[rank]
        pivot_row, pivot_rhs = rows[rank], rhs[rank]
        for r in range(count):
            if r != rank and rows[r] & bit:
                rows[r] ^= pivot_row
                rhs[r] ^= pivot_rhs
        rank += 1
    return rank


def gf2_rank(rows: Sequence[int], unknowns: int) -> int:
    """
    Get rank of packed GF(2) rows.

    :param rows: Packed rows
    :param unknowns: Number of columns
    :return: Rank
    """
    return _eliminate(list(rows), [0] * len(rows), unknowns)


def solve_gf2(rows: Sequence[int], rhs: Sequence[int], unknowns: int) -> List[int]:
    """
    Solve augmented GF(2) system.

    :param rows: Packed coefficient rows
    :param rhs: Right-hand sides as integers
    :param unknowns: Number of unknowns
    :return: Value of every unknown
    :raises RankDeficientException: when rank is lower than number of unknowns
    """
    rows, rhs = list(rows), list(rhs)
    rank = _eliminate(rows, rhs, unknowns)
    if rank < unknowns:
        raise RankDeficientException(rank, unknowns)
    # reduced rows form identity, row i holds unknown i
    return rhs[:unknowns]


def decode_blocks(
    packets: Sequence[Packet],
    n: int,
    block_size: int = DEFAULT_BLOCK_SIZE,
    distribution: DegreeDistribution = RAPTOR_DISTRIBUTION,
) -> np.ndarray:
    """
    Recover source blocks from packets.

    :param packets: Received packets, any order, duplicates allowed
    :param n: Number of source blocks
    :param block_size: Block size in bytes
    :param distribution: Degree distribution used at encoding
    :return: Array of shape (n, block_size)
    :raises RankDeficientException: when packets do not determine every intermediate block
    :raises CodecConfigException: on payload of wrong size
    """
    aux = aux_structure(n)
    unknowns = aux.intermediate_count
    rows = constraint_rows(aux)
    rhs = [0] * len(rows)
    for packet in packets:
        if len(packet.payload) != block_size:
            raise CodecConfigException(f"Packet {packet.id} payload has {len(packet.payload)} bytes, not {block_size}.")
        rows.append(indices_to_row(packet_indices(packet.id, unknowns, distribution)))
        rhs.append(int.from_bytes(packet.payload, "big"))
    logger.log(
        log_levels.MODULE_DEBUG,
        msg=f"Solving {len(rows)} equations ({len(packets)} packets) for {unknowns} intermediate blocks",
    )
    solution = solve_gf2(rows, rhs, unknowns)
    data = b"".join(value.to_bytes(block_size, "big") for value in solution[:n])
    return np.frombuffer(data, dtype=np.uint8).reshape(n, block_size)


class EliminationState:
    """Incrementally maintained GF(2) echelon form used by pseudo-decoder."""

    def __init__(self, aux: AuxStructure, distribution: DegreeDistribution = RAPTOR_DISTRIBUTION) -> None:
        """
        Initialize state with constraint rows.

        :param aux: Auxiliary structure of encoded payload
        :param distribution: Degree distribution
        """
        self.aux = aux
        self.distribution = distribution
        # lowest set bit of every stored row is unique
        self._pivots = {}
        for row in constraint_rows(aux):
            self.insert_row(row)

    @property
    def rank(self) -> int:
        """Rank reached so far."""
        return len(self._pivots)

    @property
    def unknowns(self) -> int:
        """Number of intermediate blocks (L)."""
        return self.aux.intermediate_count

    @property
    def decodable(self) -> bool:
        """Whether every intermediate block is determined."""
        return self.rank == self.unknowns

    def insert_row(self, row: int) -> bool:
        """
        Reduce row against stored rows and keep it if independent.

        :param row: Packed row
        :return: True when rank increased
        """
        while row:
            lowest = row & -row
            pivot_row = self._pivots.get(lowest)
            if pivot_row is None:
                self._pivots[lowest] = row
                return True
            row ^= pivot_row
        return False

    def insert_packet(self, packet: Packet) -> bool:
        """
        Add packet equation.

        :param packet: Packet, only its id is used
        :return: True when rank increased
        """
        return self.insert_row(indices_to_row(packet_indices(packet.id, self.unknowns, self.distribution)))


def decodability_check(state: EliminationState, packet: Packet) -> Tuple[bool, EliminationState]:
    """
    Insert packet into pseudo-decoder.

    :param state: Elimination state, updated in place
    :param packet: Packet to add
    :return: Whether system is decodable and the updated state
    """
    state.insert_packet(packet)
    return state.decodable, state
