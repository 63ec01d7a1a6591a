# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""Shared fixtures: payload generator and dense GF(2) rank oracle."""

from typing import Callable, Sequence

import numpy as np
import pytest

from mfd_vdna.oligo import detect_and_parse_header, oligo_to_packet
from mfd_vdna.raptor import DEFAULT_BLOCK_SIZE, aux_structure, packet_indices


def dense_gf2_rank(matrix: np.ndarray) -> int:
    """Row-reduce 0/1 matrix over GF(2) and count pivots."""
    work = (matrix % 2).astype(np.uint8)
    rank = 0
    rows, cols = work.shape
    for col in range(cols):
        if rank == rows:
            break
        candidates = np.nonzero(work[rank:, col])[0]
        if candidates.size == 0:
            continue
        pivot = rank + candidates[0]
        work[[rank, pivot]] = work[[pivot, rank]]
        others = work[:, col].astype(bool)
        others[rank] = False
        work[others] ^= work[rank]
        rank += 1
    return rank


def pool_matrix(sequences: Sequence[str], block_size: int = DEFAULT_BLOCK_SIZE) -> np.ndarray:
    """Build dense system of pool: one row per auxiliary relation, one per payload oligo."""
    fields, stripped = detect_and_parse_header(list(sequences), block_size)
    aux = aux_structure(fields.n)
    unknowns = aux.intermediate_count
    matrix = np.zeros((aux.m + len(stripped), unknowns), dtype=np.uint8)
    for j, relation in enumerate(aux.relations):
        matrix[j, list(relation)] = 1
        matrix[j, aux.n + j] = 1
    for row, seq in enumerate(stripped, start=aux.m):
        packet = oligo_to_packet(seq, block_size)
        matrix[row, packet_indices(packet.id, unknowns)] = 1
    return matrix


@pytest.fixture()
def rank_oracle() -> Callable[[np.ndarray], int]:
    return dense_gf2_rank


@pytest.fixture()
def pool_rank() -> Callable[..., tuple]:
    """Get (rank, L) of pool computed without the codec's own elimination."""

    def _pool_rank(sequences: Sequence[str], block_size: int = DEFAULT_BLOCK_SIZE) -> tuple:
        matrix = pool_matrix(sequences, block_size)
        return dense_gf2_rank(matrix), matrix.shape[1]

    return _pool_rank


@pytest.fixture()
def random_payload() -> Callable[[int, int], bytes]:
    def _random_payload(size: int, seed: int = 0) -> bytes:
        return np.random.default_rng(seed).integers(0, 256, size=size, dtype=np.uint8).tobytes()

    return _random_payload
