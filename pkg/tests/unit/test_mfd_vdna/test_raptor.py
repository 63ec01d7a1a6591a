# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""Tests for `mfd_vdna.raptor`."""

from collections import Counter

import numpy as np
import pytest
from mfd_common_libs import log_levels

from mfd_vdna.exceptions import CodecConfigException, EmptyPayloadException, RankDeficientException
from mfd_vdna.raptor import (
    EliminationState,
    aux_structure,
    build_intermediates,
    constraint_rows,
    decodability_check,
    decode_blocks,
    gf2_rank,
    indices_to_row,
    lt_packet,
    packet_indices,
    segment,
    solve_gf2,
)


def row_to_dense(row: int, unknowns: int) -> np.ndarray:
    return np.array([row >> col & 1 for col in range(unknowns)], dtype=np.uint8)


class TestSegment:
    @pytest.mark.parametrize("size, n, last", [(100, 3, 8), (46, 1, 46), (47, 2, 1), (1, 1, 1)])
    def test_sizes(self, random_payload, size, n, last):
        pool = segment(random_payload(size), 46)
        assert (pool.n, pool.last_block_len, pool.block_size) == (n, last, 46)

    def test_padding(self, random_payload, caplog):
        caplog.set_level(log_levels.MODULE_DEBUG)
        data = random_payload(47)
        pool = segment(data, 46)
        assert pool.blocks[1, 0] == data[46]
        assert not pool.blocks[1, 1:].any()
        assert pool.reassemble() == data
        assert "split into 2 blocks of 46 bytes" in caplog.text

    def test_empty(self):
        with pytest.raises(EmptyPayloadException):
            segment(b"")

    @pytest.mark.parametrize("block_size", [0, 256])
    def test_block_size_out_of_range(self, block_size):
        with pytest.raises(CodecConfigException):
            segment(b"abc", block_size)


class TestAuxStructure:
    @pytest.mark.parametrize("n, s_count, h_count", [(1, 3, 4), (22, 11, 7)])
    def test_parameters(self, n, s_count, h_count):
        aux = aux_structure(n)
        assert (aux.s_count, aux.h_count, aux.m) == (s_count, h_count, s_count + h_count)
        assert aux.intermediate_count == n + s_count + h_count

    @pytest.mark.parametrize("n", [1, 22, 101, 1000])
    def test_every_source_block_in_three_ldpc_relations(self, n):
        aux = aux_structure(n)
        counts = Counter(i for relation in aux.relations[: aux.s_count] for i in relation)
        assert set(counts) == set(range(n))
        assert set(counts.values()) == {3}

    def test_half_weights(self):
        aux = aux_structure(22)
        # every block j < n + s_count appears in exactly ceil(h/2) Half relations
        counts = Counter(j for relation in aux.relations[aux.s_count :] for j in relation)
        assert set(counts) == set(range(22 + aux.s_count))
        assert set(counts.values()) == {4}

    def test_invalid(self):
        with pytest.raises(CodecConfigException):
            aux_structure(0)


class TestIntermediates:
    def test_single_block_ldpc(self, random_payload):
        pool = segment(random_payload(46), 46)
        intermediates = build_intermediates(pool, aux_structure(1))
        for j in range(3):
            assert np.array_equal(intermediates[1 + j], pool.blocks[0])

    def test_zero_payload(self):
        pool = segment(bytes(200), 46)
        assert not build_intermediates(pool, aux_structure(pool.n)).any()

    def test_relations_hold(self, random_payload):
        pool = segment(random_payload(1000), 46)
        aux = aux_structure(pool.n)
        intermediates = build_intermediates(pool, aux)
        for j, relation in enumerate(aux.relations):
            combined = np.bitwise_xor.reduce(intermediates[list(relation) + [pool.n + j]], axis=0)
            assert not combined.any()

    def test_mismatched_aux(self, random_payload):
        with pytest.raises(CodecConfigException):
            build_intermediates(segment(random_payload(100), 46), aux_structure(2))


class TestLtPacket:
    @pytest.fixture()
    def intermediates(self, random_payload):
        pool = segment(random_payload(500), 46)
        return build_intermediates(pool, aux_structure(pool.n))

    def test_deterministic(self, intermediates):
        assert lt_packet(31, intermediates) == lt_packet(31, intermediates)

    def test_degree_one_packet(self, intermediates):
        packet_id = next(i for i in range(10000) if len(packet_indices(i, intermediates.shape[0])) == 1)
        (index,) = packet_indices(packet_id, intermediates.shape[0])
        assert lt_packet(packet_id, intermediates).payload == intermediates[index].tobytes()

    def test_xor_with_all_but_one(self, intermediates):
        packet_id = next(i for i in range(10000) if len(packet_indices(i, intermediates.shape[0])) > 2)
        indices = packet_indices(packet_id, intermediates.shape[0])
        payload = np.frombuffer(lt_packet(packet_id, intermediates).payload, dtype=np.uint8)
        rest = np.bitwise_xor.reduce(intermediates[indices[1:]], axis=0)
        assert np.array_equal(payload ^ rest, intermediates[indices[0]])


class TestSolver:
    def test_solve_small_system(self):
        # x0 ^ x1 = 5, x1 = 3, x0 ^ x2 = 1
        rows = [0b011, 0b010, 0b101]
        assert solve_gf2(rows, [5, 3, 1], 3) == [6, 3, 7]

    def test_rank_deficient(self):
        with pytest.raises(RankDeficientException) as error:
            solve_gf2([0b011, 0b011], [1, 1], 2)
        assert (error.value.rank, error.value.unknowns) == (1, 2)

    def test_rank_matches_oracle(self, rank_oracle):
        rng = np.random.default_rng(3)
        for _ in range(50):
            matrix = rng.integers(0, 2, size=(12, 15), dtype=np.uint8)
            rows = [indices_to_row(np.nonzero(line)[0].tolist()) for line in matrix]
            assert gf2_rank(rows, 15) == rank_oracle(matrix)


class TestDecodeBlocks:
    @staticmethod
    def encode_until_decodable(data: bytes):
        pool = segment(data, 46)
        aux = aux_structure(pool.n)
        intermediates = build_intermediates(pool, aux)
        state = EliminationState(aux)
        packets = []
        packet_id = 0
        while not state.decodable:
            packet = lt_packet(packet_id, intermediates)
            state.insert_packet(packet)
            packets.append(packet)
            packet_id += 1
        return pool, packets

    def test_round_trip(self, random_payload, caplog):
        caplog.set_level(log_levels.MODULE_DEBUG)
        pool, packets = self.encode_until_decodable(random_payload(138, seed=4))
        assert np.array_equal(decode_blocks(packets, pool.n), pool.blocks)
        assert "intermediate blocks" in caplog.text

    def test_order_and_duplicate_invariance(self, random_payload):
        pool, packets = self.encode_until_decodable(random_payload(300, seed=8))
        shuffled = list(reversed(packets)) + packets[:3]
        assert np.array_equal(decode_blocks(shuffled, pool.n), pool.blocks)

    def test_duplicates_only(self, random_payload):
        pool = segment(random_payload(138), 46)
        intermediates = build_intermediates(pool, aux_structure(pool.n))
        packet = lt_packet(0, intermediates)
        with pytest.raises(RankDeficientException) as error:
            decode_blocks([packet] * 10, pool.n)
        assert error.value.rank < error.value.unknowns

    def test_single_block_degree_one(self, random_payload):
        pool = segment(random_payload(46), 46)
        intermediates = build_intermediates(pool, aux_structure(1))
        packet_id = next(i for i in range(200000) if packet_indices(i, intermediates.shape[0]) == [0])
        recovered = decode_blocks([lt_packet(packet_id, intermediates)], 1)
        assert np.array_equal(recovered, pool.blocks)

    def test_wrong_payload_size(self, random_payload):
        pool = segment(random_payload(46), 46)
        packet = lt_packet(0, build_intermediates(pool, aux_structure(1)))
        with pytest.raises(CodecConfigException):
            decode_blocks([packet], 1, block_size=40)

    def test_erasure_matches_oracle(self, random_payload, rank_oracle):
        rng = np.random.default_rng(21)
        for n_bytes in (46, 200, 460):
            pool = segment(random_payload(n_bytes, seed=n_bytes), 46)
            aux = aux_structure(pool.n)
            intermediates = build_intermediates(pool, aux)
            packets = [lt_packet(i, intermediates) for i in range(aux.intermediate_count + 4)]
            for _ in range(20):
                keep = sorted(rng.choice(len(packets), size=rng.integers(1, len(packets)), replace=False))
                subset = [packets[i] for i in keep]
                rows = constraint_rows(aux) + [
                    indices_to_row(packet_indices(p.id, aux.intermediate_count)) for p in subset
                ]
                dense = np.array([row_to_dense(row, aux.intermediate_count) for row in rows])
                if rank_oracle(dense) == aux.intermediate_count:
                    assert np.array_equal(decode_blocks(subset, pool.n), pool.blocks)
                else:
                    with pytest.raises(RankDeficientException):
                        decode_blocks(subset, pool.n)

    def test_small_n_matches_oracle(self, rank_oracle):
        rng = np.random.default_rng(1010)
        solved = failed = 0
        for trial in range(1000):
            n = int(rng.integers(1, 11))
            data = rng.integers(0, 256, size=4 * n, dtype=np.uint8).tobytes()
            pool = segment(data, 4)
            aux = aux_structure(n)
            unknowns = aux.intermediate_count
            intermediates = build_intermediates(pool, aux)
            ids = rng.integers(0, 1 << 32, size=int(rng.integers(0, unknowns + 4)), dtype=np.uint64)
            packets = [lt_packet(int(packet_id), intermediates) for packet_id in ids]
            dense = np.zeros((aux.m + len(packets), unknowns), dtype=np.uint8)
            for j, relation in enumerate(aux.relations):
                dense[j, list(relation)] = 1
                dense[j, n + j] = 1
            for row, packet in enumerate(packets, start=aux.m):
                dense[row, packet_indices(packet.id, unknowns)] = 1
            if rank_oracle(dense) == unknowns:
                assert np.array_equal(decode_blocks(packets, n, block_size=4), pool.blocks), trial
                solved += 1
            else:
                with pytest.raises(RankDeficientException):
                    decode_blocks(packets, n, block_size=4)
                failed += 1
        assert solved and failed


class TestEliminationState:
    def test_initial_state_not_decodable(self):
        for n in (1, 5, 22):
            state = EliminationState(aux_structure(n))
            assert state.rank == aux_structure(n).m
            assert not state.decodable

    def test_incremental_rank_matches_batch(self, random_payload):
        pool = segment(random_payload(230), 46)
        aux = aux_structure(pool.n)
        intermediates = build_intermediates(pool, aux)
        state = EliminationState(aux)
        rows = constraint_rows(aux)
        verdicts = []
        for packet_id in range(aux.intermediate_count + 5):
            packet = lt_packet(packet_id, intermediates)
            decodable, state = decodability_check(state, packet)
            rows.append(indices_to_row(packet_indices(packet_id, aux.intermediate_count)))
            assert state.rank == gf2_rank(rows, aux.intermediate_count)
            verdicts.append(decodable)
        # monotone once reached
        assert verdicts == sorted(verdicts)

    def test_dependent_row_not_added(self):
        state = EliminationState(aux_structure(3))
        row = 1 << 0 | 1 << 1
        assert state.insert_row(row) is True
        assert state.insert_row(row) is False
