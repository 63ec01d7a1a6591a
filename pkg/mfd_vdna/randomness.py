# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""Module for deterministic pseudo-random machinery shared by encoder and decoder."""

from dataclasses import dataclass
from typing import Dict, List, Tuple

from mfd_vdna.exceptions import CodecConfigException

MASK64 = (1 << 64) - 1
SEED_MIXER = 0x9E3779B97F4A7C15
HEADER_SEED_MIXER = 0xC2B2AE3D27D4EB4F
PAYLOAD_SEED_MIXER = 0x165667B19E3779F9
XORSHIFT_STAR_MULTIPLIER = 2685821657736338717
DEGREE_RESOLUTION = 1 << 20
HEADER_MASK_SIZE = 6


@dataclass(frozen=True)
class PrngState:
    """State of xorshift* generator, never zero."""

    state: int

    def __post_init__(self):
        if not 0 < self.state <= MASK64:
            raise CodecConfigException(f"Generator state must be a nonzero 64-bit value, got {self.state:#x}.")


@dataclass(frozen=True)
class DegreeDistribution:
    """
    Cumulative table mapping 20-bit draws to degrees.

    thresholds: Pairs (cumulative bound, degree), bounds strictly increasing up to 2^20
    """

    thresholds: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        bounds = [bound for bound, _ in self.thresholds]
        if not bounds or bounds[-1] != DEGREE_RESOLUTION:
            raise CodecConfigException(f"Last degree bound must equal {DEGREE_RESOLUTION}.")
        if any(later <= earlier for earlier, later in zip(bounds, bounds[1:])) or bounds[0] < 1:
            raise CodecConfigException("Degree bounds must be strictly increasing and positive.")
        if any(degree < 1 for _, degree in self.thresholds):
            raise CodecConfigException("Degrees must be positive.")

    def degree_for(self, draw: int) -> int:
        """Get degree of first threshold whose bound exceeds draw."""
        for bound, degree in self.thresholds:
            if bound > draw:
                return degree
        return self.thresholds[-1][1]


# degree table of the RU10 scheme (RFC 5053)
RAPTOR_DISTRIBUTION = DegreeDistribution(
    thresholds=(
        (10241, 1),
        (491582, 2),
        (712794, 3),
        (831695, 4),
        (948446, 10),
        (1032189, 11),
        (1048576, 40),
    )
)


def prng_init(seed: int) -> PrngState:
    """
    Seed generator.

    :param seed: 64-bit seed
    :return: Initial state, the mixer constant itself when mixing cancels out
    """
    state = (seed ^ SEED_MIXER) & MASK64
    return PrngState(state or SEED_MIXER)


def prng_next(state: PrngState) -> Tuple[int, PrngState]:
    """
    Advance xorshift* generator.

    :param state: Current state
    :return: 64-bit output and next state
    """
    s = state.state
    s ^= s >> 12
    s ^= (s << 25) & MASK64
    s ^= s >> 27
    return (s * XORSHIFT_STAR_MULTIPLIER) & MASK64, PrngState(s)


def sample_degree(
    state: PrngState, distribution: DegreeDistribution = RAPTOR_DISTRIBUTION, cap: int = 0
) -> Tuple[int, PrngState]:
    """
    Draw packet degree.

    :param state: Current state
    :param distribution: Degree table known to encoder and decoder
    :param cap: Upper limit for degree (number of intermediate blocks), no limit when 0
    :return: Degree and next state
    """
    value, state = prng_next(state)
    degree = distribution.degree_for(value % DEGREE_RESOLUTION)
    if cap:
        degree = min(degree, cap)
    return degree, state


def sample_indices(state: PrngState, degree: int, count: int) -> Tuple[List[int], PrngState]:
    """
    Select distinct indices with partial Fisher-Yates shuffle.

    :param state: Current state
    :param degree: Number of indices to select
    :param count: Size of index range 0..count-1
    :return: Ascending indices and next state
    :raises CodecConfigException: when degree is not in 1..count
    """
    if not 1 <= degree <= count:
        raise CodecConfigException(f"Cannot select {degree} distinct indices out of {count}.")
    swapped: Dict[int, int] = {}
    selected = []
    for i in range(degree):
        value, state = prng_next(state)
        j = i + value % (count - i)
        selected.append(swapped.get(j, j))
        swapped[j] = swapped.get(i, i)
    return sorted(selected), state


def header_mask(s_param: int) -> bytes:
    """
    Get mask XORed with first 6 header bytes.

    :param s_param: S parameter 0..255
    :return: Low 48 bits of one generator output, little-endian
    :raises CodecConfigException: when S does not fit in a byte
    """
    if not 0 <= s_param <= 0xFF:
        raise CodecConfigException(f"S parameter {s_param} does not fit in a byte.")
    value, _ = prng_next(PrngState(s_param ^ HEADER_SEED_MIXER))
    return value.to_bytes(8, "little")[:HEADER_MASK_SIZE]


def payload_keystream(packet_id: int, length: int) -> bytes:
    """
    Get keystream XORed with packet payload before mapping to nucleotides.

    :param packet_id: 32-bit packet id used as seed
    :param length: Number of bytes
    :return: Concatenated little-endian generator outputs, cut to length
    """
    state = PrngState((packet_id ^ PAYLOAD_SEED_MIXER) & MASK64 or PAYLOAD_SEED_MIXER)
    chunks = []
    for _ in range(-(-length // 8)):
        value, state = prng_next(state)
        chunks.append(value.to_bytes(8, "little"))
    return b"".join(chunks)[:length]
