# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""Module orchestrating payload to FASTA pool encoding and decoding."""

import logging
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal
from math import ceil
from typing import Dict, List, Optional, Sequence, Tuple, Union

from mfd_common_libs import log_levels, add_logging_level

from mfd_vdna.constraints import ConstraintPolicy, is_compliant
from mfd_vdna.data_structures import HeaderFields, Mode, Oligo, Packet, SourceBlockPool
from mfd_vdna.exceptions import (
    CodecConfigException,
    CorruptedHeaderException,
    EncodeFailureException,
    HeaderUnencodableException,
    MalformedOligoException,
    NotEnoughOligosException,
    RankDeficientException,
)
from mfd_vdna.oligo import (
    attach_header,
    build_header_segment,
    detect_and_parse_header,
    oligo_to_packet,
    packet_to_oligo,
)
from mfd_vdna.randomness import RAPTOR_DISTRIBUTION, DegreeDistribution
from mfd_vdna.raptor import (
    DEFAULT_BLOCK_SIZE,
    MAX_BLOCK_SIZE,
    EliminationState,
    aux_structure,
    build_intermediates,
    decode_blocks,
    lt_packet,
    segment,
)

logger = logging.getLogger(__name__)
add_logging_level(level_name="MODULE_DEBUG", level_value=log_levels.MODULE_DEBUG)

DEFAULT_OVERHEAD = 0.015
ID_SPACE = 1 << 32
DEFAULT_STALL_LIMIT = 1 << 16


@dataclass(frozen=True)
class FixedOverhead:
    """Emit ceil(n * (1 + theta)) valid oligos, extended until pool is decodable."""

    theta: float = DEFAULT_OVERHEAD

    def __post_init__(self):
        if self.theta < 0:
            raise CodecConfigException(f"Overhead must not be negative, got {self.theta}.")

    def target(self, n: int) -> int:
        """Get number of valid oligos to emit for n source blocks."""
        # decimal keeps 1000 * 1.015 at exactly 1015
        return ceil(Decimal(n) * (1 + Decimal(str(self.theta))))


@dataclass(frozen=True)
class PseudoDecoder:
    """Stop emitting at first packet making pool decodable."""


StoppingPolicy = Union[FixedOverhead, PseudoDecoder]


@dataclass
class EncodeConfig:
    """
    Configuration of encoding.

    block_size: Bytes per source block
    policy: Stopping policy
    constraint_policy: Constraints checked on every candidate oligo and on header segment
    mode: Mode byte written to header
    max_trial_ids: Number of packet ids tried before giving up
    max_stalled_ids: Number of consecutive packet ids tried without progress before giving up
    distribution: Degree distribution
    """

    block_size: int = DEFAULT_BLOCK_SIZE
    policy: StoppingPolicy = field(default_factory=FixedOverhead)
    constraint_policy: ConstraintPolicy = field(default_factory=ConstraintPolicy.encoder)
    mode: int = Mode.ENCODING
    max_trial_ids: int = ID_SPACE
    max_stalled_ids: int = DEFAULT_STALL_LIMIT
    distribution: DegreeDistribution = RAPTOR_DISTRIBUTION

    def __post_init__(self):
        if not 1 <= self.block_size <= MAX_BLOCK_SIZE:
            raise CodecConfigException(f"Block size must be in 1..{MAX_BLOCK_SIZE}, got {self.block_size}.")
        if self.mode not in set(Mode):
            raise CodecConfigException(f"Unsupported mode byte: {self.mode:#04x}.")
        if not 1 <= self.max_trial_ids <= ID_SPACE:
            raise CodecConfigException(f"Trial id bound must be in 1..{ID_SPACE}, got {self.max_trial_ids}.")
        if self.max_stalled_ids < 1:
            raise CodecConfigException(f"Stall limit must be positive, got {self.max_stalled_ids}.")


@dataclass(frozen=True)
class EncodeStats:
    """Statistics of encoding run."""

    n: int
    m: int
    emitted_count: int
    discarded_count: int
    target_count: Optional[int]
    extended: bool
    s_param: int
    total_nucleotides: int
    bits_per_nucleotide: float

    @property
    def achieved_overhead(self) -> float:
        """Fraction of payload oligos beyond n."""
        return self.emitted_count / self.n - 1


@dataclass(frozen=True)
class EncodeResult:
    """Encoded pool, header-bearing oligo first."""

    oligos: List[Oligo]
    ids: List[int]
    stats: EncodeStats

    @property
    def sequences(self) -> List[str]:
        """Get plain sequences of pool."""
        return [oligo.sequence for oligo in self.oligos]


@dataclass(frozen=True)
class DecodeResult:
    """Decoded payload."""

    data: bytes
    mode: int
    unknowns: int
    skipped_oligos: int = 0


@dataclass(frozen=True)
class PoolStatistics:
    """Size figures of oligo pool."""

    length_histogram: Dict[int, int]
    total_nucleotides: int
    bits_per_nucleotide: Optional[float] = None


def pool_statistics(sequences: Sequence[str], payload_bytes: Optional[int] = None) -> PoolStatistics:
    """
    Compute size figures of pool.

    :param sequences: Pool
    :param payload_bytes: Size of encoded payload, information density is computed when given
    :return: Length histogram, total nucleotides and bits per nucleotide
    """
    total = sum(len(seq) for seq in sequences)
    density = 8 * payload_bytes / total if payload_bytes and total else None
    return PoolStatistics(
        length_histogram=dict(sorted(Counter(len(seq) for seq in sequences).items())),
        total_nucleotides=total,
        bits_per_nucleotide=density,
    )


def _attach_compliant_header(
    kept: List[Oligo], ids: List[int], fields: HeaderFields, segment_: str, s_param: int, policy: ConstraintPolicy
) -> int:
    """
    Make one kept oligo header-bearing and move it to front of pool.

    GC content and tandem repeats are checked across the joint, not only within each part. Every S value is tried
    on first kept oligo before next one is used as carrier.

    :param kept: Kept oligos, updated in place
    :param ids: Trial ids of kept oligos, updated in place
    :param fields: Header fields
    :param segment_: First compliant header segment
    :param s_param: S of first compliant header segment
    :param policy: Constraints for joined strand
    :return: S used
    :raises HeaderUnencodableException: when no carrier and S value give compliant strand
    """
    first_segment, first_s = segment_, s_param
    for position, carrier in enumerate(kept):
        segment_, s_param = first_segment, first_s
        while True:
            bearing = attach_header(carrier, segment_)
            if is_compliant(bearing.sequence, policy):
                if position:
                    logger.log(
                        log_levels.MODULE_DEBUG, msg=f"Header carried by oligo {position} (id {ids[position]})"
                    )
                kept.pop(position)
                kept.insert(0, bearing)
                ids.insert(0, ids.pop(position))
                return s_param
            logger.log(log_levels.MODULE_DEBUG, msg=f"Header-bearing oligo rejected with S={s_param}, retrying")
            try:
                segment_, s_param = build_header_segment(fields, policy, start_s=s_param + 1)
            except HeaderUnencodableException:
                break
    raise HeaderUnencodableException(
        f"No S value gives compliant header-bearing oligo with any of {len(kept)} kept oligos for {fields}."
    )


def encode_stream(data: bytes, cfg: Optional[EncodeConfig] = None) -> EncodeResult:
    """
    Encode payload into constraint compliant oligo pool.

    Trial ids are used sequentially from 0; a candidate failing constraints is discarded and its id never reused.

    :param data: Payload
    :param cfg: Encoding configuration, defaults when not given
    :return: Pool with header-bearing oligo first and statistics
    :raises EmptyPayloadException: on empty payload
    :raises EncodeFailureException: when trial ids are exhausted or rank stops growing
    :raises HeaderUnencodableException: when header-bearing oligo cannot be made compliant
    """
    cfg = cfg or EncodeConfig()
    pool = segment(data, cfg.block_size)
    aux = aux_structure(pool.n)
    intermediates = build_intermediates(pool, aux)
    fields = HeaderFields(n=pool.n, last_block_len=pool.last_block_len, mode=cfg.mode)
    header_segment, s_param = build_header_segment(fields, cfg.constraint_policy)

    target = cfg.policy.target(pool.n) if isinstance(cfg.policy, FixedOverhead) else None
    state = EliminationState(aux, cfg.distribution)
    kept: List[Oligo] = []
    ids: List[int] = []
    discarded = 0
    logger.log(
        log_levels.MODULE_DEBUG,
        msg=f"Encoding {len(data)} bytes: n={pool.n}, m={aux.m}, policy={cfg.policy}, target={target}",
    )
    stalled = 0
    for trial_id in range(cfg.max_trial_ids):
        packet = lt_packet(trial_id, intermediates, cfg.distribution)
        oligo = packet_to_oligo(packet)
        if is_compliant(oligo.sequence, cfg.constraint_policy):
            kept.append(oligo)
            ids.append(trial_id)
            gained = state.insert_packet(packet)
            decodable = state.decodable
            if decodable and (target is None or len(kept) >= target):
                break
            stalled = 0 if gained or decodable else stalled + 1
        else:
            discarded += 1
            stalled += 1
        if stalled >= cfg.max_stalled_ids:
            raise EncodeFailureException(
                f"No progress for {stalled} trial ids up to id {trial_id}: {len(kept)} valid oligos, "
                f"rank {state.rank}/{state.unknowns}."
            )
    else:
        raise EncodeFailureException(
            f"{cfg.max_trial_ids} trial ids exhausted with {len(kept)} valid oligos, "
            f"rank {state.rank}/{state.unknowns}."
        )

    extended = target is not None and len(kept) > target
    if extended:
        logger.warning(f"Pool of {target} oligos was not decodable, extended to {len(kept)} oligos.")
    s_param = _attach_compliant_header(kept, ids, fields, header_segment, s_param, cfg.constraint_policy)
    stats = pool_statistics([oligo.sequence for oligo in kept], len(data))
    result = EncodeResult(
        oligos=kept,
        ids=ids,
        stats=EncodeStats(
            n=pool.n,
            m=aux.m,
            emitted_count=len(kept),
            discarded_count=discarded,
            target_count=target,
            extended=extended,
            s_param=s_param,
            total_nucleotides=stats.total_nucleotides,
            bits_per_nucleotide=stats.bits_per_nucleotide,
        ),
    )
    logger.info(
        f"Encoded {len(data)} bytes into {len(kept)} oligos ({discarded} candidates discarded, "
        f"overhead {result.stats.achieved_overhead:.2%})."
    )
    return result


def decode_stream(
    oligos: Sequence[Union[str, Oligo]],
    block_size: int = DEFAULT_BLOCK_SIZE,
    strict: bool = True,
    distribution: DegreeDistribution = RAPTOR_DISTRIBUTION,
) -> DecodeResult:
    """
    Decode oligo pool into payload.

    :param oligos: Pool in any order, header-bearing oligo included
    :param block_size: Block size used at encoding
    :param strict: Fail on malformed oligo, otherwise skip it
    :param distribution: Degree distribution used at encoding
    :return: Payload and mode byte
    :raises HeaderException: when header is missing, ambiguous or corrupted
    :raises MalformedOligoException: on malformed oligo in strict mode
    :raises NotEnoughOligosException: when pool does not determine every block
    """
    sequences = [oligo.sequence if isinstance(oligo, Oligo) else oligo for oligo in oligos]
    fields, stripped = detect_and_parse_header(sequences, block_size)
    if fields.last_block_len > block_size:
        raise CorruptedHeaderException(
            f"Header last block length {fields.last_block_len} exceeds block size {block_size}."
        )
    packets: List[Packet] = []
    skipped = 0
    for index, seq in enumerate(stripped):
        try:
            packets.append(oligo_to_packet(seq, block_size))
        except MalformedOligoException as e:
            if strict:
                raise MalformedOligoException(f"Oligo {index}: {e}") from e
            skipped += 1
    if skipped:
        logger.warning(f"{skipped} malformed oligos skipped.")
    try:
        blocks = decode_blocks(packets, fields.n, block_size, distribution)
    except RankDeficientException as e:
        raise NotEnoughOligosException(
            e.rank,
            e.unknowns,
            f"Not enough oligos: rank {e.rank} of {e.unknowns} from {len(packets)} packets.",
        ) from e
    data = SourceBlockPool(blocks=blocks, last_block_len=fields.last_block_len).reassemble()
    logger.log(log_levels.MODULE_DEBUG, msg=f"Decoded {len(data)} bytes from {len(packets)} packets")
    return DecodeResult(
        data=data,
        mode=fields.mode,
        unknowns=aux_structure(fields.n).intermediate_count,
        skipped_oligos=skipped,
    )
