# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""Module for erasure channel simulation over oligo pools."""

import logging
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence, Tuple, Union

from mfd_common_libs import log_levels, add_logging_level

from mfd_vdna.exceptions import (
    ErasurePolicyException,
    HeaderException,
    HeaderMissingException,
    NotEnoughOligosException,
)
from mfd_vdna.oligo import payload_oligo_length
from mfd_vdna.pipeline import decode_stream
from mfd_vdna.randomness import MASK64, prng_init, prng_next, sample_indices
from mfd_vdna.raptor import DEFAULT_BLOCK_SIZE

logger = logging.getLogger(__name__)
add_logging_level(level_name="MODULE_DEBUG", level_value=log_levels.MODULE_DEBUG)


@dataclass(frozen=True)
class DropCount:
    """Drop exactly k eligible oligos."""

    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ErasurePolicyException(f"Drop count must not be negative, got {self.k}.")


@dataclass(frozen=True)
class DropProbability:
    """Drop every eligible oligo independently with probability p."""

    p: float

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ErasurePolicyException(f"Drop probability must be in [0, 1], got {self.p}.")


@dataclass(frozen=True)
class ErasurePolicy:
    """
    Configuration of erasure channel.

    kind: Drop rule
    protect_header: Never drop header-bearing oligo
    seed: Seed of channel randomness
    block_size: Block size of pool, identifies header-bearing oligo by length
    """

    kind: Union[DropCount, DropProbability]
    protect_header: bool = True
    seed: int = 0
    block_size: int = DEFAULT_BLOCK_SIZE


@dataclass(frozen=True)
class TrialSummary:
    """Outcome of decoding survivors of one channel trial."""

    pool_size: int
    dropped: int
    header_protected: bool
    outcome: str
    rank: Optional[int] = None
    unknowns: Optional[int] = None

    def to_dict(self) -> dict:
        """Get structured form of summary."""
        return asdict(self)


def erase(oligos: Sequence[str], policy: ErasurePolicy) -> List[str]:
    """
    Drop oligos from pool.

    :param oligos: Pool
    :param policy: Erasure policy
    :return: Survivors in original order
    :raises ErasurePolicyException: when more oligos should be dropped than are eligible
    """
    payload_length = payload_oligo_length(policy.block_size)
    eligible = [
        index for index, seq in enumerate(oligos) if not (policy.protect_header and len(seq) > payload_length)
    ]
    state = prng_init(policy.seed)
    if isinstance(policy.kind, DropCount):
        if policy.kind.k > len(eligible):
            raise ErasurePolicyException(f"Cannot drop {policy.kind.k} oligos, only {len(eligible)} eligible.")
        chosen = sample_indices(state, policy.kind.k, len(eligible))[0] if policy.kind.k else []
        dropped = {eligible[position] for position in chosen}
    else:
        dropped = set()
        for index in eligible:
            value, state = prng_next(state)
            if value / (MASK64 + 1) < policy.kind.p:
                dropped.add(index)
    logger.log(log_levels.MODULE_DEBUG, msg=f"Channel dropped {len(dropped)} of {len(oligos)} oligos")
    return [seq for index, seq in enumerate(oligos) if index not in dropped]


def run_trial(oligos: Sequence[str], policy: ErasurePolicy) -> Tuple[List[str], TrialSummary]:
    """
    Pass pool through channel and try to decode survivors.

    :param oligos: Pool
    :param policy: Erasure policy
    :return: Survivors and trial summary
    """
    survivors = erase(oligos, policy)
    summary = dict(
        pool_size=len(oligos),
        dropped=len(oligos) - len(survivors),
        header_protected=policy.protect_header,
    )
    try:
        result = decode_stream(survivors, block_size=policy.block_size, strict=False)
    except HeaderMissingException:
        return survivors, TrialSummary(**summary, outcome="header-missing")
    except HeaderException:
        return survivors, TrialSummary(**summary, outcome="header-error")
    except NotEnoughOligosException as e:
        return survivors, TrialSummary(**summary, outcome="not-enough-oligos", rank=e.rank, unknowns=e.unknowns)
    return survivors, TrialSummary(**summary, outcome="success", rank=result.unknowns, unknowns=result.unknowns)
