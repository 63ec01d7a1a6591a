# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""Module for byte to 5-nucleotide codebook used by header segment."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from types import MappingProxyType
from typing import Iterable, List, Mapping, Optional, Tuple

from mfd_common_libs import log_levels, add_logging_level

from mfd_vdna.constraints import NUCLEOTIDES
from mfd_vdna.exceptions import CodebookConstructionException, UnknownCodewordException

logger = logging.getLogger(__name__)
add_logging_level(level_name="MODULE_DEBUG", level_value=log_levels.MODULE_DEBUG)

CODEWORD_LENGTH = 5
CODEBOOK_SIZE = 256


@dataclass(frozen=True)
class Codebook:
    """Bijection between bytes and 5-nt codewords."""

    encode_table: Tuple[str, ...]
    decode_table: Mapping[str, int]


def is_codeword_candidate(word: str) -> bool:
    """
    Check codeword rules.

    GC count of 2 or 3, second nucleotide differs from first, last three not identical.
    Together they keep every run inside a codeword and across any junction at 3 or less.

    :param word: 5-nt string
    :return: True when word may be used as codeword
    """
    gc_count = word.count("G") + word.count("C")
    return gc_count in (2, 3) and word[0] != word[1] and not word[2] == word[3] == word[4]


def build_codebook() -> Codebook:
    """
    Enumerate 5-nt words in A<C<G<T order and keep first 256 valid ones.

    :return: Codebook assigning survivors to bytes 0..255 in enumeration order
    :raises CodebookConstructionException: when fewer than 256 words qualify
    """
    words = []
    for letters in product(NUCLEOTIDES, repeat=CODEWORD_LENGTH):
        word = "".join(letters)
        if is_codeword_candidate(word):
            words.append(word)
            if len(words) == CODEBOOK_SIZE:
                break
    if len(words) < CODEBOOK_SIZE:
        raise CodebookConstructionException(f"Only {len(words)} codewords qualify, {CODEBOOK_SIZE} required.")
    logger.log(log_levels.MODULE_DEBUG, msg=f"Codebook built, last codeword: {words[-1]}")
    return Codebook(
        encode_table=tuple(words),
        decode_table=MappingProxyType({word: value for value, word in enumerate(words)}),
    )


@lru_cache(maxsize=1)
def default_codebook() -> Codebook:
    """Get shared codebook instance."""
    return build_codebook()


def encode_byte(value: int, codebook: Optional[Codebook] = None) -> str:
    """
    Get codeword of byte.

    :param value: Byte value 0..255
    :param codebook: Codebook to use, shared one when not given
    :return: 5-nt codeword
    """
    return (codebook or default_codebook()).encode_table[value]


def decode_codeword(word: str, codebook: Optional[Codebook] = None) -> int:
    """
    Get byte of codeword.

    :param word: 5-nt codeword
    :param codebook: Codebook to use, shared one when not given
    :return: Byte value
    :raises UnknownCodewordException: when word is not in codebook
    """
    try:
        return (codebook or default_codebook()).decode_table[word]
    except KeyError:
        raise UnknownCodewordException(f"{word!r} is not a codeword.") from None


def encode_bytes(data: Iterable[int], codebook: Optional[Codebook] = None) -> str:
    """Encode bytes as concatenated codewords."""
    return "".join(encode_byte(value, codebook) for value in data)


def decode_words(seq: str, codebook: Optional[Codebook] = None) -> bytes:
    """
    Decode concatenated codewords.

    :param seq: Sequence with length multiple of 5
    :param codebook: Codebook to use, shared one when not given
    :return: Decoded bytes
    :raises UnknownCodewordException: on unknown word or truncated sequence
    """
    if len(seq) % CODEWORD_LENGTH:
        raise UnknownCodewordException(f"Sequence length {len(seq)} is not a multiple of {CODEWORD_LENGTH}.")
    return bytes(
        decode_codeword(seq[i : i + CODEWORD_LENGTH], codebook) for i in range(0, len(seq), CODEWORD_LENGTH)
    )


def dump_codebook(codebook: Optional[Codebook] = None) -> List[str]:
    """Get codebook as `byte_hex<TAB>codeword` lines."""
    return [f"{value:02x}\t{word}" for value, word in enumerate((codebook or default_codebook()).encode_table)]
