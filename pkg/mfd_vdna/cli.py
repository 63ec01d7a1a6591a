# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""
Command line front end of codec.

Exit codes:
    0 success
    1 other codec failure (e.g. trial ids exhausted)
    2 usage or configuration error
    3 constraint violations found by verify
    4 not enough oligos to decode
    5 header missing, ambiguous, corrupted or unencodable
    6 external tool missing, unconfigured or failing
    7 I/O error, FASTA parse error or malformed oligo
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from tempfile import TemporaryDirectory
from typing import Callable, List, Optional, Sequence, Tuple, Type

from mfd_common_libs import log_levels, add_logging_level
from mfd_connect import LocalConnection

from mfd_vdna.channel_sim import DropCount, DropProbability, ErasurePolicy, run_trial
from mfd_vdna.codebook import dump_codebook
from mfd_vdna.constraints import ConstraintPolicy, validate_oligo
from mfd_vdna.data_structures import Mode
from mfd_vdna.exceptions import (
    CodecConfigException,
    DNACodecException,
    ErasurePolicyException,
    ExternalToolException,
    FastaParseException,
    HeaderException,
    MalformedOligoException,
    MalformedSequenceException,
    NotEnoughOligosException,
    ToolNotAvailable,
    ToolNotConfigured,
)
from mfd_vdna.fasta_io import read_fasta, write_fasta
from mfd_vdna.oligo import ID_MASK, header_oligo_length, payload_oligo_length
from mfd_vdna.pipeline import (
    DEFAULT_OVERHEAD,
    EncodeConfig,
    EncodeResult,
    FixedOverhead,
    PseudoDecoder,
    decode_stream,
    encode_stream,
    pool_statistics,
)
from mfd_vdna.randomness import (
    HEADER_SEED_MIXER,
    PAYLOAD_SEED_MIXER,
    RAPTOR_DISTRIBUTION,
    SEED_MIXER,
    XORSHIFT_STAR_MULTIPLIER,
)
from mfd_vdna.raptor import DEFAULT_BLOCK_SIZE
from mfd_vdna.tools import CjxlTool, DjxlTool, ToolConfig

logger = logging.getLogger(__name__)
add_logging_level(level_name="MODULE_DEBUG", level_value=log_levels.MODULE_DEBUG)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_VIOLATIONS = 3
EXIT_NOT_ENOUGH_OLIGOS = 4
EXIT_HEADER = 5
EXIT_EXTERNAL_TOOL = 6
EXIT_IO = 7

# first matching entry wins
EXIT_CODES: Tuple[Tuple[Tuple[Type[BaseException], ...], int], ...] = (
    ((NotEnoughOligosException,), EXIT_NOT_ENOUGH_OLIGOS),
    ((HeaderException,), EXIT_HEADER),
    ((ExternalToolException, ToolNotAvailable, ToolNotConfigured), EXIT_EXTERNAL_TOOL),
    ((FastaParseException, MalformedOligoException, MalformedSequenceException, OSError), EXIT_IO),
    ((CodecConfigException, ErasurePolicyException), EXIT_USAGE),
    ((DNACodecException,), EXIT_FAILURE),
)


def exit_code_for(error: BaseException) -> int:
    """Get exit code documented for error."""
    for error_types, code in EXIT_CODES:
        if isinstance(error, error_types):
            return code
    return EXIT_FAILURE


def _hex_byte(value: str) -> int:
    try:
        return int(value, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid hex byte: {value!r}") from None


def _add_encode_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--block-size", type=int, default=DEFAULT_BLOCK_SIZE, help="Bytes per source block")
    stopping = parser.add_mutually_exclusive_group()
    stopping.add_argument(
        "--overhead", type=float, default=DEFAULT_OVERHEAD, help="Fraction of oligos emitted beyond block count"
    )
    stopping.add_argument(
        "--pseudo-decoder", action="store_true", help="Stop at first oligo making pool decodable"
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mfd-vdna",
        description="Encode binary data and images into DNA oligo pools and back.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Enable debug logging")
    parser.add_argument("--config", type=Path, help="File with key=value tool configuration")
    commands = parser.add_subparsers(dest="command", required=True)

    encode_bytes = commands.add_parser("encode-bytes", help="Encode arbitrary file")
    encode_bytes.add_argument("input", type=Path)
    encode_bytes.add_argument("output", type=Path)
    _add_encode_options(encode_bytes)
    encode_bytes.add_argument("--mode-byte", type=_hex_byte, default=Mode.ENCODING, help="Mode byte in hex")
    encode_bytes.set_defaults(handler=_encode_bytes)

    encode_image = commands.add_parser("encode-image", help="Compress image to JPEG XL and encode it")
    encode_image.add_argument("input", type=Path)
    encode_image.add_argument("output", type=Path)
    encode_image.add_argument("-q", "--quality", type=int, required=True, help="Compressor quality")
    _add_encode_options(encode_image)
    encode_image.set_defaults(handler=_encode_image)

    transcode = commands.add_parser("transcode-jpeg", help="Losslessly recompress JPEG and encode it")
    transcode.add_argument("input", type=Path)
    transcode.add_argument("output", type=Path)
    _add_encode_options(transcode)
    transcode.set_defaults(handler=_transcode_jpeg)

    decode = commands.add_parser("decode", help="Decode FASTA pool")
    decode.add_argument("input", type=Path)
    decode.add_argument("output", type=Path)
    decode.add_argument("--render", action="store_true", help="Decompress decoded bitstream to image")
    decode.add_argument("--block-size", type=int, default=DEFAULT_BLOCK_SIZE)
    decode.add_argument("--tolerant", action="store_true", help="Skip malformed oligos")
    decode.set_defaults(handler=_decode)

    verifier = ConstraintPolicy.verifier()
    verify = commands.add_parser("verify", help="Check FASTA pool against constraints")
    verify.add_argument("input", type=Path)
    verify.add_argument("--gc-min", type=float, default=verifier.gc_min)
    verify.add_argument("--gc-max", type=float, default=verifier.gc_max)
    verify.add_argument("--max-run", type=int, default=verifier.max_homopolymer_run)
    verify.add_argument("--block-size", type=int, default=DEFAULT_BLOCK_SIZE)
    verify.add_argument("--json", action="store_true", help="Print structured report")
    verify.set_defaults(handler=_verify)

    simulate = commands.add_parser("simulate", help="Pass FASTA pool through erasure channel")
    simulate.add_argument("input", type=Path)
    simulate.add_argument("output", type=Path)
    drop = simulate.add_mutually_exclusive_group(required=True)
    drop.add_argument("--drop-count", type=int, help="Number of oligos to drop")
    drop.add_argument("--drop-prob", type=float, help="Drop probability of every oligo")
    simulate.add_argument("--seed", type=int, required=True)
    simulate.add_argument("--no-protect-header", action="store_true", help="Allow dropping header-bearing oligo")
    simulate.add_argument("--block-size", type=int, default=DEFAULT_BLOCK_SIZE)
    simulate.set_defaults(handler=_simulate)

    params = commands.add_parser("dump-params", help="Print interoperability constants")
    params.add_argument("--block-size", type=int, default=DEFAULT_BLOCK_SIZE)
    params.set_defaults(handler=_dump_params)

    codebook = commands.add_parser("dump-codebook", help="Print header codebook")
    codebook.set_defaults(handler=_dump_codebook)
    return parser


def _encode_config(args: argparse.Namespace, mode: int) -> EncodeConfig:
    policy = PseudoDecoder() if args.pseudo_decoder else FixedOverhead(args.overhead)
    return EncodeConfig(block_size=args.block_size, policy=policy, mode=mode)


def _encode_and_write(data: bytes, args: argparse.Namespace, mode: int) -> int:
    result = encode_stream(data, _encode_config(args, mode))
    write_fasta(result.oligos, args.output)
    _print_encode_stats(result)
    return EXIT_OK


def _print_encode_stats(result: EncodeResult) -> None:
    stats = result.stats
    print(f"source blocks: {stats.n}")
    print(f"oligos: {stats.emitted_count} (target {stats.target_count}, extended {stats.extended})")
    print(f"discarded candidates: {stats.discarded_count}")
    print(f"total nucleotides: {stats.total_nucleotides}")
    print(f"bits per nucleotide: {stats.bits_per_nucleotide:.4f}")


def _tool_config(args: argparse.Namespace) -> ToolConfig:
    return ToolConfig.load(args.config)


def _require_template(template: str, key: str) -> None:
    if not template.strip():
        raise ToolNotConfigured(f"{key} is not configured, set it in config file.")


def _encode_bytes(args: argparse.Namespace) -> int:
    return _encode_and_write(args.input.read_bytes(), args, args.mode_byte)


def _encode_image(args: argparse.Namespace) -> int:
    config = _tool_config(args)
    _require_template(config.compressor_cmd, "compressor_cmd")
    cjxl = CjxlTool(connection=LocalConnection(), config=config)
    with TemporaryDirectory(prefix="vdna_") as workdir:
        bitstream = cjxl.compress(args.input, Path(workdir, "image.jxl"), args.quality)
        data = bitstream.read_bytes()
    return _encode_and_write(data, args, Mode.ENCODING)


def _transcode_jpeg(args: argparse.Namespace) -> int:
    config = _tool_config(args)
    _require_template(config.transcoder_cmd, "transcoder_cmd")
    cjxl = CjxlTool(connection=LocalConnection(), config=config)
    with TemporaryDirectory(prefix="vdna_") as workdir:
        bitstream = cjxl.transcode(args.input, Path(workdir, "image.jxl"))
        data = bitstream.read_bytes()
    return _encode_and_write(data, args, Mode.TRANSCODING)


def _decode(args: argparse.Namespace) -> int:
    config = _tool_config(args) if args.render else None
    if config:
        _require_template(config.decompressor_cmd, "decompressor_cmd")
    records = read_fasta(args.input)
    result = decode_stream(
        [record.sequence for record in records], block_size=args.block_size, strict=not args.tolerant
    )
    if not args.render:
        args.output.write_bytes(result.data)
        print(f"decoded {len(result.data)} bytes, mode {result.mode:#04x}")
        return EXIT_OK
    djxl = DjxlTool(connection=LocalConnection(), config=config)
    with TemporaryDirectory(prefix="vdna_") as workdir:
        bitstream = Path(workdir, "image.jxl")
        bitstream.write_bytes(result.data)
        djxl.decompress(bitstream, args.output)
    print(f"decoded {len(result.data)} bytes, mode {result.mode:#04x}, rendered {args.output}")
    return EXIT_OK


def _verify(args: argparse.Namespace) -> int:
    policy = ConstraintPolicy(max_homopolymer_run=args.max_run, gc_min=args.gc_min, gc_max=args.gc_max)
    records = read_fasta(args.input)
    payload_length = payload_oligo_length(args.block_size)
    reports = []
    for record in records:
        expected = header_oligo_length(args.block_size) if len(record.sequence) > payload_length else payload_length
        reports.append((record, validate_oligo(record.sequence, policy, expected)))
    violations = sum(len(report.violations) for _, report in reports)
    histogram = pool_statistics([record.sequence for record in records]).length_histogram
    if args.json:
        structured = {
            "records": [
                {"record": record.description, "length": len(record.sequence), **report.to_dict()}
                for record, report in reports
            ],
            "violation_count": violations,
            "length_histogram": {str(length): count for length, count in histogram.items()},
        }
        print(json.dumps(structured, indent=2))
    else:
        for record, report in reports:
            for line in report.to_lines(record.description):
                print(line)
        lengths = ", ".join(f"{length} nt: {count}" for length, count in histogram.items())
        print(f"{len(records)} records, {violations} violations, lengths {lengths}")
    return EXIT_VIOLATIONS if violations else EXIT_OK


def _simulate(args: argparse.Namespace) -> int:
    kind = DropCount(args.drop_count) if args.drop_count is not None else DropProbability(args.drop_prob)
    policy = ErasurePolicy(
        kind=kind, protect_header=not args.no_protect_header, seed=args.seed, block_size=args.block_size
    )
    records = read_fasta(args.input)
    survivors, summary = run_trial([record.sequence for record in records], policy)
    if survivors:
        write_fasta(survivors, args.output)
    else:
        args.output.write_text("")
    print(json.dumps(summary.to_dict(), indent=2))
    return EXIT_OK


def _dump_params(args: argparse.Namespace) -> int:
    encoder = ConstraintPolicy.encoder()
    verifier = ConstraintPolicy.verifier()
    params = [
        ("block_size", args.block_size),
        ("payload_oligo_length", payload_oligo_length(args.block_size)),
        ("header_oligo_length", header_oligo_length(args.block_size)),
        ("id_mask", f"{ID_MASK:#010x}"),
        ("seed_mixer", f"{SEED_MIXER:#018x}"),
        ("header_seed_mixer", f"{HEADER_SEED_MIXER:#018x}"),
        ("payload_seed_mixer", f"{PAYLOAD_SEED_MIXER:#018x}"),
        ("xorshift_multiplier", XORSHIFT_STAR_MULTIPLIER),
        ("degree_table", " ".join(f"{bound}:{degree}" for bound, degree in RAPTOR_DISTRIBUTION.thresholds)),
        ("default_overhead", DEFAULT_OVERHEAD),
        ("max_homopolymer_run", encoder.max_homopolymer_run),
        ("encoder_gc_range", f"{encoder.gc_min:.2f}-{encoder.gc_max:.2f}"),
        ("verifier_gc_range", f"{verifier.gc_min:.2f}-{verifier.gc_max:.2f}"),
        ("pattern_rules", " ".join(f"{length}x{repeats}" for length, repeats in encoder.pattern_rules)),
        ("mode_encoding", f"{Mode.ENCODING:#04x}"),
        ("mode_transcoding", f"{Mode.TRANSCODING:#04x}"),
    ]
    for key, value in params:
        print(f"{key}={value}")
    return EXIT_OK


def _dump_codebook(args: argparse.Namespace) -> int:
    for line in dump_codebook():
        print(line)
    return EXIT_OK


def _describe(error: BaseException) -> str:
    if isinstance(error, ExternalToolException):
        details = (error.stderr or error.output or "").strip()
        return f"Command {error.cmd!r} failed with code {error.returncode}: {details}"
    return str(error) or type(error).__name__


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run command line.

    :param argv: Arguments without program name, sys.argv when not given
    :return: Exit code
    """
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    logging.basicConfig(
        level=log_levels.MODULE_DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except (DNACodecException, ToolNotAvailable, OSError) as e:
        code = exit_code_for(e)
        logger.error(_describe(e))
        logger.log(log_levels.MODULE_DEBUG, msg=f"{type(e).__name__} mapped to exit code {code}")
        return code


def main(argv: Optional[List[str]] = None) -> None:
    """Entry point of console script."""
    sys.exit(run(argv))
