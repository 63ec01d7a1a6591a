# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""Module for external JPEG XL command line tools."""

import configparser
import logging
import os
import shlex
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import TYPE_CHECKING, Mapping, Optional, Union

from jinja2 import Environment, StrictUndefined, TemplateError
from mfd_base_tool import ToolTemplate
from mfd_common_libs import log_levels, add_logging_level, os_supported
from mfd_typing import OSName

from mfd_vdna.exceptions import CodecConfigException, ExternalToolException, ToolNotAvailable, ToolNotConfigured

if TYPE_CHECKING:
    from mfd_connect import Connection

logger = logging.getLogger(__name__)
add_logging_level(level_name="MODULE_DEBUG", level_value=log_levels.MODULE_DEBUG)

CONFIG_SECTION = "vdna"
CJXL_ENV = "VDNA_CJXL"
DJXL_ENV = "VDNA_DJXL"


@dataclass(frozen=True)
class ToolConfig:
    """
    Configuration of external image codec.

    cjxl: Compressor executable
    djxl: Decompressor executable
    compressor_cmd: Template for lossy compression, placeholders: cjxl, input, output, quality
    transcoder_cmd: Template for lossless JPEG 1 recompression, placeholders: cjxl, input, output
    decompressor_cmd: Template for decompression, placeholders: djxl, input, output
    """

    cjxl: str = "cjxl"
    djxl: str = "djxl"
    compressor_cmd: str = "{{ cjxl }} {{ input }} {{ output }} -q {{ quality }}"
    transcoder_cmd: str = "{{ cjxl }} {{ input }} {{ output }} --lossless_jpeg=1"
    decompressor_cmd: str = "{{ djxl }} {{ input }} {{ output }}"

    @classmethod
    def load(cls, config_file: Optional[Path] = None, environ: Optional[Mapping[str, str]] = None) -> "ToolConfig":
        """
        Load configuration from key=value file and environment.

        Example:
        -------
            cjxl = /opt/libjxl/bin/cjxl
            compressor_cmd = {{ cjxl }} {{ input }} {{ output }} -q {{ quality }} -e 7

        Environment variables VDNA_CJXL and VDNA_DJXL override executables from file.

        :param config_file: Optional path to config file
        :param environ: Environment, os.environ when not given
        :return: Tool configuration
        :raises CodecConfigException: on unreadable file or unknown key
        """
        environ = os.environ if environ is None else environ
        config = cls()
        if config_file is not None:
            config = replace(config, **cls._parse_config_file(config_file))
        overrides = {name: environ[var] for name, var in (("cjxl", CJXL_ENV), ("djxl", DJXL_ENV)) if environ.get(var)}
        return replace(config, **overrides)

    @classmethod
    def _parse_config_file(cls, config_file: Path) -> dict:
        raw_config = configparser.RawConfigParser(delimiters="=", interpolation=None)
        try:
            text = Path(config_file).read_text()
            if not text.lstrip().startswith("["):
                text = f"[{CONFIG_SECTION}]\n{text}"
            raw_config.read_string(text)
        except (OSError, configparser.Error) as e:
            raise CodecConfigException(f"Cannot parse config {config_file}: {e}") from e
        known = {field.name for field in fields(cls)}
        values = {}
        for section in raw_config.sections():
            for key, value in raw_config.items(section):
                if key not in known:
                    raise CodecConfigException(f"Unknown key {key!r} in config {config_file}.")
                values[key] = value.strip()
        logger.log(log_levels.MODULE_DEBUG, msg=f"Tool configuration read from {config_file}: {sorted(values)}")
        return values


def render_command(template: str, **params: Union[str, int, Path]) -> str:
    """
    Render command template with shell-quoted values.

    :param template: jinja2 template
    :param params: Values of placeholders
    :return: Command line
    :raises ToolNotConfigured: on empty template
    :raises CodecConfigException: on template error or missing placeholder value
    """
    if not template.strip():
        raise ToolNotConfigured("Command template is not configured.")
    try:
        compiled = Environment(undefined=StrictUndefined).from_string(template)
        return compiled.render(**{key: shlex.quote(str(value)) for key, value in params.items()})
    except TemplateError as e:
        raise CodecConfigException(f"Cannot render command template {template!r}: {e}") from e


class JxlTool(ToolTemplate):
    """Base wrapper for libjxl binaries driven by command templates."""

    tool_executable_name = "cjxl"

    @os_supported(OSName.LINUX, OSName.WINDOWS, OSName.FREEBSD)
    def __init__(
        self,
        *,
        connection: "Connection",
        config: Optional[ToolConfig] = None,
        absolute_path_to_binary_dir: Optional[Union[Path, str]] = None,
    ) -> None:
        """
        Initialize tool.

        :param connection: Connection used to run binary
        :param config: Tool configuration, defaults when not given
        :param absolute_path_to_binary_dir: Directory holding binary, PATH lookup when not given
        """
        self.config = config or ToolConfig()
        super().__init__(connection=connection, absolute_path_to_binary_dir=absolute_path_to_binary_dir)

    def _get_tool_exec_factory(self) -> str:
        return getattr(self.config, self.tool_executable_name)

    def check_if_available(self) -> None:
        """
        Check if tool is available in system.

        :raises ToolNotAvailable: when tool not available.
        """
        try:
            self._connection.execute_command(
                f"{self._tool_exec} --version",
                expected_return_codes={0},
                custom_exception=ToolNotAvailable,
            )
        except FileNotFoundError as e:
            raise ToolNotAvailable(f"{self._tool_exec} not found, set {CJXL_ENV}/{DJXL_ENV} or config.") from e

    def get_version(self) -> str:
        """
        Get version of tool.

        :return: First line of version output
        """
        version_out = self._connection.execute_command(f"{self._tool_exec} --version").stdout
        return version_out.strip().splitlines()[0] if version_out.strip() else ""

    def execute_template(self, template: str, **params: Union[str, int, Path]) -> str:
        """
        Render template and run it.

        :param template: Command template
        :param params: Values of placeholders
        :return: Command output
        :raises ExternalToolException: when command fails
        """
        command = render_command(template, **{self.tool_executable_name: self._tool_exec}, **params)
        logger.log(log_levels.MODULE_DEBUG, msg=f"Executing: {command}")
        output = self._connection.execute_command(
            command,
            expected_return_codes={0},
            custom_exception=ExternalToolException,
        )
        return output.stdout


class CjxlTool(JxlTool):
    """Class implementation for cjxl, JPEG XL encoder."""

    tool_executable_name = "cjxl"

    def compress(self, input_path: Path, output_path: Path, quality: int) -> Path:
        """
        Compress uncompressed image with given quality.

        :param input_path: Source image
        :param output_path: Destination JPEG XL file
        :param quality: Quality parameter
        :return: Destination path
        :raises ExternalToolException: when command fails
        """
        self.execute_template(self.config.compressor_cmd, input=input_path, output=output_path, quality=quality)
        return output_path

    def transcode(self, input_path: Path, output_path: Path) -> Path:
        """
        Losslessly recompress JPEG 1 bitstream.

        :param input_path: Source JPEG file
        :param output_path: Destination JPEG XL file
        :return: Destination path
        :raises ExternalToolException: when command fails
        """
        self.execute_template(self.config.transcoder_cmd, input=input_path, output=output_path)
        return output_path


class DjxlTool(JxlTool):
    """Class implementation for djxl, JPEG XL decoder."""

    tool_executable_name = "djxl"

    def decompress(self, input_path: Path, output_path: Path) -> Path:
        """
        Decode JPEG XL bitstream into uncompressed image.

        :param input_path: Source JPEG XL file
        :param output_path: Destination image, format chosen by extension
        :return: Destination path
        :raises ExternalToolException: when command fails
        """
        self.execute_template(self.config.decompressor_cmd, input=input_path, output=output_path)
        return output_path
