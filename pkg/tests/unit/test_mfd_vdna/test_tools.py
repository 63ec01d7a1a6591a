# Copyright (C) 2025 Intel Corporation
# SPDX-License-Identifier: MIT
"""Tests for `mfd_vdna.tools`."""

from pathlib import Path
from textwrap import dedent

import pytest
from mfd_common_libs import log_levels
from mfd_connect import LocalConnection
from mfd_connect.base import ConnectionCompletedProcess
from mfd_typing import OSName

from mfd_vdna.exceptions import CodecConfigException, ExternalToolException, ToolNotAvailable, ToolNotConfigured
from mfd_vdna.tools import CjxlTool, DjxlTool, JxlTool, ToolConfig, render_command


class TestToolConfig:
    def test_defaults(self):
        config = ToolConfig.load(environ={})
        assert (config.cjxl, config.djxl) == ("cjxl", "djxl")
        assert "{{ quality }}" in config.compressor_cmd

    def test_environment_overrides(self):
        config = ToolConfig.load(environ={"VDNA_CJXL": "/opt/jxl/cjxl", "VDNA_DJXL": "/opt/jxl/djxl"})
        assert (config.cjxl, config.djxl) == ("/opt/jxl/cjxl", "/opt/jxl/djxl")

    def test_plain_key_value_file(self, tmp_path, caplog):
        caplog.set_level(log_levels.MODULE_DEBUG)
        config_file = tmp_path / "vdna.conf"
        config_file.write_text(
            dedent(
                """\
                cjxl = /usr/local/bin/cjxl
                compressor_cmd = {{ cjxl }} {{ input }} {{ output }} -q {{ quality }} -e 7
                """
            )
        )
        config = ToolConfig.load(config_file, environ={})
        assert config.cjxl == "/usr/local/bin/cjxl"
        assert config.compressor_cmd.endswith("-e 7")
        assert config.djxl == "djxl"
        assert "Tool configuration read from" in caplog.text

    def test_file_with_section_and_env_precedence(self, tmp_path):
        config_file = tmp_path / "vdna.conf"
        config_file.write_text("[vdna]\ncjxl = /from/file\ndecompressor_cmd =\n")
        config = ToolConfig.load(config_file, environ={"VDNA_CJXL": "/from/env"})
        assert config.cjxl == "/from/env"
        assert config.decompressor_cmd == ""

    def test_unknown_key(self, tmp_path):
        config_file = tmp_path / "vdna.conf"
        config_file.write_text("encoder = x\n")
        with pytest.raises(CodecConfigException, match="Unknown key 'encoder'"):
            ToolConfig.load(config_file, environ={})

    def test_missing_file(self, tmp_path):
        with pytest.raises(CodecConfigException):
            ToolConfig.load(tmp_path / "absent.conf", environ={})


class TestRenderCommand:
    def test_values_are_quoted(self):
        command = render_command("{{ djxl }} {{ input }} {{ output }}", djxl="djxl", input="a b.jxl", output="o.png")
        assert command == "djxl 'a b.jxl' o.png"

    def test_empty_template(self):
        with pytest.raises(ToolNotConfigured):
            render_command("  ")

    def test_missing_placeholder_value(self):
        with pytest.raises(CodecConfigException):
            render_command("{{ cjxl }} {{ input }}", cjxl="cjxl")


class TestJxlTools:
    @pytest.fixture()
    def connection(self, mocker):
        connection = mocker.create_autospec(LocalConnection)
        connection.get_os_name.return_value = OSName.LINUX
        return connection

    @pytest.fixture()
    def patched_template(self, mocker):
        for tool in (CjxlTool, DjxlTool):
            mocker.patch(
                f"mfd_vdna.tools.{tool.__name__}.check_if_available",
                mocker.create_autospec(tool.check_if_available),
            )
            mocker.patch(
                f"mfd_vdna.tools.{tool.__name__}.get_version",
                mocker.create_autospec(tool.get_version, return_value="cjxl v0.10.2"),
            )

    @pytest.fixture()
    def cjxl(self, connection, patched_template):
        return CjxlTool(connection=connection, config=ToolConfig(cjxl="/opt/jxl/cjxl"))

    @pytest.fixture()
    def djxl(self, connection, patched_template):
        return DjxlTool(connection=connection)

    def test_executable_from_config(self, cjxl, djxl):
        assert cjxl._tool_exec == "/opt/jxl/cjxl"
        assert djxl._tool_exec == "djxl"

    def test_compress(self, cjxl, caplog):
        caplog.set_level(log_levels.MODULE_DEBUG)
        cjxl._connection.execute_command.return_value = ConnectionCompletedProcess(args="", return_code=0, stdout="")
        output = cjxl.compress(Path("in.png"), Path("/tmp/out.jxl"), 75)
        assert output == Path("/tmp/out.jxl")
        cjxl._connection.execute_command.assert_called_once_with(
            "/opt/jxl/cjxl in.png /tmp/out.jxl -q 75",
            expected_return_codes={0},
            custom_exception=ExternalToolException,
        )
        assert "Executing: /opt/jxl/cjxl in.png /tmp/out.jxl -q 75" in caplog.text

    def test_transcode(self, cjxl):
        cjxl._connection.execute_command.return_value = ConnectionCompletedProcess(args="", return_code=0, stdout="")
        cjxl.transcode(Path("photo.jpg"), Path("photo.jxl"))
        command = cjxl._connection.execute_command.call_args.args[0]
        assert command == "/opt/jxl/cjxl photo.jpg photo.jxl --lossless_jpeg=1"

    def test_decompress(self, djxl):
        djxl._connection.execute_command.return_value = ConnectionCompletedProcess(args="", return_code=0, stdout="")
        djxl.decompress(Path("in.jxl"), Path("out.png"))
        assert djxl._connection.execute_command.call_args.args[0] == "djxl in.jxl out.png"

    def test_failure_surfaces(self, djxl):
        djxl._connection.execute_command.side_effect = ExternalToolException(
            returncode=1, cmd="djxl in.jxl out.png", stderr="Failed to decode"
        )
        with pytest.raises(ExternalToolException) as error:
            djxl.decompress(Path("in.jxl"), Path("out.png"))
        assert error.value.stderr == "Failed to decode"

    def test_unconfigured_template(self, connection, patched_template):
        djxl = DjxlTool(connection=connection, config=ToolConfig(decompressor_cmd=""))
        with pytest.raises(ToolNotConfigured):
            djxl.decompress(Path("in.jxl"), Path("out.png"))
        djxl._connection.execute_command.assert_not_called()

    def test_check_if_available(self, cjxl):
        JxlTool.check_if_available(cjxl)
        cjxl._connection.execute_command.assert_called_once_with(
            "/opt/jxl/cjxl --version", expected_return_codes={0}, custom_exception=ToolNotAvailable
        )

    def test_not_available(self, cjxl):
        cjxl._connection.execute_command.side_effect = FileNotFoundError("cjxl")
        with pytest.raises(ToolNotAvailable, match="VDNA_CJXL"):
            JxlTool.check_if_available(cjxl)

    def test_get_version(self, cjxl):
        cjxl._connection.execute_command.return_value = ConnectionCompletedProcess(
            args="", return_code=0, stdout="JPEG XL encoder v0.10.2 [AVX2]\nCopyright\n"
        )
        assert JxlTool.get_version(cjxl) == "JPEG XL encoder v0.10.2 [AVX2]"
