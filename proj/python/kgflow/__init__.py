"""Prescribed mean curvature flow of graphs over warped-product charts.

Thin wrapper over the compiled core: each call runs one command (flow,
soliton, speed, verify) exactly as the command-line tool does, writes the
same artifacts, and returns the parsed report.
"""

import json as _json

from ._core import (
    ConfigError,
    SolverError,
    UnsupportedRegimeError,
    canonical_config,
    run_command,
    run_command_text,
)

__all__ = [
    "ConfigError",
    "SolverError",
    "UnsupportedRegimeError",
    "canonical_config",
    "run",
    "run_command",
    "run_command_text",
    "run_text",
]


def run(command, config_path, out_dir="", resolution=0, dt=0.0):
    """Run a command against a config file; returns the report as a dict."""
    return _json.loads(
        run_command(command, config_path, out_dir=out_dir, resolution=resolution, dt=dt)
    )


def run_text(command, config_text, out_dir="", resolution=0, dt=0.0):
    """Like run(), with the config text passed directly."""
    return _json.loads(
        run_command_text(
            command, config_text, out_dir=out_dir, resolution=resolution, dt=dt
        )
    )
