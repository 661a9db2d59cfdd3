# Command-line module for levy-ns
from levyns.cli.app import build_parser, configure_logging, run, run_cli

__all__ = [
    "build_parser",
    "configure_logging",
    "run",
    "run_cli",
]
