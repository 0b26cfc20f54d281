from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence, TextIO

from dotenv import load_dotenv

from plugin_manager.manager import PluginManager
from .errors import AfcError

PROG = "afc"


class CliParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"error: usage: {message}\n")


def build_parser(manager: PluginManager) -> CliParser:
    parser = CliParser(prog=PROG, description="Exact additive combinatorics over prime fields.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="<command>")
    for name in sorted(manager.commands):
        command = manager.commands[name]
        command.configure(sub.add_parser(name, help=command.help, description=command.help))
    return parser


def build_manager(plugins_dir: Path | None = None) -> PluginManager:
    root_dir = Path(__file__).resolve().parents[1]
    manager = PluginManager(plugins_dir=plugins_dir or root_dir / "plugins")
    for name, ok, message in manager.load_all():
        if not ok:
            print(f"PLUGIN WARN: '{name}' not loaded: {message}", file=sys.stderr)
    return manager


def run(argv: Sequence[str] | None = None, *, stdout: TextIO | None = None) -> int:
    # Prefer values from .env over stale exported shell variables.
    load_dotenv(override=True)
    out = stdout or sys.stdout
    manager = build_manager()
    parser = build_parser(manager)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    command = manager.commands[args.command]
    try:
        return command.handler(args, out) or 0
    except AfcError as exc:
        print(exc.line(), file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 2
