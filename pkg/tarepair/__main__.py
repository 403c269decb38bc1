"""
This is the packages __main__. It defines the command-line argument parser
and when run as main, runs a subcommand using arguments from sys.argv
"""

import argparse
import logging
import sys
from typing import List, Optional

from .defaults import Session
from .defs import TOOL_NAME, TOOL_VERSION
from .errors import EXIT_VALIDATION, ErrorMode, WarningMode

parser = argparse.ArgumentParser(prog=TOOL_NAME, add_help=False)
parser.add_argument("--verbose", "-V", action="count", default=0)
parser.add_argument(
    "--warnings", "-w", nargs="?", default=None, choices=("hide", "error")
)
parser.add_argument("--silent", "-s", nargs=1, default=[], action="append")
parser.add_argument("--color", "-c", action="store_true")
parser.add_argument("--version", "-v", action="store_true")
parser.add_argument("--help", "-h", nargs="?", const="", default=None)
parser.add_argument("command", nargs="?")
parser.add_argument("args", nargs=argparse.REMAINDER)


def process_options(session: Session, arguments: argparse.Namespace) -> None:
    """process the global options
    see Session.get_help("") for a list and description of options"""
    # verbosity
    level = logging.WARNING
    if arguments.verbose == 1:
        level = logging.INFO
    elif arguments.verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level, format="{name}: {message}", style="{")

    # warning mode
    if arguments.warnings == "hide":
        session.warning_mode = WarningMode.HIDE
    elif arguments.warnings == "error":
        session.warning_mode = WarningMode.AS_ERROR
    else:
        session.warning_mode = WarningMode.PRINT

    # silent warnings
    session.silent_warnings.extend([x[0] for x in arguments.silent])

    if arguments.color or sys.stderr.isatty():
        session.use_color = True

    # version and help
    if arguments.version:
        print("{} version {}".format(TOOL_NAME, TOOL_VERSION))
        exit(0)
    if arguments.help is not None:
        print(session.get_help(arguments.help))
        exit(0)


def tarepair_main(argv: Optional[List[str]] = None) -> None:
    """main function of the command line tool
    handles global arguments and runs the subcommand,
    exits with its exit code. argv defaults to sys.argv
    """
    session = Session()
    session.error_mode = ErrorMode.PRINT_AND_EXIT

    if argv is None:
        args = parser.parse_args()
    else:
        args = parser.parse_args(argv)

    process_options(session, args)

    if args.command is None:
        print(session.get_help(""), file=sys.stderr)
        exit(EXIT_VALIDATION)

    exit(session.run(args.command, args.args))


if __name__ == "__main__":
    tarepair_main()
