import argparse
from typing import Callable, Dict

from gradb import __version__
from gradb.cli.commands import binary, inspect, load, query, validate
from gradb.schemas.pipeline import PipelineConfig, Verb

COMMAND_MODULES = (load, validate, query, binary, inspect)

commands: Dict[Verb, Callable[[PipelineConfig], int]] = {}
for module in COMMAND_MODULES:
    commands.update(module.COMMANDS)


def common_options() -> argparse.ArgumentParser:
    """Flags every verb accepts"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging")
    common.add_argument("--strict", action="store_true", help="strict graph mode for loaded and built graphs")
    common.add_argument("--merge", action="store_true", help="fold multi-graph results into one document")
    common.add_argument("--max-matches", dest="max_matches", type=int, metavar="N", help="match guard")
    common.add_argument("--out", metavar="PATH", help="output file (default: standard output)")
    common.add_argument(
        "--global-edge-labels",
        dest="global_edge_labels",
        action="store_true",
        help="check edge-label/target-class pairs per start class instead of per start node",
    )
    common.add_argument("--delimiter", metavar="CHAR", help="table delimiter for load")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gradb", description="Batch front end of the GRAD graph engine")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="verb", metavar="VERB", required=True)
    common = common_options()
    for module in COMMAND_MODULES:
        module.register(subparsers, common)
    return parser


def to_config(args: argparse.Namespace) -> PipelineConfig:
    values = {
        "verb": args.verb,
        "inputs": list(args.inputs),
        "out": args.out,
        "property_graph": getattr(args, "property_graph", None),
        "strict": args.strict,
        "merge": args.merge,
        "global_edge_labels": args.global_edge_labels,
        "delimiter": args.delimiter,
    }
    if args.max_matches is not None:
        values["max_matches"] = args.max_matches
    return PipelineConfig(**values)


def dispatch(config: PipelineConfig) -> int:
    return commands[config.verb](config)
