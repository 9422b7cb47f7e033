import logging
import sys

from gradb.cli.common import read_graph, report_error, write_text
from gradb.core.exceptions import GradError
from gradb.schemas.constraints import ConstraintSet
from gradb.schemas.pipeline import PipelineConfig, Verb
from gradb.services.constraints import validate
from gradb.services.pattern_format import load_constraints

logger = logging.getLogger(__name__)


def register(subparsers, common) -> None:
    parser = subparsers.add_parser(
        Verb.VALIDATE.value,
        parents=[common],
        help="check a graph against entity integrity and optional constraints",
    )
    parser.add_argument("inputs", nargs="+", metavar="GRAPH [CONSTRAINTS]")


def cmd_validate(config: PipelineConfig) -> int:
    """One violation per line; exit 1 when any Error is reported"""
    try:
        config.check_inputs()
        graph = read_graph(config.inputs[0], config.strict)
        constraints = load_constraints(config.inputs[1]) if len(config.inputs) > 1 else ConstraintSet()
        report = validate(
            graph,
            constraints.assertions,
            constraints.multiplicities,
            global_edge_labels=config.global_edge_labels or None,
        )
        lines = report.to_lines()
        write_text("".join(line + "\n" for line in lines), config.out)
    except GradError as e:
        logger.error(f"Error validating {config.inputs[0]}: {e}")
        report_error(e)
        return 2

    print(report.summary(), file=sys.stderr)
    return 0 if report.ok else 1


COMMANDS = {Verb.VALIDATE: cmd_validate}
