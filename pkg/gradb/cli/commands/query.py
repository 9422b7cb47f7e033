import logging
import sys

from gradb.cli.common import read_graph, report_error, summary, write_collection, write_graph, write_text
from gradb.core.exceptions import GradError
from gradb.schemas.pipeline import PipelineConfig, Verb
from gradb.services.algebra import composition, selection
from gradb.services.matcher import match
from gradb.services.pattern_format import load_pattern, load_template

logger = logging.getLogger(__name__)


def register(subparsers, common) -> None:
    parser = subparsers.add_parser(Verb.MATCH.value, parents=[common], help="print the binding table of a pattern")
    parser.add_argument("inputs", nargs=2, metavar=("GRAPH", "PATTERN"))

    parser = subparsers.add_parser(Verb.SELECT.value, parents=[common], help="write the matched subgraphs")
    parser.add_argument("inputs", nargs=2, metavar=("GRAPH", "PATTERN"))

    parser = subparsers.add_parser(Verb.COMPOSE.value, parents=[common], help="instantiate a template per match")
    parser.add_argument("inputs", nargs=3, metavar=("GRAPH", "PATTERN", "TEMPLATE"))


def cmd_match(config: PipelineConfig) -> int:
    try:
        config.check_inputs()
        graph = read_graph(config.inputs[0], config.strict)
        result = match(graph, load_pattern(config.inputs[1]), limit=config.max_matches)
        write_text("".join("\t".join(row) + "\n" for row in result.to_rows()), config.out)
    except GradError as e:
        logger.error(f"Error matching {config.inputs[1]}: {e}")
        report_error(e)
        return 2

    truncated = " truncated" if result.truncated else ""
    print(f"matches={len(result)}{truncated}", file=sys.stderr)
    return 0


def cmd_select(config: PipelineConfig) -> int:
    try:
        config.check_inputs()
        graph = read_graph(config.inputs[0], config.strict)
        graphs = selection(graph, load_pattern(config.inputs[1]), limit=config.max_matches)
        write_collection(list(graphs), config.out, config.merge)
    except GradError as e:
        logger.error(f"Error selecting {config.inputs[1]}: {e}")
        report_error(e)
        return 2

    print(f"graphs={len(graphs)}", file=sys.stderr)
    return 0


def cmd_compose(config: PipelineConfig) -> int:
    try:
        config.check_inputs()
        graph = read_graph(config.inputs[0], config.strict)
        pattern = load_pattern(config.inputs[1])
        template = load_template(config.inputs[2])
        result = composition(graph, pattern, template, limit=config.max_matches)
        write_graph(result, config.out)
    except GradError as e:
        logger.error(f"Error composing {config.inputs[2]}: {e}")
        report_error(e)
        return 2

    print(summary(result), file=sys.stderr)
    return 0


COMMANDS = {Verb.MATCH: cmd_match, Verb.SELECT: cmd_select, Verb.COMPOSE: cmd_compose}
