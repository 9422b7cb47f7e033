import logging

from gradb.cli.common import read_graph, report_error, write_text
from gradb.core.exceptions import GradError
from gradb.schemas.pipeline import PipelineConfig, Verb
from gradb.schemas.reports import GraphStats
from gradb.services.property_graph import dumps_property_graph, export_property_graph

logger = logging.getLogger(__name__)


def register(subparsers, common) -> None:
    parser = subparsers.add_parser(Verb.STATS.value, parents=[common], help="print element and class counts")
    parser.add_argument("inputs", nargs=1, metavar="GRAPH")

    parser = subparsers.add_parser(Verb.EXPORT.value, parents=[common], help="write the property-graph projection")
    parser.add_argument("inputs", nargs=1, metavar="GRAPH")


def cmd_stats(config: PipelineConfig) -> int:
    try:
        config.check_inputs()
        stats = GraphStats.of(read_graph(config.inputs[0], config.strict))
        write_text("".join(line + "\n" for line in stats.to_lines()), config.out)
    except GradError as e:
        logger.error(f"Error reading {config.inputs[0]}: {e}")
        report_error(e)
        return 2
    return 0


def cmd_export(config: PipelineConfig) -> int:
    try:
        config.check_inputs()
        property_graph = export_property_graph(read_graph(config.inputs[0], config.strict))
        write_text(dumps_property_graph(property_graph), config.out)
    except GradError as e:
        logger.error(f"Error exporting {config.inputs[0]}: {e}")
        report_error(e)
        return 2
    return 0


COMMANDS = {Verb.STATS: cmd_stats, Verb.EXPORT: cmd_export}
