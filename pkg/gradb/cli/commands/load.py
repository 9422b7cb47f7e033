import logging
import sys

from gradb.cli.common import report_error, summary, write_graph
from gradb.core.exceptions import GradError
from gradb.schemas.pipeline import PipelineConfig, Verb
from gradb.services.etl import etl_from_files
from gradb.services.property_graph import lift_property_graph, load_property_graph

logger = logging.getLogger(__name__)


def register(subparsers, common) -> None:
    parser = subparsers.add_parser(
        Verb.LOAD.value,
        parents=[common],
        help="build a graph from mapped tables or a property-graph JSON file",
    )
    parser.add_argument("inputs", nargs="*", metavar="MAPPING [TABLE ...]", help="ETL mapping, then its tables")
    parser.add_argument("--property-graph", dest="property_graph", metavar="PATH", help="lift a property graph instead")


def cmd_load(config: PipelineConfig) -> int:
    """Exit 0 with the document written, 1 on any load failure"""
    try:
        config.check_inputs()
        if config.property_graph is not None:
            graph = lift_property_graph(load_property_graph(config.property_graph), strict=config.strict)
        else:
            graph = etl_from_files(config.inputs[0], config.inputs[1:], config.delimiter, config.strict)
        write_graph(graph, config.out)
    except GradError as e:
        logger.error(f"Error loading graph: {e}")
        report_error(e)
        return 1

    print(summary(graph), file=sys.stderr)
    return 0


COMMANDS = {Verb.LOAD: cmd_load}
