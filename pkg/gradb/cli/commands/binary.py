import logging
import sys

from gradb.cli.common import read_graph, read_graphs, report_error, summary, write_collection, write_graph
from gradb.core.exceptions import GradError
from gradb.schemas.pipeline import PipelineConfig, Verb
from gradb.services.algebra import cartesian_product, difference, join, union
from gradb.services.pattern_format import load_join_predicate

logger = logging.getLogger(__name__)


def register(subparsers, common) -> None:
    for verb, description in (
        (Verb.UNION, "juxtapose two graphs"),
        (Verb.DIFF, "remove the exact content of RIGHT from LEFT"),
        (Verb.PRODUCT, "pair every graph of LEFT with every graph of RIGHT"),
    ):
        parser = subparsers.add_parser(verb.value, parents=[common], help=description)
        parser.add_argument("inputs", nargs=2, metavar=("LEFT", "RIGHT"))

    parser = subparsers.add_parser(Verb.JOIN.value, parents=[common], help="merge graph pairs under a join predicate")
    parser.add_argument("inputs", nargs=3, metavar=("LEFT", "RIGHT", "PREDICATE"))


def _fail(config: PipelineConfig, e: GradError) -> int:
    logger.error(f"Error running {config.verb.value}: {e}")
    report_error(e)
    return 2


def cmd_union(config: PipelineConfig) -> int:
    try:
        config.check_inputs()
        result = union(read_graph(config.inputs[0], config.strict), read_graph(config.inputs[1], config.strict))
        write_graph(result, config.out)
    except GradError as e:
        return _fail(config, e)
    print(summary(result), file=sys.stderr)
    return 0


def cmd_diff(config: PipelineConfig) -> int:
    try:
        config.check_inputs()
        result = difference(read_graph(config.inputs[0], config.strict), read_graph(config.inputs[1], config.strict))
        write_graph(result, config.out)
    except GradError as e:
        return _fail(config, e)
    print(summary(result), file=sys.stderr)
    return 0


def cmd_product(config: PipelineConfig) -> int:
    try:
        config.check_inputs()
        graphs = cartesian_product(read_graphs(config.inputs[0], config.strict), read_graphs(config.inputs[1], config.strict))
        write_collection(list(graphs), config.out, config.merge)
    except GradError as e:
        return _fail(config, e)
    print(f"graphs={len(graphs)}", file=sys.stderr)
    return 0


def cmd_join(config: PipelineConfig) -> int:
    try:
        config.check_inputs()
        predicate = load_join_predicate(config.inputs[2])
        graphs = join(read_graphs(config.inputs[0], config.strict), read_graphs(config.inputs[1], config.strict), predicate)
        write_collection(list(graphs), config.out, config.merge)
    except GradError as e:
        return _fail(config, e)
    print(f"graphs={len(graphs)}", file=sys.stderr)
    return 0


COMMANDS = {Verb.UNION: cmd_union, Verb.DIFF: cmd_diff, Verb.PRODUCT: cmd_product, Verb.JOIN: cmd_join}
