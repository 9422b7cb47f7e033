"""Input and output helpers shared by the command modules."""

import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from gradb.core.config import settings
from gradb.core.exceptions import GradError, SinkError
from gradb.models.graph import GradGraph
from gradb.services import serializer
from gradb.services.algebra import union_all

logger = logging.getLogger(__name__)


def report_error(error: GradError) -> None:
    print(f"error\t{error.code}\t{error.message}", file=sys.stderr)


def summary(graph: GradGraph) -> str:
    counts = graph.counts()
    edges = counts["entity_edges"] + counts["attribute_edges"] + counts["literal_edges"]
    return f"entities={counts['entities']} attributes={counts['attributes']} literals={counts['literals']} edges={edges}"


def read_graph(path: Path, strict: bool = False) -> GradGraph:
    """One graph; a file holding several documents is folded into one"""
    graphs = read_graphs(path, strict)
    if len(graphs) == 1:
        return graphs[0]
    logger.info(f"{path} holds {len(graphs)} documents, reading their union")
    merged = union_all(graphs)
    merged.strict = strict or merged.strict
    return merged


def read_graphs(path: Path, strict: bool = False) -> List[GradGraph]:
    graphs = serializer.load_collection(path)
    if strict:
        for graph in graphs:
            graph.strict = True
    return graphs


def write_text(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        out.write_text(text, encoding=settings.FILE_ENCODING)
    except OSError as e:
        raise SinkError(f"cannot write {out}: {e}")


def write_graph(graph: GradGraph, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(serializer.dumps(graph))
    else:
        serializer.save(graph, out)


def numbered(out: Path, number: int) -> Path:
    return out.with_name(f"{out.stem}.{number}{out.suffix}")


def write_collection(graphs: Sequence[GradGraph], out: Optional[Path], merge: bool = False) -> None:
    """Stdout gets concatenated documents; a file name gets one file per graph, numbered from 1"""
    if merge:
        write_graph(union_all(graphs), out)
    elif out is None:
        sys.stdout.write(serializer.dumps_collection(graphs))
    elif len(graphs) == 1:
        serializer.save(graphs[0], out)
    else:
        for number, graph in enumerate(graphs, start=1):
            serializer.save(graph, numbered(out, number))
