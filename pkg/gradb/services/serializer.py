"""The grad/1 document format.

A document is a header line ``grad/1 mode=<strict|lax> records=<n>`` followed by
one tab-separated record per line::

    EN  id  class  identifiers
    AN  id  label
    LN  id  value
    EE  id  start  end  kind  label  attributes
    AE  id  start  end
    LE  id  start  end  context

Ids are document-local and sequential. Records appear in canonical order
(entity nodes by identity key, then attribute nodes, literal nodes, entity
edges, attribute edges, literal edges), so saving the same graph always yields
the same bytes. The full grammar is in FORMATS.md.
"""

import io
import logging
import re
from collections import defaultdict
from pathlib import Path
from typing import IO, Dict, Iterable, List, Tuple, Union

from gradb.core.config import settings
from gradb.core.exceptions import GradError, ParseError, SinkError, SourceError, UnsupportedVersion
from gradb.models.elements import EntityEdgeKind
from gradb.models.graph import GradGraph
from gradb.models.identity import safe_entity_key, sort_key
from gradb.services.codec import decode_map, decode_value, encode_map, encode_value, escape, unescape

logger = logging.getLogger(__name__)

Sink = Union[str, Path, IO]
Source = Union[str, Path, IO]

HEADER = re.compile(r"^(grad/\S+) mode=(strict|lax) records=(\d+)$")

ARITY = {"EN": 4, "AN": 3, "LN": 3, "EE": 7, "AE": 4, "LE": 5}


# ----------------------------------------------------------------------
# Writing
# ----------------------------------------------------------------------


def dumps(graph: GradGraph) -> str:
    """Canonical grad/1 text of ``graph``"""
    def order(handles: Iterable[int]) -> List[int]:
        return sorted(handles, key=lambda h: sort_key(graph, h))

    entity_nodes = order(graph.entity_nodes)
    attribute_nodes = order(graph.attribute_nodes)
    literal_nodes = order(graph.literal_nodes)
    entity_edges = order(graph.entity_edges)
    attribute_edges = order(graph.attribute_edges)
    literal_edges = order(graph.literal_edges)

    ids: Dict[int, int] = {}
    for handle in entity_nodes + attribute_nodes + literal_nodes + entity_edges + attribute_edges + literal_edges:
        ids[handle] = len(ids) + 1

    records: List[str] = []
    for handle in entity_nodes:
        node = graph.entity_nodes[handle]
        records.append(f"EN\t{ids[handle]}\t{escape(node.class_label)}\t{encode_map(node.identifiers)}")
    for handle in attribute_nodes:
        records.append(f"AN\t{ids[handle]}\t{escape(graph.attribute_nodes[handle].label)}")
    for handle in literal_nodes:
        records.append(f"LN\t{ids[handle]}\t{encode_value(graph.literal_nodes[handle].value)}")
    for handle in entity_edges:
        edge = graph.entity_edges[handle]
        records.append(
            f"EE\t{ids[handle]}\t{ids[edge.start]}\t{ids[edge.end]}\t{edge.kind.value}"
            f"\t{escape(edge.label)}\t{encode_map(edge.attributes)}"
        )
    for handle in attribute_edges:
        edge = graph.attribute_edges[handle]
        records.append(f"AE\t{ids[handle]}\t{ids[edge.start]}\t{ids[edge.end]}")
    for handle in literal_edges:
        edge = graph.literal_edges[handle]
        records.append(f"LE\t{ids[handle]}\t{ids[edge.start]}\t{ids[edge.end]}\t{encode_map(edge.context)}")

    mode = "strict" if graph.strict else "lax"
    header = f"{settings.FORMAT_VERSION} mode={mode} records={len(records)}"
    return "".join(line + "\n" for line in [header] + records)


def dumps_collection(graphs: Iterable[GradGraph]) -> str:
    return "".join(dumps(graph) for graph in graphs)


def _write(text: str, sink: Sink) -> int:
    data = text.encode(settings.FILE_ENCODING)
    try:
        if isinstance(sink, (str, Path)):
            Path(sink).write_bytes(data)
        elif isinstance(sink, io.TextIOBase):
            sink.write(text)
        else:
            sink.write(data)
    except (OSError, TypeError, ValueError) as e:
        logger.error(f"Error writing grad/1 document: {e}")
        raise SinkError(f"cannot write document: {e}")
    return len(data)


def save(graph: GradGraph, sink: Sink) -> int:
    """Write ``graph`` to a path or stream; returns the byte count"""
    written = _write(dumps(graph), sink)
    logger.info(f"Saved graph ({graph.node_count} nodes, {graph.edge_count} edges, {written} bytes)")
    return written


def save_collection(graphs: Iterable[GradGraph], sink: Sink) -> int:
    graphs = list(graphs)
    written = _write(dumps_collection(graphs), sink)
    logger.info(f"Saved collection of {len(graphs)} graph(s), {written} bytes")
    return written


# ----------------------------------------------------------------------
# Reading
# ----------------------------------------------------------------------


class _DocumentReader:
    """Parses one document whose header sits on line ``offset + 1`` of the source"""

    def __init__(self, lines: List[str], offset: int = 0):
        self.lines = lines
        self.offset = offset

    def _fail(self, index: int, reason: str) -> ParseError:
        return ParseError(self.offset + index + 1, reason)

    def _id(self, index: int, token: str) -> int:
        if not token.isdigit():
            raise self._fail(index, f"bad record id {token!r}")
        return int(token)

    def read(self) -> GradGraph:
        if not self.lines:
            raise self._fail(0, "empty document")
        header = HEADER.match(self.lines[0])
        if not header:
            if self.lines[0].startswith("grad/"):
                version = self.lines[0].split()[0]
                if version != settings.FORMAT_VERSION:
                    raise UnsupportedVersion(f"unsupported document version {version}")
            raise self._fail(0, "malformed header")
        version, mode, declared = header.group(1), header.group(2), int(header.group(3))
        if version != settings.FORMAT_VERSION:
            raise UnsupportedVersion(f"unsupported document version {version}")

        records = self.lines[1:]
        if len(records) != declared:
            raise self._fail(0, f"header declares {declared} records, found {len(records)}")

        parsed: Dict[str, List[Tuple[int, List[str]]]] = defaultdict(list)
        kinds: Dict[int, str] = {}
        for index, line in enumerate(records, start=1):
            fields = line.split("\t")
            tag = fields[0]
            if tag not in ARITY:
                raise self._fail(index, f"unknown record type {tag!r}")
            if len(fields) != ARITY[tag]:
                raise self._fail(index, f"{tag} records have {ARITY[tag]} fields, found {len(fields)}")
            record_id = self._id(index, fields[1])
            if record_id in kinds:
                raise self._fail(index, f"record id {record_id} declared twice")
            kinds[record_id] = tag
            parsed[tag].append((index, fields))

        return self._build(parsed, kinds, mode)

    def _build(self, parsed, kinds: Dict[int, str], mode: str) -> GradGraph:
        graph = GradGraph(strict=False)
        handles: Dict[int, int] = {}
        first_line: Dict[int, int] = {}
        index = 0

        def ref(index: int, token: str, expected: str) -> int:
            record_id = self._id(index, token)
            if kinds.get(record_id) != expected:
                raise self._fail(index, f"DanglingReference: {token} is not a declared {expected} record")
            return record_id

        try:
            for index, fields in parsed["EN"]:
                node = graph.add_entity_node(unescape(fields[2]), decode_map(fields[3]))
                handles[int(fields[1])] = node.handle
                first_line[node.handle] = index

            # Attribute and literal nodes are created through their single parent edge
            attribute_parent: Dict[int, Tuple[int, int]] = {}
            for index, fields in parsed["AE"]:
                start, end = ref(index, fields[2], "EN"), ref(index, fields[3], "AN")
                if end in attribute_parent:
                    raise self._fail(index, f"attribute node {end} has a second attribute edge")
                attribute_parent[end] = (start, int(fields[1]))
            literal_parent: Dict[int, Tuple[int, int, int, str]] = {}
            for index, fields in parsed["LE"]:
                start, end = ref(index, fields[2], "AN"), ref(index, fields[3], "LN")
                if end in literal_parent:
                    raise self._fail(index, f"literal node {end} has a second literal edge")
                literal_parent[end] = (start, int(fields[1]), index, fields[4])

            for index, fields in parsed["AN"]:
                record_id = int(fields[1])
                if record_id not in attribute_parent:
                    raise self._fail(index, f"attribute node {record_id} has no attribute edge")
                parent, edge_id = attribute_parent[record_id]
                label = unescape(fields[2])
                if graph.attribute_named(handles[parent], label) is not None:
                    raise self._fail(index, f"entity {parent} already has an attribute {label}")
                node = graph.add_attribute(handles[parent], label)
                handles[record_id] = node.handle
                handles[edge_id] = graph.attribute_edge_of(node.handle).handle

            for index, fields in parsed["LN"]:
                record_id = int(fields[1])
                if record_id not in literal_parent:
                    raise self._fail(index, f"literal node {record_id} has no literal edge")
                parent, edge_id, edge_index, context_text = literal_parent[record_id]
                try:
                    context = decode_map(context_text)
                except GradError as e:
                    raise self._fail(edge_index, e.message)
                node = graph._add_literal(handles[parent], decode_value(fields[2]), context, warn=False)
                handles[record_id] = node.handle
                handles[edge_id] = graph.literal_edge_of(node.handle).handle

            for index, fields in parsed["EE"]:
                start, end = ref(index, fields[2], "EN"), ref(index, fields[3], "EN")
                try:
                    kind = EntityEdgeKind(fields[4])
                except ValueError:
                    raise self._fail(index, f"unknown entity edge kind {fields[4]!r}")
                edge = graph.add_entity_edge(handles[start], handles[end], kind, unescape(fields[5]), decode_map(fields[6]))
                handles[int(fields[1])] = edge.handle
                first_line[edge.handle] = index
        except ParseError:
            raise
        except GradError as e:
            raise self._fail(index, f"{e.code}: {e.message}")

        self._check_identities(graph, first_line, mode)
        graph.strict = mode == "strict"
        return graph

    def _check_identities(self, graph: GradGraph, first_line: Dict[int, int], mode: str) -> None:
        seen: Dict = {}
        for handle in graph.entity_nodes:
            key = safe_entity_key(graph, handle)
            if key in seen:
                if mode == "strict":
                    raise self._fail(first_line[handle], f"DuplicateIdentity: {key} in a strict document")
                logger.warning(f"Document holds duplicate identity {key}")
            seen[key] = handle


def _split_documents(text: str) -> List[Tuple[int, List[str]]]:
    """(line offset, lines) per document; every header line starts a new document"""
    documents: List[Tuple[int, List[str]]] = []
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for number, line in enumerate(lines):
        if line.startswith("grad/") or not documents:
            documents.append((number, []))
        documents[-1][1].append(line)
    return documents


def _read_text(source: Source) -> str:
    try:
        if isinstance(source, (str, Path)):
            return Path(source).read_text(encoding=settings.FILE_ENCODING)
        data = source.read()
        return data.decode(settings.FILE_ENCODING) if isinstance(data, bytes) else data
    except (OSError, UnicodeDecodeError) as e:
        logger.error(f"Error reading grad/1 source: {e}")
        raise SourceError(f"cannot read document: {e}")


def loads(text: str) -> GradGraph:
    documents = _split_documents(text)
    if len(documents) != 1:
        raise ParseError(1, f"expected one document, found {len(documents)}")
    offset, lines = documents[0]
    return _DocumentReader(lines, offset).read()


def loads_collection(text: str) -> List[GradGraph]:
    return [_DocumentReader(lines, offset).read() for offset, lines in _split_documents(text)]


def load(source: Source) -> GradGraph:
    """Read one grad/1 document from a path or stream"""
    try:
        graph = loads(_read_text(source))
    except GradError as e:
        logger.error(f"Error loading grad/1 document: {e}")
        raise
    logger.info(f"Loaded graph ({graph.node_count} nodes, {graph.edge_count} edges)")
    return graph


def load_collection(source: Source) -> List[GradGraph]:
    """Read concatenated grad/1 documents"""
    graphs = loads_collection(_read_text(source))
    logger.info(f"Loaded collection of {len(graphs)} graph(s)")
    return graphs
