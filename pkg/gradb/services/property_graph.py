"""Conversion between plain property graphs and GRAD graphs."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import ValidationError

from gradb.core.config import settings
from gradb.core.exceptions import GradError, InvalidValue, MappingError
from gradb.models.graph import GradGraph
from gradb.models.identity import sort_key
from gradb.models.values import Value, ensure_value
from gradb.schemas.property_graph import PropertyEdge, PropertyGraph, PropertyNode
from gradb.services.merger import GraphMerger

logger = logging.getLogger(__name__)


def _value(raw: Any, where: str) -> Value:
    try:
        return ensure_value(raw)
    except InvalidValue as e:
        raise MappingError(f"{where}: {e.message}")


def lift_property_graph(property_graph: PropertyGraph, strict: Optional[bool] = None) -> GradGraph:
    """Lift a property graph to GRAD.

    Identifier properties come from the node's ``keys`` or the per-label
    ``identifier_keys``; a node with neither is identified by ``{"id": node id}``.
    Every other non-null property becomes an attribute node with one
    context-free literal. Nodes that end up with equal identity keys are
    integrated into one hypernode.
    """
    fragment = GradGraph(strict=False)
    handles: Dict[str, int] = {}

    for node in property_graph.nodes:
        keys = property_graph.keys_for(node)
        where = f"node {node.id}"
        if keys:
            missing = [key for key in keys if node.properties.get(key) is None]
            if missing:
                raise MappingError(f"{where}: identifier propert(ies) {', '.join(missing)} missing")
            identifiers = {key: _value(node.properties[key], where) for key in keys}
        else:
            keys = []
            identifiers = {"id": node.id}
        try:
            entity = fragment.add_entity_node(node.label, identifiers)
        except GradError as e:
            raise MappingError(f"{where}: {e.message}")
        handles[node.id] = entity.handle
        for name, raw in sorted(node.properties.items()):
            if name in keys or raw is None:
                continue
            attribute = fragment.add_attribute(entity.handle, name)
            fragment.add_literal(attribute.handle, _value(raw, f"{where} property {name}"))

    for edge in property_graph.edges:
        attributes = {name: _value(raw, f"edge {edge.label}") for name, raw in edge.properties.items() if raw is not None}
        try:
            fragment.add_entity_edge(handles[edge.start], handles[edge.end], edge.kind, edge.label, attributes)
        except GradError as e:
            raise MappingError(f"edge {edge.start}->{edge.end} {edge.label}: {e.message}")

    graph = GradGraph(strict=strict)
    try:
        GraphMerger(graph).merge(fragment)
    except GradError as e:
        logger.error(f"Error lifting property graph: {e}")
        raise MappingError(f"{e.code}: {e.message}")
    logger.info(f"Lifted property graph ({len(property_graph.nodes)} nodes) to {graph!r}")
    return graph


def _plain(value: Value) -> Any:
    if isinstance(value, tuple):
        return [_plain(item) for item in value]
    return value


def export_property_graph(graph: GradGraph) -> PropertyGraph:
    """Project a GRAD graph onto a property graph.

    Lossy: literal contexts are dropped, an attribute with several literals
    becomes a list property, and an attribute named like an identifier is
    shadowed by the identifier.
    """
    ordered = sorted(graph.entity_nodes, key=lambda h: sort_key(graph, h))
    ids = {handle: f"n{number}" for number, handle in enumerate(ordered, start=1)}

    nodes: List[PropertyNode] = []
    for handle in ordered:
        entity = graph.entity_nodes[handle]
        properties: Dict[str, Any] = {}
        for attribute in sorted(graph.attributes_of(handle), key=lambda a: a.label):
            literals = sorted(graph.literals_of(attribute.handle), key=lambda l: sort_key(graph, l.handle))
            values = [_plain(literal.value) for literal in literals]
            if not values:
                continue
            properties[attribute.label] = values[0] if len(values) == 1 else values
        for name, value in entity.identifiers.items():
            if name in properties:
                logger.warning(f"Attribute {name} of {ids[handle]} shadowed by the identifier of the same name")
            properties[name] = _plain(value)
        nodes.append(
            PropertyNode(
                id=ids[handle],
                label=entity.class_label,
                properties=dict(sorted(properties.items())),
                keys=sorted(entity.identifiers),
            )
        )

    edges = [
        PropertyEdge(
            start=ids[edge.start],
            end=ids[edge.end],
            label=edge.label,
            properties={name: _plain(value) for name, value in sorted(edge.attributes.items())},
            kind=edge.kind,
        )
        for edge in (graph.entity_edges[h] for h in sorted(graph.entity_edges, key=lambda h: sort_key(graph, h)))
    ]
    return PropertyGraph(nodes=nodes, edges=edges)


def load_property_graph(path: Union[str, Path]) -> PropertyGraph:
    path = Path(path)
    try:
        return PropertyGraph.model_validate(json.loads(path.read_text(encoding=settings.FILE_ENCODING)))
    except FileNotFoundError:
        raise MappingError(f"property graph not found: {path}")
    except (OSError, UnicodeDecodeError) as e:
        raise MappingError(f"cannot read property graph {path}: {e}")
    except json.JSONDecodeError as e:
        raise MappingError(f"{path}: line {e.lineno}: {e.msg}")
    except ValidationError as e:
        raise MappingError(f"{path}: {e}")


def dumps_property_graph(property_graph: PropertyGraph) -> str:
    return property_graph.model_dump_json(indent=2, exclude={"identifier_keys"}) + "\n"
