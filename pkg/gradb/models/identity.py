"""Domain identification of entity nodes, entity edges and attribute nodes.

Strong entity nodes are keyed ``<C, ID>``; weak entity nodes (those with an
outgoing Composition edge) are keyed ``<C, key(parent), ID>``; entity edges
``<label, key(start), key(end)>``; attribute nodes ``<label, key(entity)>``.
Literal nodes have no global key, only the local :func:`literal_key`.
"""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Dict, Optional, Set, Tuple

from gradb.core.exceptions import IdentityCycle, UnknownNode, UnsupportedElement
from gradb.models.elements import EntityEdgeKind
from gradb.models.values import Value, canonical_value, render_value

if TYPE_CHECKING:
    from gradb.models.graph import GradGraph

ENTITY = "entity"
EDGE = "edge"
ATTRIBUTE = "attribute"

IdSet = Tuple[Tuple[str, Tuple[Any, ...]], ...]


def identifier_set(identifiers: Dict[str, Value]) -> IdSet:
    """Identifier map as an order-independent set of (name, value) pairs"""
    return tuple(sorted((name, canonical_value(value)) for name, value in identifiers.items()))


def _render_canonical(canon: Tuple[Any, ...]) -> str:
    rank = canon[0]
    if rank == 0:
        return "true" if canon[1] else "false"
    if rank == 1:
        return "nan" if canon[1] else str(canon[2])
    if rank == 3:
        return "[" + ",".join(_render_canonical(item) for item in canon[1]) + "]"
    return str(canon[1])


@dataclass(frozen=True, order=True)
class IdentityKey:
    kind: str
    label: str
    parts: Tuple["IdentityKey", ...] = ()
    ids: IdSet = ()

    def __str__(self) -> str:
        components = [self.label] + [str(part) for part in self.parts]
        if self.kind == ENTITY:
            rendered = ",".join(f"{name}={_render_canonical(canon)}" for name, canon in self.ids)
            components.append("{" + rendered + "}")
        return "<" + ",".join(components) + ">"


def entity_key(graph: "GradGraph", handle: int) -> IdentityKey:
    return _entity_key(graph, handle, set())


def _entity_key(graph: "GradGraph", handle: int, seen: Set[int]) -> IdentityKey:
    node = graph.entity_nodes.get(handle)
    if node is None:
        raise UnknownNode(f"no entity node {handle}")
    if handle in seen:
        raise IdentityCycle(f"composition chain through {node.class_label} node {handle} is cyclic")
    seen.add(handle)

    ids = identifier_set(node.identifiers)
    parent = graph.parent_of(handle, EntityEdgeKind.COMPOSITION)
    if parent is None:
        return IdentityKey(ENTITY, node.class_label, (), ids)
    return IdentityKey(ENTITY, node.class_label, (_entity_key(graph, parent.handle, seen),), ids)


def strong_key(class_label: str, identifiers: Dict[str, Value]) -> IdentityKey:
    """Key an entity node would have without a composition parent"""
    return IdentityKey(ENTITY, class_label, (), identifier_set(identifiers))


def edge_key(graph: "GradGraph", handle: int) -> IdentityKey:
    edge = graph.entity_edges.get(handle)
    if edge is None:
        raise UnknownNode(f"no entity edge {handle}")
    return IdentityKey(EDGE, edge.label, (entity_key(graph, edge.start), entity_key(graph, edge.end)))


def attribute_key(graph: "GradGraph", handle: int) -> IdentityKey:
    node = graph.attribute_nodes.get(handle)
    if node is None:
        raise UnknownNode(f"no attribute node {handle}")
    return IdentityKey(ATTRIBUTE, node.label, (entity_key(graph, node.parent),))


def identity_key(graph: "GradGraph", ref: Any) -> IdentityKey:
    """Domain key of an entity node, entity edge or attribute node"""
    handle = graph.handle_of(ref)
    if handle in graph.entity_nodes:
        return entity_key(graph, handle)
    if handle in graph.entity_edges:
        return edge_key(graph, handle)
    if handle in graph.attribute_nodes:
        return attribute_key(graph, handle)
    if handle in graph.literal_nodes or handle in graph.attribute_edges or handle in graph.literal_edges:
        raise UnsupportedElement(f"element {handle} has no global identity key")
    raise UnknownNode(f"no element {handle}")


def context_set(context: Dict[str, Value]) -> IdSet:
    return identifier_set(context)


def literal_key(graph: "GradGraph", handle: int) -> Tuple[IdentityKey, IdSet]:
    """Local key of a literal node: parent attribute key and context vector"""
    literal = graph.literal_nodes.get(handle)
    if literal is None:
        raise UnknownNode(f"no literal node {handle}")
    edge = graph.literal_edge_of(handle)
    return attribute_key(graph, literal.parent), context_set(edge.context)


def safe_entity_key(graph: "GradGraph", handle: int) -> IdentityKey:
    """Entity key that falls back to the strong form on a cyclic composition chain"""
    try:
        return entity_key(graph, handle)
    except IdentityCycle:
        node = graph.entity_nodes[handle]
        return strong_key(node.class_label, node.identifiers)


def sort_key(graph: "GradGraph", handle: int) -> Tuple[Any, ...]:
    """Deterministic ordering key for any element; handles break ties"""
    if handle in graph.entity_nodes:
        return (0, safe_entity_key(graph, handle), handle)
    if handle in graph.attribute_nodes:
        node = graph.attribute_nodes[handle]
        return (1, node.label, safe_entity_key(graph, node.parent), handle)
    if handle in graph.literal_nodes:
        literal = graph.literal_nodes[handle]
        parent = graph.attribute_nodes[literal.parent]
        context = context_set(graph.literal_edge_of(handle).context)
        return (
            2,
            parent.label,
            safe_entity_key(graph, parent.parent),
            context,
            canonical_value(literal.value),
            handle,
        )
    if handle in graph.entity_edges:
        edge = graph.entity_edges[handle]
        return (
            3,
            edge.label,
            safe_entity_key(graph, edge.start),
            safe_entity_key(graph, edge.end),
            edge.kind.value,
            identifier_set(edge.attributes),
            handle,
        )
    if handle in graph.attribute_edges:
        edge = graph.attribute_edges[handle]
        return (4,) + sort_key(graph, edge.end)[1:]
    if handle in graph.literal_edges:
        edge = graph.literal_edges[handle]
        return (5,) + sort_key(graph, edge.end)[1:]
    raise UnknownNode(f"no element {handle}")


def render_element(graph: "GradGraph", handle: int) -> str:
    """Readable reference to an element for reports and binding tables"""
    if handle in graph.entity_nodes or handle in graph.entity_edges or handle in graph.attribute_nodes:
        try:
            return str(identity_key(graph, handle))
        except IdentityCycle:
            if handle in graph.entity_nodes:
                return str(safe_entity_key(graph, handle))
            return f"#{handle}"
    if handle in graph.literal_nodes:
        literal = graph.literal_nodes[handle]
        context = graph.literal_edge_of(handle).context
        rendered = ",".join(f"{name}={render_value(value)}" for name, value in sorted(context.items()))
        parent = render_element(graph, literal.parent)
        return f"{parent}[{rendered}]={render_value(literal.value)}"
    if handle in graph.attribute_edges:
        return render_element(graph, graph.attribute_edges[handle].end)
    if handle in graph.literal_edges:
        return render_element(graph, graph.literal_edges[handle].end)
    return f"#{handle}"


def find_by_key(graph: "GradGraph", key: IdentityKey) -> Optional[int]:
    """First entity node (in handle order) carrying ``key``"""
    for handle in graph.entity_nodes:
        if safe_entity_key(graph, handle) == key:
            return handle
    return None
