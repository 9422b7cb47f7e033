"""In-memory GRAD graph store.

A graph supports any number of concurrent readers or a single writer; it is
not internally locked. Algebra operators never mutate their inputs, so shared
graphs may be read from several threads at once.
"""

import logging
from collections import deque
from typing import Any, Dict, Iterable, Iterator, List, Optional, Set, Union

from gradb.core.config import settings
from gradb.core.exceptions import (
    CompositeContextValue,
    DuplicateEdgeLabelPair,
    DuplicateIdentity,
    DuplicateParentEdge,
    EmptyIdentifier,
    EmptyLabel,
    UnknownNode,
    UnsupportedElement,
)
from gradb.models.elements import (
    AttributeEdge,
    AttributeNode,
    EntityEdge,
    EntityEdgeKind,
    EntityNode,
    Hypernode,
    LiteralEdge,
    LiteralNode,
)
from gradb.models import identity
from gradb.models.values import Value, canonical_value, ensure_value, is_scalar

logger = logging.getLogger(__name__)

Element = Union[EntityNode, AttributeNode, LiteralNode, EntityEdge, AttributeEdge, LiteralEdge]
Ref = Union[int, Element]


class GradGraph:
    """Partitioned node/edge store with hypernode and cascade semantics"""

    def __init__(self, strict: Optional[bool] = None):
        self.strict = settings.STRICT_MODE if strict is None else strict
        self._next_handle = 1

        # Partitions
        self.entity_nodes: Dict[int, EntityNode] = {}
        self.attribute_nodes: Dict[int, AttributeNode] = {}
        self.literal_nodes: Dict[int, LiteralNode] = {}
        self.entity_edges: Dict[int, EntityEdge] = {}
        self.attribute_edges: Dict[int, AttributeEdge] = {}
        self.literal_edges: Dict[int, LiteralEdge] = {}

        # Adjacency
        self._out: Dict[int, List[int]] = {}
        self._in: Dict[int, List[int]] = {}
        self._attributes: Dict[int, Dict[str, int]] = {}
        self._attribute_edge: Dict[int, int] = {}
        self._literals: Dict[int, List[int]] = {}
        self._literal_edge: Dict[int, int] = {}
        self._classes: Dict[str, List[int]] = {}

    # ------------------------------------------------------------------
    # Lookup
    # ------------------------------------------------------------------

    def handle_of(self, ref: Any) -> int:
        if isinstance(ref, int) and not isinstance(ref, bool):
            return ref
        handle = getattr(ref, "handle", None)
        if handle is None:
            raise UnknownNode(f"not a graph element reference: {ref!r}")
        return handle

    def __contains__(self, ref: Any) -> bool:
        try:
            handle = self.handle_of(ref)
        except UnknownNode:
            return False
        return self.element(handle) is not None

    def element(self, ref: Ref) -> Optional[Element]:
        handle = self.handle_of(ref)
        for partition in (
            self.entity_nodes,
            self.attribute_nodes,
            self.literal_nodes,
            self.entity_edges,
            self.attribute_edges,
            self.literal_edges,
        ):
            if handle in partition:
                return partition[handle]
        return None

    def node(self, ref: Ref) -> Union[EntityNode, AttributeNode, LiteralNode]:
        handle = self.handle_of(ref)
        for partition in (self.entity_nodes, self.attribute_nodes, self.literal_nodes):
            if handle in partition:
                return partition[handle]
        raise UnknownNode(f"no node {handle}")

    def edge(self, ref: Ref) -> Union[EntityEdge, AttributeEdge, LiteralEdge]:
        handle = self.handle_of(ref)
        for partition in (self.entity_edges, self.attribute_edges, self.literal_edges):
            if handle in partition:
                return partition[handle]
        raise UnknownNode(f"no edge {handle}")

    def _entity(self, ref: Ref) -> EntityNode:
        handle = self.handle_of(ref)
        node = self.entity_nodes.get(handle)
        if node is None:
            raise UnknownNode(f"no entity node {handle}")
        return node

    def _attribute(self, ref: Ref) -> AttributeNode:
        handle = self.handle_of(ref)
        node = self.attribute_nodes.get(handle)
        if node is None:
            raise UnknownNode(f"no attribute node {handle}")
        return node

    def out_edges(self, ref: Ref) -> List[EntityEdge]:
        return [self.entity_edges[h] for h in self._out.get(self._entity(ref).handle, [])]

    def in_edges(self, ref: Ref) -> List[EntityEdge]:
        return [self.entity_edges[h] for h in self._in.get(self._entity(ref).handle, [])]

    def edges_between(self, start: Ref, end: Ref) -> List[EntityEdge]:
        end_handle = self.handle_of(end)
        return [edge for edge in self.out_edges(start) if edge.end == end_handle]

    def parent_edge(self, ref: Ref, kind: EntityEdgeKind) -> Optional[EntityEdge]:
        """The single outgoing edge of a Generalization/Aggregation/Composition kind"""
        for handle in self._out.get(self.handle_of(ref), []):
            edge = self.entity_edges[handle]
            if edge.kind is kind:
                return edge
        return None

    def parent_of(self, ref: Ref, kind: EntityEdgeKind = EntityEdgeKind.COMPOSITION) -> Optional[EntityNode]:
        edge = self.parent_edge(ref, kind)
        return self.entity_nodes[edge.end] if edge else None

    def weak_parts_of(self, ref: Ref) -> List[EntityNode]:
        """Entity nodes composed into this one"""
        handle = self.handle_of(ref)
        return [
            self.entity_nodes[self.entity_edges[h].start]
            for h in self._in.get(handle, [])
            if self.entity_edges[h].kind is EntityEdgeKind.COMPOSITION
        ]

    def is_weak(self, ref: Ref) -> bool:
        return self.parent_edge(ref, EntityEdgeKind.COMPOSITION) is not None

    def attributes_of(self, ref: Ref) -> List[AttributeNode]:
        entity = self._entity(ref)
        return [self.attribute_nodes[h] for h in self._attributes.get(entity.handle, {}).values()]

    def attribute_named(self, ref: Ref, label: str) -> Optional[AttributeNode]:
        handle = self._attributes.get(self.handle_of(ref), {}).get(label)
        return self.attribute_nodes[handle] if handle is not None else None

    def attribute_edge_of(self, ref: Ref) -> AttributeEdge:
        return self.attribute_edges[self._attribute_edge[self._attribute(ref).handle]]

    def literals_of(self, ref: Ref) -> List[LiteralNode]:
        attribute = self._attribute(ref)
        return [self.literal_nodes[h] for h in self._literals.get(attribute.handle, [])]

    def literal_edge_of(self, ref: Ref) -> LiteralEdge:
        handle = self.handle_of(ref)
        if handle not in self._literal_edge:
            raise UnknownNode(f"no literal node {handle}")
        return self.literal_edges[self._literal_edge[handle]]

    def literal_value(self, attribute: Ref, edge: Ref) -> Value:
        """Value stored behind a literal edge of an attribute node"""
        literal_edge = self.literal_edges.get(self.handle_of(edge))
        if literal_edge is None or literal_edge.start != self.handle_of(attribute):
            raise UnknownNode(f"no literal edge {self.handle_of(edge)} under attribute {self.handle_of(attribute)}")
        return self.literal_nodes[literal_edge.end].value

    def classes(self) -> List[str]:
        return sorted(label for label, members in self._classes.items() if members)

    def class_members(self, class_label: str) -> List[EntityNode]:
        return [self.entity_nodes[h] for h in self._classes.get(class_label, [])]

    def find_entities(self, class_label: str, identifiers: Optional[Dict[str, Value]] = None) -> List[EntityNode]:
        """Entity nodes of a class whose identifiers contain the given pairs"""
        wanted = {name: canonical_value(ensure_value(value)) for name, value in (identifiers or {}).items()}
        found = []
        for node in self.class_members(class_label):
            if all(
                name in node.identifiers and canonical_value(node.identifiers[name]) == canon
                for name, canon in wanted.items()
            ):
                found.append(node)
        return found

    def identity_key(self, ref: Ref) -> "identity.IdentityKey":
        return identity.identity_key(self, ref)

    def iter_nodes(self) -> Iterator[int]:
        yield from self.entity_nodes
        yield from self.attribute_nodes
        yield from self.literal_nodes

    def iter_edges(self) -> Iterator[int]:
        yield from self.entity_edges
        yield from self.attribute_edges
        yield from self.literal_edges

    @property
    def node_count(self) -> int:
        return len(self.entity_nodes) + len(self.attribute_nodes) + len(self.literal_nodes)

    @property
    def edge_count(self) -> int:
        return len(self.entity_edges) + len(self.attribute_edges) + len(self.literal_edges)

    def is_empty(self) -> bool:
        return self.node_count == 0

    def counts(self) -> Dict[str, int]:
        return {
            "entities": len(self.entity_nodes),
            "attributes": len(self.attribute_nodes),
            "literals": len(self.literal_nodes),
            "entity_edges": len(self.entity_edges),
            "attribute_edges": len(self.attribute_edges),
            "literal_edges": len(self.literal_edges),
        }

    def __repr__(self) -> str:
        counts = " ".join(f"{name}={count}" for name, count in self.counts().items())
        return f"<GradGraph {'strict' if self.strict else 'lax'} {counts}>"

    # ------------------------------------------------------------------
    # Mutation
    # ------------------------------------------------------------------

    def _new_handle(self) -> int:
        handle = self._next_handle
        self._next_handle += 1
        return handle

    def add_entity_node(self, class_label: str, identifiers: Dict[str, Any]) -> EntityNode:
        """Add an entity node labelled with its class and identifier map"""
        if not isinstance(class_label, str) or not class_label:
            raise EmptyLabel("entity nodes need a non-empty class label")
        if not identifiers:
            raise EmptyIdentifier(f"{class_label} node needs at least one identifier")

        checked: Dict[str, Value] = {}
        for name, value in identifiers.items():
            if not isinstance(name, str) or not name:
                raise EmptyIdentifier(f"{class_label} node has an unnamed identifier")
            checked[name] = ensure_value(value)

        if self.strict:
            key = identity.strong_key(class_label, checked)
            for other in self.class_members(class_label):
                if not self.is_weak(other) and identity.entity_key(self, other.handle) == key:
                    raise DuplicateIdentity(f"{key} already exists")

        node = EntityNode(self._new_handle(), class_label, checked)
        self.entity_nodes[node.handle] = node
        self._out[node.handle] = []
        self._in[node.handle] = []
        self._attributes[node.handle] = {}
        self._classes.setdefault(class_label, []).append(node.handle)
        return node

    def add_entity_edge(
        self,
        start: Ref,
        end: Ref,
        kind: Union[EntityEdgeKind, str],
        label: str,
        attributes: Optional[Dict[str, Any]] = None,
    ) -> EntityEdge:
        """Add a typed, labelled entity edge between two entity nodes"""
        start_node = self._entity(start)
        end_node = self._entity(end)
        kind = EntityEdgeKind(kind)
        if not isinstance(label, str) or not label:
            raise EmptyLabel("entity edges need a non-empty label")

        if kind.is_parent_kind and self.parent_edge(start_node.handle, kind) is not None:
            raise DuplicateParentEdge(f"node {start_node.handle} already has an outgoing {kind.value} edge")
        if any(edge.label == label for edge in self.edges_between(start_node.handle, end_node.handle)):
            raise DuplicateEdgeLabelPair(f"a {label} edge already links {start_node.handle} to {end_node.handle}")

        checked = {name: ensure_value(value) for name, value in (attributes or {}).items()}
        edge = EntityEdge(self._new_handle(), start_node.handle, end_node.handle, kind, label, checked)
        self.entity_edges[edge.handle] = edge
        self._out[start_node.handle].append(edge.handle)
        self._in[end_node.handle].append(edge.handle)

        if self.strict and kind is EntityEdgeKind.COMPOSITION:
            try:
                key = identity.entity_key(self, start_node.handle)
                clash = any(
                    other.handle != start_node.handle and identity.safe_entity_key(self, other.handle) == key
                    for other in self.class_members(start_node.class_label)
                )
            except Exception:
                self._drop_entity_edge(edge.handle)
                raise
            if clash:
                self._drop_entity_edge(edge.handle)
                raise DuplicateIdentity(f"{key} already exists")

        return edge

    def add_attribute(self, entity: Ref, label: str) -> AttributeNode:
        """Attach an attribute node to an entity node; idempotent per label"""
        entity_node = self._entity(entity)
        if not isinstance(label, str) or not label:
            raise EmptyLabel("attribute nodes need a non-empty label")

        existing = self._attributes[entity_node.handle].get(label)
        if existing is not None:
            return self.attribute_nodes[existing]

        node = AttributeNode(self._new_handle(), label, entity_node.handle)
        edge = AttributeEdge(self._new_handle(), entity_node.handle, node.handle)
        self.attribute_nodes[node.handle] = node
        self.attribute_edges[edge.handle] = edge
        self._attributes[entity_node.handle][label] = node.handle
        self._attribute_edge[node.handle] = edge.handle
        self._literals[node.handle] = []
        return node

    def add_literal(self, attribute: Ref, value: Any, context: Optional[Dict[str, Any]] = None) -> LiteralNode:
        """Store one value of an attribute behind a context-carrying literal edge"""
        return self._add_literal(attribute, value, context, warn=True)

    def _add_literal(self, attribute: Ref, value: Any, context: Optional[Dict[str, Any]], warn: bool) -> LiteralNode:
        attribute_node = self._attribute(attribute)
        value = ensure_value(value)

        checked: Dict[str, Value] = {}
        for name, item in (context or {}).items():
            item = ensure_value(item)
            if not is_scalar(item):
                raise CompositeContextValue(f"context value {name} of {attribute_node.label} is composite")
            checked[name] = item

        if warn:
            signature = identity.context_set(checked)
            for sibling in self._literals[attribute_node.handle]:
                sibling_edge = self.literal_edges[self._literal_edge[sibling]]
                if identity.context_set(sibling_edge.context) == signature:
                    logger.warning(
                        f"DuplicateContext: attribute {attribute_node.label} of node {attribute_node.parent} "
                        f"already has a literal with context {checked}"
                    )
                    break

        node = LiteralNode(self._new_handle(), value, attribute_node.handle)
        edge = LiteralEdge(self._new_handle(), attribute_node.handle, node.handle, checked)
        self.literal_nodes[node.handle] = node
        self.literal_edges[edge.handle] = edge
        self._literals[attribute_node.handle].append(node.handle)
        self._literal_edge[node.handle] = edge.handle
        return node

    def remove_node(self, ref: Ref) -> int:
        """Remove a node with the cascade rules; returns the number of removed elements"""
        handle = self.handle_of(ref)

        if handle in self.entity_nodes:
            doomed = self._composition_closure(handle)
            removed = 0
            for entity in doomed:
                for edge in list(self._out[entity]) + list(self._in[entity]):
                    if edge in self.entity_edges:
                        removed += self._drop_entity_edge(edge)
            for entity in doomed:
                for attribute in list(self._attributes[entity].values()):
                    removed += self._drop_attribute(attribute)
                removed += self._drop_entity(entity)
            return removed

        if handle in self.attribute_nodes:
            return self._drop_attribute(handle)

        if handle in self.literal_nodes:
            return self._drop_literal(handle)

        if self.element(handle) is not None:
            raise UnsupportedElement(f"element {handle} is an edge; use remove_edge")
        raise UnknownNode(f"no node {handle}")

    def remove_edge(self, ref: Ref) -> int:
        """Remove one entity edge"""
        handle = self.handle_of(ref)
        if handle in self.entity_edges:
            return self._drop_entity_edge(handle)
        if handle in self.attribute_edges or handle in self.literal_edges:
            raise UnsupportedElement(f"edge {handle} is removed with its attribute or literal node")
        raise UnknownNode(f"no entity edge {handle}")

    def _composition_closure(self, handle: int) -> List[int]:
        """The entity node and every weak part reachable over incoming Composition edges"""
        seen: Set[int] = {handle}
        order = [handle]
        queue = deque([handle])
        while queue:
            current = queue.popleft()
            for part in self.weak_parts_of(current):
                if part.handle not in seen:
                    seen.add(part.handle)
                    order.append(part.handle)
                    queue.append(part.handle)
        return order

    def _drop_entity_edge(self, handle: int) -> int:
        edge = self.entity_edges.pop(handle)
        self._out[edge.start].remove(handle)
        self._in[edge.end].remove(handle)
        return 1

    def _drop_literal(self, handle: int) -> int:
        literal = self.literal_nodes.pop(handle)
        edge = self._literal_edge.pop(handle)
        del self.literal_edges[edge]
        self._literals[literal.parent].remove(handle)
        return 2

    def _drop_attribute(self, handle: int) -> int:
        attribute = self.attribute_nodes[handle]
        removed = 0
        for literal in list(self._literals[handle]):
            removed += self._drop_literal(literal)
        del self.attribute_nodes[handle]
        del self.attribute_edges[self._attribute_edge.pop(handle)]
        del self._literals[handle]
        del self._attributes[attribute.parent][attribute.label]
        return removed + 2

    def _drop_entity(self, handle: int) -> int:
        node = self.entity_nodes.pop(handle)
        del self._out[handle]
        del self._in[handle]
        del self._attributes[handle]
        self._classes[node.class_label].remove(handle)
        return 1

    def _replace_identifiers(self, ref: Ref, identifiers: Dict[str, Value]) -> EntityNode:
        """Swap the identifier map of a node being unified by a merge"""
        node = self._entity(ref)
        replacement = EntityNode(node.handle, node.class_label, dict(identifiers))
        self.entity_nodes[node.handle] = replacement
        return replacement

    def _replace_edge_attributes(self, ref: Ref, attributes: Dict[str, Value]) -> EntityEdge:
        handle = self.handle_of(ref)
        edge = self.entity_edges[handle]
        replacement = EntityEdge(edge.handle, edge.start, edge.end, edge.kind, edge.label, dict(attributes))
        self.entity_edges[handle] = replacement
        return replacement

    # ------------------------------------------------------------------
    # Views and copies
    # ------------------------------------------------------------------

    def hypernode_of(self, entity: Ref) -> Hypernode:
        """Induced two-level tree of an entity node"""
        root = self._entity(entity)
        hypernode = Hypernode(root=root)
        for attribute in self.attributes_of(root.handle):
            hypernode.attribute_nodes.append(attribute)
            hypernode.attribute_edges.append(self.attribute_edge_of(attribute.handle))
            for literal in self.literals_of(attribute.handle):
                hypernode.literal_nodes.append(literal)
                hypernode.literal_edges.append(self.literal_edge_of(literal.handle))
        return hypernode

    def hypernode_root(self, ref: Ref) -> int:
        """Root entity of the hypernode containing a node or attribute/literal edge"""
        handle = self.handle_of(ref)
        if handle in self.entity_nodes:
            return handle
        if handle in self.attribute_nodes:
            return self.attribute_nodes[handle].parent
        if handle in self.literal_nodes:
            return self.attribute_nodes[self.literal_nodes[handle].parent].parent
        if handle in self.attribute_edges:
            return self.attribute_edges[handle].start
        if handle in self.literal_edges:
            return self.hypernode_root(self.literal_edges[handle].start)
        raise UnsupportedElement(f"element {handle} belongs to no hypernode")

    def import_graph(self, source: "GradGraph", only: Optional[Iterable[int]] = None) -> Dict[int, int]:
        """Copy elements of ``source`` into this graph under fresh handles.

        With ``only``, just those elements are copied; callers must pass a
        closed selection (edge endpoints and node parents included).
        """
        selected = None if only is None else set(only)

        def wanted(handle: int) -> bool:
            return selected is None or handle in selected

        # Weak nodes only get their final key once edges are in place
        strict, self.strict = self.strict, False
        try:
            return self._import(source, wanted)
        finally:
            self.strict = strict

    def _import(self, source: "GradGraph", wanted) -> Dict[int, int]:
        mapping: Dict[int, int] = {}
        for handle, node in source.entity_nodes.items():
            if wanted(handle):
                mapping[handle] = self.add_entity_node(node.class_label, node.identifiers).handle
        for handle, edge in source.entity_edges.items():
            if wanted(handle):
                copied = self.add_entity_edge(
                    mapping[edge.start], mapping[edge.end], edge.kind, edge.label, edge.attributes
                )
                mapping[handle] = copied.handle
        for handle, node in source.attribute_nodes.items():
            if wanted(handle):
                copied = self.add_attribute(mapping[node.parent], node.label)
                mapping[handle] = copied.handle
                mapping[source._attribute_edge[handle]] = self._attribute_edge[copied.handle]
        for handle, node in source.literal_nodes.items():
            if wanted(handle):
                edge = source.literal_edge_of(handle)
                copied = self._add_literal(mapping[node.parent], node.value, edge.context, warn=False)
                mapping[handle] = copied.handle
                mapping[edge.handle] = self._literal_edge[copied.handle]
        return mapping

    def copy(self) -> "GradGraph":
        clone = GradGraph(strict=self.strict)
        clone.import_graph(self)
        return clone
