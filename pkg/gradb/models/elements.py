from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List

from gradb.models.values import Value


class EntityEdgeKind(str, Enum):
    ASSOCIATION = "association"
    GENERALIZATION = "generalization"
    AGGREGATION = "aggregation"
    COMPOSITION = "composition"

    @property
    def is_parent_kind(self) -> bool:
        """Kinds restricted to one outgoing edge per entity node"""
        return self is not EntityEdgeKind.ASSOCIATION


PARENT_KINDS = (
    EntityEdgeKind.GENERALIZATION,
    EntityEdgeKind.AGGREGATION,
    EntityEdgeKind.COMPOSITION,
)


class ElementType(str, Enum):
    ENTITY_NODE = "entity_node"
    ATTRIBUTE_NODE = "attribute_node"
    LITERAL_NODE = "literal_node"
    ENTITY_EDGE = "entity_edge"
    ATTRIBUTE_EDGE = "attribute_edge"
    LITERAL_EDGE = "literal_edge"


@dataclass(frozen=True)
class EntityNode:
    handle: int
    class_label: str
    identifiers: Dict[str, Value]

    element_type = ElementType.ENTITY_NODE


@dataclass(frozen=True)
class AttributeNode:
    handle: int
    label: str
    parent: int

    element_type = ElementType.ATTRIBUTE_NODE


@dataclass(frozen=True)
class LiteralNode:
    handle: int
    value: Value
    parent: int

    element_type = ElementType.LITERAL_NODE


@dataclass(frozen=True)
class EntityEdge:
    handle: int
    start: int
    end: int
    kind: EntityEdgeKind
    label: str
    attributes: Dict[str, Value] = field(default_factory=dict)

    element_type = ElementType.ENTITY_EDGE


@dataclass(frozen=True)
class AttributeEdge:
    handle: int
    start: int
    end: int

    element_type = ElementType.ATTRIBUTE_EDGE


@dataclass(frozen=True)
class LiteralEdge:
    handle: int
    start: int
    end: int
    context: Dict[str, Value] = field(default_factory=dict)

    element_type = ElementType.LITERAL_EDGE


@dataclass
class Hypernode:
    """Two-level tree of one entity node with its attribute and literal nodes"""

    root: EntityNode
    attribute_nodes: List[AttributeNode] = field(default_factory=list)
    literal_nodes: List[LiteralNode] = field(default_factory=list)
    attribute_edges: List[AttributeEdge] = field(default_factory=list)
    literal_edges: List[LiteralEdge] = field(default_factory=list)

    @property
    def node_handles(self) -> List[int]:
        return [self.root.handle] + [a.handle for a in self.attribute_nodes] + [l.handle for l in self.literal_nodes]

    @property
    def edge_handles(self) -> List[int]:
        return [e.handle for e in self.attribute_edges] + [e.handle for e in self.literal_edges]

    def __contains__(self, handle: int) -> bool:
        return handle in self.node_handles or handle in self.edge_handles

    def __len__(self) -> int:
        return len(self.node_handles) + len(self.edge_handles)
