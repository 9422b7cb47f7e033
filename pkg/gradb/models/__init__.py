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
from gradb.models.graph import GradGraph
from gradb.models.identity import IdentityKey, identity_key, literal_key
from gradb.models.values import ComparisonOp, Value, compare_values

__all__ = [
    "AttributeEdge",
    "AttributeNode",
    "ComparisonOp",
    "EntityEdge",
    "EntityEdgeKind",
    "EntityNode",
    "GradGraph",
    "Hypernode",
    "IdentityKey",
    "LiteralEdge",
    "LiteralNode",
    "Value",
    "compare_values",
    "identity_key",
    "literal_key",
]
