from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

from gradb.models.elements import EntityEdgeKind


class PropertyNode(BaseModel):
    id: str
    label: str
    properties: Dict[str, Any] = Field(default_factory=dict)
    # Properties that identify the node; others become attributes
    keys: Optional[List[str]] = None


class PropertyEdge(BaseModel):
    start: str
    end: str
    label: str
    properties: Dict[str, Any] = Field(default_factory=dict)
    kind: EntityEdgeKind = EntityEdgeKind.ASSOCIATION


class PropertyGraph(BaseModel):
    """A plain labeled property graph as exchanged in JSON"""

    nodes: List[PropertyNode] = Field(default_factory=list)
    edges: List[PropertyEdge] = Field(default_factory=list)
    # Per-label identifier properties, used for nodes without their own ``keys``
    identifier_keys: Dict[str, List[str]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_references(self) -> "PropertyGraph":
        ids = set()
        for node in self.nodes:
            if node.id in ids:
                raise ValueError(f"node id {node.id} appears twice")
            ids.add(node.id)
        for edge in self.edges:
            for end in (edge.start, edge.end):
                if end not in ids:
                    raise ValueError(f"edge {edge.label} references unknown node {end}")
        return self

    def keys_for(self, node: PropertyNode) -> Optional[List[str]]:
        if node.keys is not None:
            return node.keys
        return self.identifier_keys.get(node.label)
