from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from gradb.models.elements import EntityEdgeKind
from gradb.models.values import ComparisonOp, ensure_value


class NodeKind(str, Enum):
    ENTITY = "entity"
    ATTRIBUTE = "attribute"
    LITERAL = "literal"


class EdgeKind(str, Enum):
    ENTITY = "entity"
    ATTRIBUTE = "attribute"
    LITERAL = "literal"


class PredicateTarget(str, Enum):
    IDENTIFIER = "id"
    LITERAL_VALUE = "value"
    EDGE_ATTRIBUTE = "attr"
    NODE_LABEL = "label"
    EDGE_LABEL = "elabel"

    @property
    def is_named(self) -> bool:
        return self in (PredicateTarget.IDENTIFIER, PredicateTarget.EDGE_ATTRIBUTE)

    @property
    def is_label(self) -> bool:
        return self in (PredicateTarget.NODE_LABEL, PredicateTarget.EDGE_LABEL)


class AtomicPredicate(BaseModel):
    """One ``target op constant`` test; a pattern element holds a conjunction of them"""

    target: PredicateTarget
    name: Optional[str] = None
    op: ComparisonOp = ComparisonOp.EQ
    constant: Any

    @field_validator("op", mode="before")
    @classmethod
    def parse_op(cls, v):
        return ComparisonOp.parse(v) if isinstance(v, str) else v

    @field_validator("constant")
    @classmethod
    def check_constant(cls, v):
        return ensure_value(v)

    @classmethod
    def label(cls, value: str, op: str = "=") -> "AtomicPredicate":
        return cls(target=PredicateTarget.NODE_LABEL, op=op, constant=value)

    @classmethod
    def edge_label(cls, value: str, op: str = "=") -> "AtomicPredicate":
        return cls(target=PredicateTarget.EDGE_LABEL, op=op, constant=value)

    @classmethod
    def identifier(cls, name: str, op: str, value: Any) -> "AtomicPredicate":
        return cls(target=PredicateTarget.IDENTIFIER, name=name, op=op, constant=value)

    @classmethod
    def value(cls, op: str, value: Any) -> "AtomicPredicate":
        return cls(target=PredicateTarget.LITERAL_VALUE, op=op, constant=value)

    @classmethod
    def attribute(cls, name: str, op: str, value: Any) -> "AtomicPredicate":
        return cls(target=PredicateTarget.EDGE_ATTRIBUTE, name=name, op=op, constant=value)


class PatternNode(BaseModel):
    var: str
    kind: NodeKind
    predicates: List[AtomicPredicate] = Field(default_factory=list)

    def label_constant(self) -> Optional[str]:
        """Label required by an equality label predicate, if any"""
        for predicate in self.predicates:
            if predicate.target is PredicateTarget.NODE_LABEL and predicate.op is ComparisonOp.EQ:
                return predicate.constant
        return None


class PatternEdge(BaseModel):
    start_var: str
    end_var: str
    kind: EdgeKind = EdgeKind.ENTITY
    entity_kind: Optional[EntityEdgeKind] = None
    predicates: List[AtomicPredicate] = Field(default_factory=list)
    var: Optional[str] = None

    @model_validator(mode="after")
    def check_entity_kind(self) -> "PatternEdge":
        if self.entity_kind is not None and self.kind is not EdgeKind.ENTITY:
            raise ValueError(f"{self.kind.value} edges take no entity edge kind")
        return self


class GraphPattern(BaseModel):
    """Topology plus conjunctive predicates"""

    nodes: List[PatternNode] = Field(default_factory=list)
    edges: List[PatternEdge] = Field(default_factory=list)

    @property
    def node_vars(self) -> List[str]:
        return [node.var for node in self.nodes]

    def edge_vars(self) -> List[str]:
        """Binding names of the edges; unnamed edges bind as ``start>end`` (``#n`` on repeats)"""
        names: List[str] = []
        seen: Dict[str, int] = {}
        for edge in self.edges:
            if edge.var:
                names.append(edge.var)
                continue
            base = f"{edge.start_var}>{edge.end_var}"
            seen[base] = seen.get(base, 0) + 1
            names.append(base if seen[base] == 1 else f"{base}#{seen[base]}")
        return names

    @property
    def variables(self) -> List[str]:
        return self.node_vars + self.edge_vars()

    def node(self, var: str) -> Optional[PatternNode]:
        for node in self.nodes:
            if node.var == var:
                return node
        return None

    def is_empty(self) -> bool:
        return not self.nodes and not self.edges


class PatternIssue(BaseModel):
    """One reason a pattern is not a valid GRAD pattern"""

    rule: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.subject}: {self.message}"
