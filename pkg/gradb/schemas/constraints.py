from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from gradb.models.elements import EntityEdgeKind
from gradb.schemas.pattern import GraphPattern, NodeKind


class Assertion(BaseModel):
    """A pattern that every entity node of the anchored classes must embed into"""

    name: str
    pattern: GraphPattern
    anchor_vars: List[str]

    @model_validator(mode="after")
    def check_anchors(self) -> "Assertion":
        if not self.anchor_vars:
            raise ValueError(f"assertion {self.name} needs at least one anchor variable")
        for var in self.anchor_vars:
            node = self.pattern.node(var)
            if node is None or node.kind is not NodeKind.ENTITY:
                raise ValueError(f"anchor {var} of assertion {self.name} is not an entity pattern node")
            if node.label_constant() is None:
                raise ValueError(f"anchor {var} of assertion {self.name} has no label = predicate")
        return self

    def anchored_classes(self) -> List[str]:
        return [self.pattern.node(var).label_constant() for var in self.anchor_vars]


class Range(BaseModel):
    min: int = 0
    max: Optional[int] = None  # None is unbounded

    @model_validator(mode="after")
    def check_bounds(self) -> "Range":
        if self.min < 0:
            raise ValueError("range minimum is negative")
        if self.max is not None and self.max < self.min:
            raise ValueError(f"range maximum {self.max} is below minimum {self.min}")
        return self

    def contains(self, count: int) -> bool:
        return count >= self.min and (self.max is None or count <= self.max)

    def __str__(self) -> str:
        upper = "*" if self.max is None else str(self.max)
        if self.min == 0 and self.max is None:
            return "[*]"
        if self.max is not None and self.min == self.max:
            return f"[{self.min}]"
        return f"[{self.min}..{upper}]"


class Multiplicity(BaseModel):
    """Edge-count bounds between two classes through one edge label"""

    source_class: str
    edge_label: str
    target_class: str
    forward_range: Range = Field(default_factory=Range)
    backward_range: Range = Field(default_factory=Range)
    edge_kind: Optional[EntityEdgeKind] = None

    def __str__(self) -> str:
        text = f"{self.source_class} {self.edge_label} {self.target_class} {self.forward_range} {self.backward_range}"
        return f"{text} {self.edge_kind.value}" if self.edge_kind else text


class ConstraintSet(BaseModel):
    assertions: List[Assertion] = Field(default_factory=list)
    multiplicities: List[Multiplicity] = Field(default_factory=list)
