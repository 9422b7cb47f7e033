from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from gradb.models.elements import EntityEdgeKind
from gradb.models.values import ensure_value


class MergeRule(BaseModel):
    """Two entity nodes merge when they share a class and agree on ``match_on``"""

    class_label: str
    match_on: List[str]

    @field_validator("match_on")
    @classmethod
    def check_match_on(cls, v):
        if not v:
            raise ValueError("a merge rule needs at least one identifier name")
        return sorted(set(v))


class JoinPredicate(BaseModel):
    rules: List[MergeRule] = Field(default_factory=list)

    def rule_for(self, class_label: str) -> Optional[MergeRule]:
        for rule in self.rules:
            if rule.class_label == class_label:
                return rule
        return None


class TemplateValue(BaseModel):
    """Either a constant Value or a ``${var.field}`` slot"""

    constant: Any = None
    var: Optional[str] = None
    field: Optional[str] = None

    @model_validator(mode="after")
    def check_form(self) -> "TemplateValue":
        if self.var is None:
            if self.constant is None:
                raise ValueError("template value needs a constant or a slot")
            self.constant = ensure_value(self.constant)
        elif not self.field:
            raise ValueError(f"slot on {self.var} needs a field")
        return self

    @property
    def is_slot(self) -> bool:
        return self.var is not None

    @classmethod
    def of(cls, constant: Any) -> "TemplateValue":
        return cls(constant=constant)

    @classmethod
    def slot(cls, var: str, field: str) -> "TemplateValue":
        return cls(var=var, field=field)


class TemplateEntity(BaseModel):
    var: str
    class_label: TemplateValue
    identifiers: Dict[str, TemplateValue]


class TemplateAttribute(BaseModel):
    var: str
    entity_var: str
    label: TemplateValue


class TemplateLiteral(BaseModel):
    var: str
    attribute_var: str
    value: TemplateValue
    context: Dict[str, TemplateValue] = Field(default_factory=dict)


class TemplateEdge(BaseModel):
    start_var: str
    end_var: str
    kind: EntityEdgeKind = EntityEdgeKind.ASSOCIATION
    label: TemplateValue
    attributes: Dict[str, TemplateValue] = Field(default_factory=dict)


class GraphTemplate(BaseModel):
    """GRAD-shaped fragment instantiated once per match by composition"""

    entities: List[TemplateEntity] = Field(default_factory=list)
    attributes: List[TemplateAttribute] = Field(default_factory=list)
    literals: List[TemplateLiteral] = Field(default_factory=list)
    edges: List[TemplateEdge] = Field(default_factory=list)

    def values(self) -> List[TemplateValue]:
        found: List[TemplateValue] = []
        for entity in self.entities:
            found.append(entity.class_label)
            found.extend(entity.identifiers.values())
        for attribute in self.attributes:
            found.append(attribute.label)
        for literal in self.literals:
            found.append(literal.value)
            found.extend(literal.context.values())
        for edge in self.edges:
            found.append(edge.label)
            found.extend(edge.attributes.values())
        return found

    def slot_vars(self) -> List[str]:
        return sorted({value.var for value in self.values() if value.is_slot})
