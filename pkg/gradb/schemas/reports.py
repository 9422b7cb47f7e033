from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class Severity(str, Enum):
    ERROR = "Error"
    WARNING = "Warning"


class ViolationRule(str, Enum):
    DUPLICATE_ENTITY_IDENTITY = "DuplicateEntityIdentity"
    DUPLICATE_EDGE_IDENTITY = "DuplicateEdgeIdentity"
    DUPLICATE_ATTRIBUTE_IDENTITY = "DuplicateAttributeIdentity"
    EDGE_LABEL_CLASS_CONFLICT = "EdgeLabelClassConflict"
    PARENT_EDGE_CARDINALITY = "ParentEdgeCardinality"
    COMPOSITION_CYCLE = "CompositionCycle"
    GENERALIZATION_CYCLE = "GeneralizationCycle"
    AGGREGATION_CYCLE = "AggregationCycle"
    DANGLING_REFERENCE = "DanglingReference"
    SINGLE_PARENT_VIOLATION = "SingleParentViolation"
    ASSERTION_FAILED = "AssertionFailed"
    MULTIPLICITY_FAILED = "MultiplicityFailed"
    DUPLICATE_LITERAL_CONTEXT = "DuplicateLiteralContext"


class Violation(BaseModel):
    rule: ViolationRule
    severity: Severity = Severity.ERROR
    elements: List[str]
    handles: List[int] = Field(default_factory=list)
    name: Optional[str] = None
    detail: str = ""

    def sort_key(self):
        return (
            0 if self.severity is Severity.ERROR else 1,
            self.rule.value,
            self.elements,
            self.name or "",
            self.detail,
        )

    def to_line(self) -> str:
        """``severity<TAB>rule<TAB>elements`` with an optional detail column"""
        line = f"{self.severity.value}\t{self.rule.value}\t{';'.join(self.elements)}"
        detail = " ".join(part for part in (self.name, self.detail) if part)
        return f"{line}\t{detail}" if detail else line


class ValidationReport(BaseModel):
    violations: List[Violation] = Field(default_factory=list)

    @property
    def error_count(self) -> int:
        return sum(1 for v in self.violations if v.severity is Severity.ERROR)

    @property
    def warning_count(self) -> int:
        return sum(1 for v in self.violations if v.severity is Severity.WARNING)

    @property
    def ok(self) -> bool:
        return self.error_count == 0

    def rules(self) -> List[str]:
        return [v.rule.value for v in self.violations]

    def to_lines(self) -> List[str]:
        return [v.to_line() for v in self.violations]

    def summary(self) -> str:
        return f"errors={self.error_count} warnings={self.warning_count}"


class GraphStats(BaseModel):
    entities: int
    attributes: int
    literals: int
    entity_edges: int
    attribute_edges: int
    literal_edges: int
    classes: Dict[str, int] = Field(default_factory=dict)

    def to_lines(self) -> List[str]:
        head = (
            f"entities={self.entities} attributes={self.attributes} literals={self.literals} "
            f"entity_edges={self.entity_edges} attribute_edges={self.attribute_edges} "
            f"literal_edges={self.literal_edges} classes={len(self.classes)}"
        )
        return [head] + [f"{label}\t{count}" for label, count in sorted(self.classes.items())]

    @classmethod
    def of(cls, graph) -> "GraphStats":
        counts = graph.counts()
        return cls(
            **counts,
            classes={label: len(graph.class_members(label)) for label in graph.classes()},
        )
