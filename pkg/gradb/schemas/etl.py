from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from gradb.models.elements import EntityEdgeKind
from gradb.models.values import ensure_value
from gradb.schemas.algebra import JoinPredicate, MergeRule


class ColumnType(str, Enum):
    STR = "str"
    INT = "int"
    FLOAT = "float"
    BOOL = "bool"


class ValueColumn(BaseModel):
    """A table column read as a typed Value; ``name`` defaults to the column name"""

    column: str
    name: Optional[str] = None
    type: ColumnType = ColumnType.STR

    @property
    def target_name(self) -> str:
        return self.name or self.column


class AttributeColumn(BaseModel):
    """A column whose cells become literals of one attribute node.

    The literal-edge context is built from ``context`` constants plus
    ``context_columns`` (context name -> column).
    """

    column: str
    label: Optional[str] = None
    type: ColumnType = ColumnType.STR
    context: Dict[str, Any] = Field(default_factory=dict)
    context_columns: Dict[str, str] = Field(default_factory=dict)

    @field_validator("context")
    @classmethod
    def check_context(cls, v):
        return {name: ensure_value(value) for name, value in v.items()}

    @property
    def target_label(self) -> str:
        return self.label or self.column


class EndpointLookup(BaseModel):
    """Finds (or stubs) the entity node of ``class_label`` identified by ``columns``"""

    class_label: str
    columns: List[ValueColumn]

    @field_validator("columns")
    @classmethod
    def check_columns(cls, v):
        if not v:
            raise ValueError("an endpoint lookup needs at least one column")
        return v


class EdgeMapping(BaseModel):
    label: str
    kind: EntityEdgeKind = EntityEdgeKind.ASSOCIATION
    # None means the row's own entity
    start: Optional[EndpointLookup] = None
    end: Optional[EndpointLookup] = None
    attributes: List[ValueColumn] = Field(default_factory=list)


class TableMapping(BaseModel):
    source: str
    class_label: Optional[str] = None
    id_columns: List[ValueColumn] = Field(default_factory=list)
    attributes: List[AttributeColumn] = Field(default_factory=list)
    edges: List[EdgeMapping] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_row_entity(self) -> "TableMapping":
        if self.class_label is not None and not self.id_columns:
            raise ValueError(f"table {self.source}: class {self.class_label} needs id_columns")
        if self.class_label is None:
            if self.id_columns or self.attributes:
                raise ValueError(f"table {self.source}: id_columns and attributes need a class_label")
            if any(edge.start is None or edge.end is None for edge in self.edges):
                raise ValueError(f"table {self.source}: edges without a lookup need a class_label")
        return self

    def columns(self) -> List[str]:
        """Every column the mapping reads"""
        names = [column.column for column in self.id_columns]
        for attribute in self.attributes:
            names.append(attribute.column)
            names.extend(attribute.context_columns.values())
        for edge in self.edges:
            for lookup in (edge.start, edge.end):
                if lookup is not None:
                    names.extend(column.column for column in lookup.columns)
            names.extend(column.column for column in edge.attributes)
        return list(dict.fromkeys(names))


class EtlMapping(BaseModel):
    delimiter: Optional[str] = None
    merge_keys: Dict[str, List[str]] = Field(default_factory=dict)
    tables: List[TableMapping] = Field(default_factory=list)

    def join_predicate(self) -> JoinPredicate:
        return JoinPredicate(
            rules=[MergeRule(class_label=label, match_on=names) for label, names in sorted(self.merge_keys.items())]
        )
