"""Table-to-graph loader.

Every row of a mapped table becomes a small fragment graph (the row's entity,
its attribute literals and the edges the mapping derives), which is then
folded into the accumulating graph with the join merge engine. Repeated rows
about one real-world entity therefore land in one hypernode.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import pandas as pd
from pydantic import ValidationError

from gradb.core.config import settings
from gradb.core.exceptions import GradError, MappingError, TypeCoercionError
from gradb.models.graph import GradGraph
from gradb.models.identity import sort_key
from gradb.models.values import Value
from gradb.schemas.etl import AttributeColumn, ColumnType, EdgeMapping, EndpointLookup, EtlMapping, TableMapping, ValueColumn
from gradb.services.merger import GraphMerger

logger = logging.getLogger(__name__)

TRUE_WORDS = {"true", "t", "yes", "y", "1"}
FALSE_WORDS = {"false", "f", "no", "n", "0"}


@dataclass
class SourceTable:
    """A named table of string cells"""

    name: str
    frame: pd.DataFrame = field(default_factory=pd.DataFrame)

    @property
    def columns(self) -> List[str]:
        return [str(column) for column in self.frame.columns]

    def __len__(self) -> int:
        return len(self.frame)


def read_table(path: Union[str, Path], delimiter: Optional[str] = None, name: Optional[str] = None) -> SourceTable:
    """Read a delimited text table with every cell kept as a string"""
    path = Path(path)
    sep = delimiter or settings.TABLE_DELIMITER
    try:
        frame = pd.read_csv(path, sep=sep, dtype=str, keep_default_na=False, encoding=settings.FILE_ENCODING)
    except pd.errors.EmptyDataError:
        frame = pd.DataFrame()
    except FileNotFoundError:
        raise MappingError(f"table not found: {path}")
    except OSError as e:
        raise MappingError(f"cannot read table {path}: {e}")
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise MappingError(f"{path}: {e}")
    frame.columns = [str(column).strip() for column in frame.columns]
    logger.info(f"Read table {path} ({len(frame)} rows, {len(frame.columns)} columns)")
    return SourceTable(name=name or path.name, frame=frame)


def load_mapping(path: Union[str, Path]) -> EtlMapping:
    path = Path(path)
    try:
        return EtlMapping.model_validate(json.loads(path.read_text(encoding=settings.FILE_ENCODING)))
    except FileNotFoundError:
        raise MappingError(f"mapping file not found: {path}")
    except (OSError, UnicodeDecodeError) as e:
        raise MappingError(f"cannot read mapping {path}: {e}")
    except json.JSONDecodeError as e:
        raise MappingError(f"{path}: line {e.lineno}: {e.msg}")
    except ValidationError as e:
        raise MappingError(f"{path}: {e}")


def is_empty_cell(cell: Any) -> bool:
    if cell is None:
        return True
    if not isinstance(cell, str) and pd.isna(cell):
        return True
    return str(cell).strip() == ""


def coerce_cell(cell: Any, column_type: ColumnType, where: str) -> Value:
    """Convert one non-empty cell to the declared type"""
    text = str(cell).strip()
    try:
        if column_type is ColumnType.INT:
            return int(text)
        if column_type is ColumnType.FLOAT:
            return float(text)
    except ValueError:
        raise TypeCoercionError(f"{where}: cannot read {text!r} as {column_type.value}")
    if column_type is ColumnType.BOOL:
        if text.lower() in TRUE_WORDS:
            return True
        if text.lower() in FALSE_WORDS:
            return False
        raise TypeCoercionError(f"{where}: cannot read {text!r} as bool")
    return text


class TableLoader:
    """Folds mapped tables into one GRAD graph"""

    def __init__(self, mapping: EtlMapping, strict: Optional[bool] = None):
        self.mapping = mapping
        self.graph = GradGraph(strict=strict)
        self.merger = GraphMerger(self.graph, mapping.join_predicate(), identity_fallback=True)

    def load(self, tables: Iterable[SourceTable]) -> GradGraph:
        by_name: Dict[str, SourceTable] = {}
        for table in tables:
            by_name[table.name] = table
            by_name.setdefault(Path(table.name).stem, table)

        for table_mapping in self.mapping.tables:
            table = by_name.get(table_mapping.source) or by_name.get(Path(table_mapping.source).stem)
            if table is None:
                raise MappingError(f"no source table named {table_mapping.source}")
            self._load_table(table_mapping, table)

        counts = self.graph.counts()
        logger.info(
            f"ETL produced {counts['entities']} entities, {counts['attributes']} attributes, "
            f"{counts['literals']} literals"
        )
        return self.graph

    def _load_table(self, table_mapping: TableMapping, table: SourceTable) -> None:
        missing = [column for column in table_mapping.columns() if column not in table.columns]
        if missing and len(table):
            raise MappingError(f"table {table.name} lacks column(s) {', '.join(missing)}")

        for number, row in enumerate(table.frame.to_dict(orient="records")):
            # header is line 1
            where = f"table {table.name} line {number + 2}"
            fragment, preset = self._fragment(table_mapping, row, where)
            try:
                self.merger.merge(fragment, preset)
            except GradError as e:
                logger.error(f"Error merging {where}: {e}")
                raise MappingError(f"{where}: {e.code}: {e.message}")
        logger.info(f"Loaded table {table.name} ({len(table)} rows)")

    def _values(self, columns: List[ValueColumn], row: Dict[str, Any], where: str, required: bool) -> Optional[Dict[str, Value]]:
        values: Dict[str, Value] = {}
        for column in columns:
            cell = row.get(column.column)
            if is_empty_cell(cell):
                if required:
                    return None
                continue
            values[column.target_name] = coerce_cell(cell, column.type, f"{where} column {column.column}")
        return values

    def _context(self, attribute: AttributeColumn, row: Dict[str, Any], where: str) -> Dict[str, Value]:
        context = dict(attribute.context)
        for name, column in attribute.context_columns.items():
            cell = row.get(column)
            if not is_empty_cell(cell):
                context[name] = str(cell).strip()
        return context

    def _fragment(self, table_mapping: TableMapping, row: Dict[str, Any], where: str):
        fragment = GradGraph(strict=False)
        preset: Dict[int, int] = {}
        lookups: Dict[Any, int] = {}
        row_entity: Optional[int] = None

        if table_mapping.class_label is not None:
            identifiers = self._values(table_mapping.id_columns, row, where, required=True)
            if identifiers is None:
                raise MappingError(f"{where}: empty identifier cell for {table_mapping.class_label}")
            row_entity = fragment.add_entity_node(table_mapping.class_label, identifiers).handle

        for attribute in table_mapping.attributes:
            cell = row.get(attribute.column)
            if is_empty_cell(cell):
                continue
            value = coerce_cell(cell, attribute.type, f"{where} column {attribute.column}")
            node = fragment.add_attribute(row_entity, attribute.target_label)
            fragment.add_literal(node.handle, value, self._context(attribute, row, where))

        for edge in table_mapping.edges:
            start = self._endpoint(edge.start, row, where, fragment, preset, lookups, row_entity)
            end = self._endpoint(edge.end, row, where, fragment, preset, lookups, row_entity)
            if start is None or end is None:
                logger.warning(f"{where}: edge {edge.label} skipped, an endpoint cell is empty")
                continue
            self._add_edge(fragment, edge, start, end, row, where)
        return fragment, preset

    def _endpoint(
        self,
        lookup: Optional[EndpointLookup],
        row: Dict[str, Any],
        where: str,
        fragment: GradGraph,
        preset: Dict[int, int],
        lookups: Dict[Any, int],
        row_entity: Optional[int],
    ) -> Optional[int]:
        if lookup is None:
            return row_entity
        identifiers = self._values(lookup.columns, row, where, required=True)
        if identifiers is None:
            return None
        cache_key = (lookup.class_label, tuple(sorted((name, repr(value)) for name, value in identifiers.items())))
        if cache_key in lookups:
            return lookups[cache_key]

        found = self.graph.find_entities(lookup.class_label, identifiers)
        if found:
            if len(found) > 1:
                found = sorted(found, key=lambda node: sort_key(self.graph, node.handle))
                logger.warning(f"{where}: {len(found)} {lookup.class_label} nodes match {identifiers}; using the first")
            stub = fragment.add_entity_node(lookup.class_label, found[0].identifiers)
            preset[stub.handle] = found[0].handle
        else:
            stub = fragment.add_entity_node(lookup.class_label, identifiers)
        lookups[cache_key] = stub.handle
        return stub.handle

    def _add_edge(self, fragment: GradGraph, edge: EdgeMapping, start: int, end: int, row: Dict[str, Any], where: str) -> None:
        attributes = self._values(edge.attributes, row, where, required=False)
        try:
            fragment.add_entity_edge(start, end, edge.kind, edge.label, attributes)
        except GradError as e:
            raise MappingError(f"{where}: edge {edge.label}: {e.message}")


def etl_movielens(tables: Iterable[SourceTable], mapping: EtlMapping, strict: Optional[bool] = None) -> GradGraph:
    """Build a GRAD graph from source tables under ``mapping``"""
    try:
        return TableLoader(mapping, strict).load(tables)
    except MappingError as e:
        logger.error(f"ETL failed: {e}")
        raise


def etl_from_files(
    mapping_path: Union[str, Path],
    table_paths: Optional[List[Union[str, Path]]] = None,
    delimiter: Optional[str] = None,
    strict: Optional[bool] = None,
) -> GradGraph:
    """Read the mapping and its tables; table paths default to the mapping's sources next to the mapping file"""
    mapping_path = Path(mapping_path)
    mapping = load_mapping(mapping_path)
    sep = delimiter or mapping.delimiter
    if table_paths:
        paths = [Path(p) for p in table_paths]
    else:
        paths = [mapping_path.parent / table.source for table in mapping.tables]
    tables = [read_table(path, sep) for path in dict.fromkeys(paths)]
    return etl_movielens(tables, mapping, strict)
