"""The closed graph algebra: selection, product, composition, union, difference and join.

Operators never mutate their inputs and always return fresh graphs.
"""

import logging
from collections import deque
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple

from gradb.core.exceptions import (
    GradError,
    GraphIntegrityError,
    TemplateNotGradCompliant,
    UnboundTemplateVariable,
)
from gradb.models.elements import EntityEdgeKind
from gradb.models.graph import GradGraph
from gradb.models.identity import safe_entity_key
from gradb.models.values import Value, is_scalar, values_equal
from gradb.schemas.algebra import GraphTemplate, JoinPredicate, TemplateValue
from gradb.schemas.pattern import (
    AtomicPredicate,
    EdgeKind,
    GraphPattern,
    NodeKind,
    PatternEdge,
    PatternNode,
)
from gradb.schemas.reports import Severity
from gradb.services.constraints import check_structure
from gradb.services.matcher import Match, match
from gradb.services.merger import GraphMerger
from gradb.services.patterns import ensure_valid

logger = logging.getLogger(__name__)


class GraphCollection:
    """Ordered collection of graphs, sorted by the sorted entity keys of each member"""

    def __init__(self, graphs: Iterable[GradGraph] = ()):
        self.graphs: List[GradGraph] = sorted(graphs, key=self.order_key)

    @staticmethod
    def order_key(graph: GradGraph) -> Tuple:
        return tuple(sorted(safe_entity_key(graph, handle) for handle in graph.entity_nodes))

    def __len__(self) -> int:
        return len(self.graphs)

    def __iter__(self) -> Iterator[GradGraph]:
        return iter(self.graphs)

    def __getitem__(self, index: int) -> GradGraph:
        return self.graphs[index]

    def __repr__(self) -> str:
        return f"<GraphCollection {len(self.graphs)} graphs>"


def _check_closure(graph: GradGraph, operator: str) -> GradGraph:
    """Log structural errors in an operator result and return the graph unchanged.

    Operators never raise here: a violation already present in an input is
    carried into the output, and callers run ``validate`` to reject it.
    """
    errors = [v for v in check_structure(graph) if v.severity is Severity.ERROR]
    if errors:
        logger.warning(f"{operator} produced {len(errors)} structural violation(s): {errors[0].to_line()}")
    return graph


# ----------------------------------------------------------------------
# Selection and product
# ----------------------------------------------------------------------


def selection(graph: GradGraph, pattern: GraphPattern, limit: Optional[int] = None) -> GraphCollection:
    """The distinct matched subgraphs of ``pattern``.

    One graph per distinct set of matched elements: matches that differ only by a
    permutation of the same elements (automorphic bindings) yield one graph. Use
    :func:`match` for every binding.
    """
    matches = match(graph, pattern, limit=limit)
    return GraphCollection(_check_closure(m.subgraph, "selection") for m in matches.distinct())


def union(left: GradGraph, right: GradGraph) -> GradGraph:
    """Disjoint juxtaposition: elements sharing an identity key both survive"""
    result = GradGraph(strict=False)
    result.import_graph(left)
    result.import_graph(right)
    return result


def union_all(collection: Iterable[GradGraph]) -> GradGraph:
    result = GradGraph(strict=False)
    for graph in collection:
        result.import_graph(graph)
    return result


def cartesian_product(left: Iterable[GradGraph], right: Iterable[GradGraph]) -> GraphCollection:
    """Every pair, each juxtaposed into one graph"""
    right = list(right)
    return GraphCollection(union(a, b) for a in left for b in right)


# ----------------------------------------------------------------------
# Composition
# ----------------------------------------------------------------------


class TemplateInstantiator:
    """Builds one template instance per match"""

    def __init__(self, template: GraphTemplate, pattern: GraphPattern):
        self.template = template
        self.pattern = pattern
        self._check()

    def _check(self) -> None:
        known = set(self.pattern.variables)
        for var in self.template.slot_vars():
            if var not in known:
                raise UnboundTemplateVariable(f"template slot references unknown pattern variable {var}")

        template = self.template
        declared: Dict[str, str] = {}
        for kind, items in (
            ("entity", template.entities),
            ("attribute", template.attributes),
            ("literal", template.literals),
        ):
            for item in items:
                if item.var in declared:
                    raise TemplateNotGradCompliant(f"template variable {item.var} declared twice")
                declared[item.var] = kind

        for entity in template.entities:
            if not entity.identifiers:
                raise TemplateNotGradCompliant(f"template entity {entity.var} has no identifiers")
        for attribute in template.attributes:
            if declared.get(attribute.entity_var) != "entity":
                raise TemplateNotGradCompliant(f"attribute {attribute.var} is not attached to a template entity")
        for literal in template.literals:
            if declared.get(literal.attribute_var) != "attribute":
                raise TemplateNotGradCompliant(f"literal {literal.var} is not attached to a template attribute")
            for name, value in literal.context.items():
                if not value.is_slot and not is_scalar(value.constant):
                    raise TemplateNotGradCompliant(f"context {name} of literal {literal.var} is composite")

        parent_edges: Set[Tuple[str, EntityEdgeKind]] = set()
        for edge in template.edges:
            for var in (edge.start_var, edge.end_var):
                if declared.get(var) != "entity":
                    raise TemplateNotGradCompliant(f"edge endpoint {var} is not a template entity")
            if edge.kind.is_parent_kind:
                if (edge.start_var, edge.kind) in parent_edges:
                    raise TemplateNotGradCompliant(
                        f"template entity {edge.start_var} has two outgoing {edge.kind.value} edges"
                    )
                parent_edges.add((edge.start_var, edge.kind))

    def _resolve(self, found: Match, value: TemplateValue) -> Value:
        if not value.is_slot:
            return value.constant
        graph = found.graph
        handle = found.bindings[value.var]
        field = value.field

        if handle in graph.entity_nodes:
            node = graph.entity_nodes[handle]
            if field in node.identifiers:
                return node.identifiers[field]
            if field in ("label", "class"):
                return node.class_label
        elif handle in graph.attribute_nodes:
            if field == "label":
                return graph.attribute_nodes[handle].label
        elif handle in graph.literal_nodes:
            if field == "value":
                return graph.literal_nodes[handle].value
            context = graph.literal_edge_of(handle).context
            if field in context:
                return context[field]
        elif handle in graph.entity_edges:
            edge = graph.entity_edges[handle]
            if field == "label":
                return edge.label
            if field in edge.attributes:
                return edge.attributes[field]
        elif handle in graph.literal_edges:
            context = graph.literal_edges[handle].context
            if field in context:
                return context[field]
        raise KeyError(f"${{{value.var}.{field}}}")

    def instantiate(self, found: Match) -> Optional[GradGraph]:
        """The template instance for one match, or None when a slot cannot be filled"""
        template = self.template

        def resolve(value: TemplateValue) -> Value:
            return self._resolve(found, value)

        try:
            fragment = GradGraph(strict=False)
            handles: Dict[str, int] = {}
            for entity in template.entities:
                identifiers = {name: resolve(value) for name, value in entity.identifiers.items()}
                handles[entity.var] = fragment.add_entity_node(str(resolve(entity.class_label)), identifiers).handle
            for attribute in template.attributes:
                handles[attribute.var] = fragment.add_attribute(
                    handles[attribute.entity_var], str(resolve(attribute.label))
                ).handle
            for literal in template.literals:
                context = {name: resolve(value) for name, value in literal.context.items()}
                fragment._add_literal(handles[literal.attribute_var], resolve(literal.value), context, warn=False)
            for edge in template.edges:
                attributes = {name: resolve(value) for name, value in edge.attributes.items()}
                fragment.add_entity_edge(
                    handles[edge.start_var], handles[edge.end_var], edge.kind, str(resolve(edge.label)), attributes
                )
        except KeyError as e:
            logger.warning(f"Template slot {e.args[0]} has no value for one match; instance skipped")
            return None
        except GraphIntegrityError as e:
            raise TemplateNotGradCompliant(f"template instance is not a GRAD fragment: {e.code}: {e.message}")
        return fragment


def composition(
    graph: GradGraph, pattern: GraphPattern, template: GraphTemplate, limit: Optional[int] = None
) -> GradGraph:
    """Instantiate ``template`` for every match of ``pattern`` and merge the instances by identity"""
    ensure_valid(pattern)
    instantiator = TemplateInstantiator(template, pattern)
    result = GradGraph(strict=False)
    merger = GraphMerger(result)
    instances = 0
    for found in match(graph, pattern, limit=limit).distinct():
        fragment = instantiator.instantiate(found)
        if fragment is None:
            continue
        try:
            merger.merge(fragment)
        except GradError as e:
            logger.error(f"Error merging template instance: {e}")
            raise
        instances += 1
    logger.info(f"Composition merged {instances} template instance(s)")
    return _check_closure(result, "composition")


# ----------------------------------------------------------------------
# Difference
# ----------------------------------------------------------------------


def connected_components(graph: GradGraph) -> List[List[int]]:
    """Entity-node components over entity edges in either direction"""
    seen: Set[int] = set()
    components = []
    for start in graph.entity_nodes:
        if start in seen:
            continue
        component = []
        queue = deque([start])
        seen.add(start)
        while queue:
            current = queue.popleft()
            component.append(current)
            neighbours = [e.end for e in graph.out_edges(current)] + [e.start for e in graph.in_edges(current)]
            for other in neighbours:
                if other not in seen:
                    seen.add(other)
                    queue.append(other)
        components.append(component)
    return components


class ExactPattern:
    """Equality pattern for one component, plus the checks equality predicates cannot express"""

    def __init__(self, graph: GradGraph, entities: List[int]):
        self.graph = graph
        self.var_of: Dict[int, str] = {}
        nodes: List[PatternNode] = []
        edges: List[PatternEdge] = []

        for handle in entities:
            var = f"n{handle}"
            self.var_of[handle] = var
            node = graph.entity_nodes[handle]
            predicates = [AtomicPredicate.label(node.class_label)]
            predicates += [AtomicPredicate.identifier(name, "=", value) for name, value in node.identifiers.items()]
            nodes.append(PatternNode(var=var, kind=NodeKind.ENTITY, predicates=predicates))

            for attribute in graph.attributes_of(handle):
                attribute_var = f"a{attribute.handle}"
                self.var_of[attribute.handle] = attribute_var
                nodes.append(
                    PatternNode(
                        var=attribute_var,
                        kind=NodeKind.ATTRIBUTE,
                        predicates=[AtomicPredicate.label(attribute.label)],
                    )
                )
                edges.append(PatternEdge(start_var=var, end_var=attribute_var, kind=EdgeKind.ATTRIBUTE))

                for literal in graph.literals_of(attribute.handle):
                    literal_var = f"l{literal.handle}"
                    self.var_of[literal.handle] = literal_var
                    nodes.append(
                        PatternNode(
                            var=literal_var,
                            kind=NodeKind.LITERAL,
                            predicates=[AtomicPredicate.value("=", literal.value)],
                        )
                    )
                    context = graph.literal_edge_of(literal.handle).context
                    edges.append(
                        PatternEdge(
                            start_var=attribute_var,
                            end_var=literal_var,
                            kind=EdgeKind.LITERAL,
                            predicates=[AtomicPredicate.attribute(n, "=", v) for n, v in context.items()],
                        )
                    )

        member = set(entities)
        self.edge_vars: Dict[str, int] = {}
        for handle in entities:
            for edge in graph.out_edges(handle):
                if edge.end not in member:
                    continue
                var = f"e{edge.handle}"
                self.edge_vars[var] = edge.handle
                predicates = [AtomicPredicate.edge_label(edge.label)]
                predicates += [AtomicPredicate.attribute(n, "=", v) for n, v in edge.attributes.items()]
                edges.append(
                    PatternEdge(
                        start_var=self.var_of[handle],
                        end_var=self.var_of[edge.end],
                        kind=EdgeKind.ENTITY,
                        entity_kind=edge.kind,
                        predicates=predicates,
                        var=var,
                    )
                )

        self.pattern = GraphPattern(nodes=nodes, edges=edges)

    def exact(self, found: Match) -> bool:
        """Bound elements carry exactly the component's content, not a superset of it"""
        source, target = self.graph, found.graph
        for handle, var in self.var_of.items():
            bound = found.bindings[var]
            if handle in source.entity_nodes:
                if not _same_map(source.entity_nodes[handle].identifiers, target.entity_nodes[bound].identifiers):
                    return False
                if source.is_weak(handle) != target.is_weak(bound):
                    return False
            elif handle in source.literal_nodes:
                expected = source.literal_edge_of(handle).context
                if not _same_map(expected, target.literal_edge_of(bound).context):
                    return False
        for var, handle in self.edge_vars.items():
            bound = target.entity_edges[found.bindings[var]]
            if not _same_map(source.entity_edges[handle].attributes, bound.attributes):
                return False
        return True


def _same_map(a: Dict[str, Value], b: Dict[str, Value]) -> bool:
    return a.keys() == b.keys() and all(values_equal(a[name], b[name]) for name in a)


def difference(left: GradGraph, right: GradGraph) -> GradGraph:
    """Remove from ``left`` every exact copy of a connected component of ``right``"""
    result = left.copy()
    result.strict = False
    doomed: List[int] = []

    for component in connected_components(right):
        exact = ExactPattern(right, component)
        for found in match(result, exact.pattern):
            if exact.exact(found):
                doomed.extend(found.bindings.values())

    removed = 0
    # Entity edges first, then literals and attributes, entity nodes last so cascades see intact hypernodes
    ranked = sorted(
        set(doomed),
        key=lambda h: (
            0 if h in result.entity_edges else
            1 if h in result.literal_nodes else
            2 if h in result.attribute_nodes else
            3 if h in result.entity_nodes else 4,
            h,
        ),
    )
    for handle in ranked:
        if handle in result.entity_edges:
            removed += result.remove_edge(handle)
        elif handle in result.literal_nodes or handle in result.attribute_nodes or handle in result.entity_nodes:
            removed += result.remove_node(handle)
    logger.info(f"Difference removed {removed} element(s)")
    return _check_closure(result, "difference")


# ----------------------------------------------------------------------
# Join
# ----------------------------------------------------------------------


def join(left: Iterable[GradGraph], right: Iterable[GradGraph], predicate: JoinPredicate) -> GraphCollection:
    """Merge each pair of the product on the predicate's rules; pairs with nothing to merge are dropped"""
    right = list(right)
    joined = []
    for a in left:
        for b in right:
            result = GradGraph(strict=False)
            result.import_graph(a)
            merger = GraphMerger(result, predicate=predicate, identity_fallback=False)
            try:
                merger.merge(b)
            except GradError as e:
                logger.error(f"Error joining graphs: {e}")
                raise
            if merger.unified_count == 0:
                continue
            joined.append(_check_closure(result, "join"))
    logger.info(f"Join kept {len(joined)} pair(s)")
    return GraphCollection(joined)
