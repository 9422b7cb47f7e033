"""Subgraph matching of graph patterns against a GRAD graph.

:func:`match` is a predicate-pruned backtracking search; :func:`brute_force_match`
enumerates every assignment and serves as the reference for testing it.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Set, Tuple

from gradb.core.config import settings
from gradb.core.exceptions import CapExceeded, IncomparableTypes
from gradb.models.graph import GradGraph
from gradb.models.identity import render_element, sort_key
from gradb.models.values import Value, compare_values
from gradb.schemas.pattern import (
    AtomicPredicate,
    EdgeKind,
    GraphPattern,
    NodeKind,
    PatternEdge,
    PatternNode,
    PredicateTarget,
)
from gradb.services.patterns import ensure_valid

logger = logging.getLogger(__name__)

_MISSING = object()


@dataclass
class Match:
    """Bindings of pattern variables to graph handles plus the matched subgraph"""

    graph: GradGraph
    bindings: Dict[str, int]
    _subgraph: Optional[GradGraph] = field(default=None, repr=False, compare=False)

    @property
    def subgraph(self) -> GradGraph:
        if self._subgraph is None:
            selected = set(self.bindings.values())
            fragment = GradGraph(strict=False)
            fragment.import_graph(self.graph, only=selected)
            self._subgraph = fragment
        return self._subgraph

    def rendered(self, variables: Sequence[str]) -> List[str]:
        return [render_element(self.graph, self.bindings[var]) for var in variables]


@dataclass
class MatchSet:
    pattern: GraphPattern
    matches: List[Match] = field(default_factory=list)
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.matches)

    def __iter__(self) -> Iterator[Match]:
        return iter(self.matches)

    def __getitem__(self, index: int) -> Match:
        return self.matches[index]

    def distinct(self) -> List[Match]:
        """First match (in canonical order) per distinct set of matched elements"""
        seen: Set[frozenset] = set()
        kept = []
        for found in self.matches:
            image = frozenset(found.bindings.values())
            if image not in seen:
                seen.add(image)
                kept.append(found)
        return kept

    def binding_sets(self) -> Set[Tuple[Tuple[str, int], ...]]:
        return {tuple(sorted(m.bindings.items())) for m in self.matches}

    def to_rows(self) -> List[List[str]]:
        """Header of variable names followed by one rendered row per match"""
        variables = self.pattern.variables
        return [variables] + [m.rendered(variables) for m in self.matches]


# ----------------------------------------------------------------------
# Predicate evaluation
# ----------------------------------------------------------------------


def _evaluate(predicate: AtomicPredicate, actual: Any) -> bool:
    if actual is _MISSING:
        return False
    try:
        return compare_values(actual, predicate.op, predicate.constant)
    except IncomparableTypes as e:
        logger.debug(f"Predicate {predicate.target.value} {predicate.op.value} treated as unsatisfied: {e}")
        return False


def node_satisfies(graph: GradGraph, node: PatternNode, handle: int) -> bool:
    """Kind check plus every node predicate"""
    if node.kind is NodeKind.ENTITY:
        element = graph.entity_nodes.get(handle)
        if element is None:
            return False
        for predicate in node.predicates:
            if predicate.target is PredicateTarget.NODE_LABEL:
                actual: Any = element.class_label
            else:
                actual = element.identifiers.get(predicate.name, _MISSING)
            if not _evaluate(predicate, actual):
                return False
        return True

    if node.kind is NodeKind.ATTRIBUTE:
        element = graph.attribute_nodes.get(handle)
        if element is None:
            return False
        return all(_evaluate(p, element.label) for p in node.predicates)

    element = graph.literal_nodes.get(handle)
    if element is None:
        return False
    return all(_evaluate(p, element.value) for p in node.predicates)


def _edge_properties_hold(predicates: List[AtomicPredicate], label: Optional[str], attributes: Dict[str, Value]) -> bool:
    for predicate in predicates:
        if predicate.target is PredicateTarget.EDGE_LABEL:
            actual: Any = label if label is not None else _MISSING
        else:
            actual = attributes.get(predicate.name, _MISSING)
        if not _evaluate(predicate, actual):
            return False
    return True


def edge_candidates(graph: GradGraph, edge: PatternEdge, start: int, end: int) -> List[int]:
    """Graph edges from ``start`` to ``end`` that satisfy a pattern edge"""
    if edge.kind is EdgeKind.ATTRIBUTE:
        attribute = graph.attribute_nodes.get(end)
        if attribute is None or attribute.parent != start:
            return []
        return [graph.attribute_edge_of(end).handle]

    if edge.kind is EdgeKind.LITERAL:
        literal = graph.literal_nodes.get(end)
        if literal is None or literal.parent != start:
            return []
        literal_edge = graph.literal_edge_of(end)
        if not _edge_properties_hold(edge.predicates, None, literal_edge.context):
            return []
        return [literal_edge.handle]

    if start not in graph.entity_nodes or end not in graph.entity_nodes:
        return []
    found = []
    for candidate in graph.edges_between(start, end):
        if edge.entity_kind is not None and candidate.kind is not edge.entity_kind:
            continue
        if _edge_properties_hold(edge.predicates, candidate.label, candidate.attributes):
            found.append(candidate.handle)
    return found


def _edge_bindings(
    graph: GradGraph, pattern: GraphPattern, edge_vars: List[str], node_binding: Dict[str, int]
) -> Iterator[Dict[str, int]]:
    """Every injective choice of graph edges for the pattern edges under a node binding"""
    choices = []
    for edge in pattern.edges:
        options = edge_candidates(graph, edge, node_binding[edge.start_var], node_binding[edge.end_var])
        if not options:
            return
        choices.append(options)

    for combination in itertools.product(*choices):
        if len(set(combination)) != len(combination):
            continue
        bindings = dict(node_binding)
        bindings.update(zip(edge_vars, combination))
        yield bindings


def _canonical_order(graph: GradGraph, pattern: GraphPattern, matches: List[Match]) -> List[Match]:
    variables = pattern.variables
    return sorted(matches, key=lambda m: tuple(sort_key(graph, m.bindings[var]) for var in variables))


# ----------------------------------------------------------------------
# Backtracking matcher
# ----------------------------------------------------------------------


class SubgraphMatcher:
    """Backtracking search over pattern nodes with candidate pre-filtering and forward checking"""

    def __init__(self, graph: GradGraph, pattern: GraphPattern):
        self.graph = graph
        self.pattern = pattern
        self.edge_vars = pattern.edge_vars()
        self.nodes = {node.var: node for node in pattern.nodes}
        self.position = {node.var: index for index, node in enumerate(pattern.nodes)}

        # Pattern edges touching each var, as (edge, other var, var is start)
        self.incident: Dict[str, List[Tuple[PatternEdge, str, bool]]] = {var: [] for var in self.nodes}
        for edge in pattern.edges:
            self.incident[edge.start_var].append((edge, edge.end_var, True))
            if edge.end_var != edge.start_var:
                self.incident[edge.end_var].append((edge, edge.start_var, False))

    def _domain(self, node: PatternNode) -> List[int]:
        graph = self.graph
        if node.kind is NodeKind.ENTITY:
            label = node.label_constant()
            if label is not None:
                return [member.handle for member in graph.class_members(label)]
            return list(graph.entity_nodes)
        if node.kind is NodeKind.ATTRIBUTE:
            return list(graph.attribute_nodes)
        return list(graph.literal_nodes)

    def _degree_ok(self, var: str, handle: int) -> bool:
        """Cheap necessary condition: enough incident graph edges of each pattern edge kind"""
        graph = self.graph
        node = self.nodes[var]
        needed_out = needed_in = needed_attributes = needed_literals = 0
        for edge, _, is_start in self.incident[var]:
            if edge.kind is EdgeKind.ENTITY:
                if is_start:
                    needed_out += 1
                if not is_start or edge.start_var == edge.end_var:
                    needed_in += 1
            elif edge.kind is EdgeKind.ATTRIBUTE and is_start:
                needed_attributes += 1
            elif edge.kind is EdgeKind.LITERAL and is_start:
                needed_literals += 1

        if node.kind is NodeKind.ENTITY:
            return (
                len(graph._out[handle]) >= needed_out
                and len(graph._in[handle]) >= needed_in
                and len(graph._attributes[handle]) >= needed_attributes
            )
        if node.kind is NodeKind.ATTRIBUTE:
            return len(graph._literals[handle]) >= needed_literals
        return True

    def candidates(self, pinned: Optional[Dict[str, int]] = None) -> Dict[str, List[int]]:
        pinned = pinned or {}
        result = {}
        for var, node in self.nodes.items():
            domain = [pinned[var]] if var in pinned else self._domain(node)
            result[var] = [
                handle
                for handle in domain
                if node_satisfies(self.graph, node, handle) and self._degree_ok(var, handle)
            ]
        return result

    def _order(self, candidates: Dict[str, List[int]]) -> List[str]:
        """Connected-first order, smallest candidate set first, declaration order on ties"""
        remaining = set(self.nodes)
        order: List[str] = []
        while remaining:
            adjacent = [
                var for var in remaining if any(other in order for _, other, _ in self.incident[var])
            ]
            pool = adjacent or list(remaining)
            chosen = min(pool, key=lambda var: (len(candidates[var]), self.position[var]))
            order.append(chosen)
            remaining.remove(chosen)
        return order

    def _consistent(self, var: str, handle: int, binding: Dict[str, int]) -> bool:
        for edge, other, is_start in self.incident[var]:
            if other == var:
                if not edge_candidates(self.graph, edge, handle, handle):
                    return False
                continue
            if other not in binding:
                continue
            start, end = (handle, binding[other]) if is_start else (binding[other], handle)
            if not edge_candidates(self.graph, edge, start, end):
                return False
        return True

    def _forward_ok(self, var: str, binding: Dict[str, int], used: Set[int], candidates: Dict[str, List[int]]) -> bool:
        """Every unbound neighbor of ``var`` keeps at least one viable candidate"""
        for _, other, _ in self.incident[var]:
            if other in binding:
                continue
            if not any(
                handle not in used and self._consistent(other, handle, binding)
                for handle in candidates[other]
            ):
                return False
        return True

    def run(self, limit: Optional[int] = None, pinned: Optional[Dict[str, int]] = None) -> MatchSet:
        result = MatchSet(pattern=self.pattern)
        if not self.pattern.nodes:
            result.matches.append(Match(self.graph, {}))
            return result

        candidates = self.candidates(pinned)
        if any(not domain for domain in candidates.values()):
            return result
        order = self._order(candidates)
        logger.debug(
            f"Matching {len(order)} pattern nodes in order {order} "
            f"with candidate counts {[len(candidates[v]) for v in order]}"
        )

        binding: Dict[str, int] = {}
        used: Set[int] = set()
        found: List[Match] = []

        def extend(depth: int) -> bool:
            if depth == len(order):
                for bindings in _edge_bindings(self.graph, self.pattern, self.edge_vars, binding):
                    found.append(Match(self.graph, bindings))
                    if limit is not None and len(found) >= limit:
                        return False
                return True

            var = order[depth]
            for handle in candidates[var]:
                if handle in used or not self._consistent(var, handle, binding):
                    continue
                binding[var] = handle
                used.add(handle)
                if self._forward_ok(var, binding, used, candidates):
                    if not extend(depth + 1):
                        return False
                del binding[var]
                used.discard(handle)
            return True

        result.truncated = not extend(0)
        if result.truncated:
            logger.warning(f"Match limit of {limit} reached; results truncated")
        result.matches = _canonical_order(self.graph, self.pattern, found)
        return result


def match(
    graph: GradGraph,
    pattern: GraphPattern,
    limit: Optional[int] = None,
    pinned: Optional[Dict[str, int]] = None,
) -> MatchSet:
    """All embeddings of ``pattern`` into ``graph`` in canonical order.

    ``limit`` stops the search after that many matches; ``pinned`` pre-binds
    pattern node variables to graph handles.
    """
    ensure_valid(pattern)
    matches = SubgraphMatcher(graph, pattern).run(limit=limit, pinned=pinned)
    logger.info(f"Pattern with {len(pattern.nodes)} nodes matched {len(matches)} time(s)")
    return matches


def brute_force_match(graph: GradGraph, pattern: GraphPattern) -> MatchSet:
    """Enumerate every injective assignment of pattern nodes; reference for :func:`match`"""
    ensure_valid(pattern)
    if len(pattern.nodes) > settings.BRUTE_FORCE_MAX_PATTERN_NODES:
        raise CapExceeded(
            f"pattern has {len(pattern.nodes)} nodes, cap is {settings.BRUTE_FORCE_MAX_PATTERN_NODES}"
        )
    if graph.node_count > settings.BRUTE_FORCE_MAX_GRAPH_NODES:
        raise CapExceeded(f"graph has {graph.node_count} nodes, cap is {settings.BRUTE_FORCE_MAX_GRAPH_NODES}")

    result = MatchSet(pattern=pattern)
    edge_vars = pattern.edge_vars()
    domains = []
    for node in pattern.nodes:
        if node.kind is NodeKind.ENTITY:
            universe = graph.entity_nodes
        elif node.kind is NodeKind.ATTRIBUTE:
            universe = graph.attribute_nodes
        else:
            universe = graph.literal_nodes
        domains.append([handle for handle in universe if node_satisfies(graph, node, handle)])

    found = []
    for assignment in itertools.product(*domains):
        if len(set(assignment)) != len(assignment):
            continue
        node_binding = dict(zip(pattern.node_vars, assignment))
        for bindings in _edge_bindings(graph, pattern, edge_vars, node_binding):
            found.append(Match(graph, bindings))

    result.matches = _canonical_order(graph, pattern, found)
    return result
