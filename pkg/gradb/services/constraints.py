"""Integrity-constraint checks: structure, entity integrity, assertions and multiplicities"""

import logging
from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Set, Tuple

from gradb.core.config import settings
from gradb.models.elements import EntityEdgeKind, PARENT_KINDS
from gradb.models.graph import GradGraph
from gradb.models.identity import (
    IdentityKey,
    context_set,
    render_element,
    safe_entity_key,
    sort_key,
)
from gradb.models.values import render_value
from gradb.schemas.constraints import Assertion, Multiplicity
from gradb.schemas.reports import Severity, ValidationReport, Violation, ViolationRule
from gradb.services.matcher import match
from gradb.services.patterns import ensure_valid

logger = logging.getLogger(__name__)

CYCLE_RULES = {
    EntityEdgeKind.COMPOSITION: ViolationRule.COMPOSITION_CYCLE,
    EntityEdgeKind.GENERALIZATION: ViolationRule.GENERALIZATION_CYCLE,
    EntityEdgeKind.AGGREGATION: ViolationRule.AGGREGATION_CYCLE,
}


class ConstraintService:
    """Runs the constraint checkers over one graph"""

    def __init__(self, graph: GradGraph, global_edge_labels: Optional[bool] = None):
        self.graph = graph
        self.global_edge_labels = (
            settings.EDGE_LABEL_RULE_GLOBAL if global_edge_labels is None else global_edge_labels
        )

    def _render(self, handles: Iterable[int]) -> List[str]:
        return [render_element(self.graph, handle) for handle in handles]

    def _ordered(self, handles: Iterable[int]) -> List[int]:
        return sorted(handles, key=lambda h: sort_key(self.graph, h))

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------

    def cycles(self) -> List[Violation]:
        """Cycles through Generalization, Aggregation or Composition edges"""
        graph = self.graph
        violations = []
        for kind in PARENT_KINDS:
            parent: Dict[int, int] = {}
            for edge in graph.entity_edges.values():
                if edge.kind is kind:
                    # with cardinality broken the first edge stands for the node
                    parent.setdefault(edge.start, edge.end)

            reported: Set[int] = set()
            for start in parent:
                path: List[int] = []
                position: Dict[int, int] = {}
                node = start
                while node in parent and node not in position and node not in reported:
                    position[node] = len(path)
                    path.append(node)
                    node = parent[node]
                if node in position:
                    cycle = path[position[node]:]
                    reported.update(cycle)
                    members = self._ordered(cycle)
                    violations.append(
                        Violation(
                            rule=CYCLE_RULES[kind],
                            elements=self._render(members),
                            handles=members,
                            detail=f"length={len(cycle)}",
                        )
                    )
                reported.update(path)
        return violations

    def check_structure(self) -> List[Violation]:
        """Dangling references, single-parent links, parent-edge cardinality and cycles"""
        graph = self.graph
        violations: List[Violation] = []

        for edge in graph.entity_edges.values():
            missing = [h for h in (edge.start, edge.end) if h not in graph.entity_nodes]
            if missing:
                violations.append(
                    Violation(
                        rule=ViolationRule.DANGLING_REFERENCE,
                        elements=[f"#{edge.handle}"],
                        handles=[edge.handle],
                        detail=f"missing={','.join(str(h) for h in missing)}",
                    )
                )
        for partition, parents in (
            (graph.attribute_edges, graph.entity_nodes),
            (graph.literal_edges, graph.attribute_nodes),
        ):
            for edge in partition.values():
                if edge.start not in parents:
                    violations.append(
                        Violation(
                            rule=ViolationRule.DANGLING_REFERENCE,
                            elements=[f"#{edge.handle}"],
                            handles=[edge.handle],
                            detail=f"missing={edge.start}",
                        )
                    )

        attribute_links: Dict[int, int] = defaultdict(int)
        for edge in graph.attribute_edges.values():
            attribute_links[edge.end] += 1
        literal_links: Dict[int, int] = defaultdict(int)
        for edge in graph.literal_edges.values():
            literal_links[edge.end] += 1
        for nodes, links in ((graph.attribute_nodes, attribute_links), (graph.literal_nodes, literal_links)):
            for handle in nodes:
                if links.get(handle, 0) != 1:
                    violations.append(
                        Violation(
                            rule=ViolationRule.SINGLE_PARENT_VIOLATION,
                            elements=self._render([handle]),
                            handles=[handle],
                            detail=f"links={links.get(handle, 0)}",
                        )
                    )

        for handle in graph.entity_nodes:
            for kind in PARENT_KINDS:
                outgoing = [e.handle for e in graph.out_edges(handle) if e.kind is kind]
                if len(outgoing) > 1:
                    violations.append(
                        Violation(
                            rule=ViolationRule.PARENT_EDGE_CARDINALITY,
                            elements=self._render([handle]),
                            handles=[handle] + outgoing,
                            detail=f"{kind.value}={len(outgoing)}",
                        )
                    )

        violations.extend(self.cycles())
        return violations

    # ------------------------------------------------------------------
    # Entity integrity
    # ------------------------------------------------------------------

    def check_entity_integrity(self) -> List[Violation]:
        graph = self.graph
        violations: List[Violation] = []

        by_key: Dict[IdentityKey, List[int]] = defaultdict(list)
        for handle in graph.entity_nodes:
            by_key[safe_entity_key(graph, handle)].append(handle)
        for key, handles in by_key.items():
            if len(handles) > 1:
                violations.append(
                    Violation(
                        rule=ViolationRule.DUPLICATE_ENTITY_IDENTITY,
                        elements=[str(key)],
                        handles=handles,
                        detail=f"count={len(handles)}",
                    )
                )

        by_edge_key: Dict[Tuple, List[int]] = defaultdict(list)
        for edge in graph.entity_edges.values():
            key = (edge.label, safe_entity_key(graph, edge.start), safe_entity_key(graph, edge.end))
            by_edge_key[key].append(edge.handle)
        for key, handles in by_edge_key.items():
            if len(handles) > 1:
                violations.append(
                    Violation(
                        rule=ViolationRule.DUPLICATE_EDGE_IDENTITY,
                        elements=[f"<{key[0]},{key[1]},{key[2]}>"],
                        handles=handles,
                        detail=f"count={len(handles)}",
                    )
                )

        violations.extend(self._edge_label_classes())

        by_attribute_key: Dict[Tuple, List[int]] = defaultdict(list)
        for handle, node in graph.attribute_nodes.items():
            by_attribute_key[(node.label, safe_entity_key(graph, node.parent))].append(handle)
        for (label, owner), handles in by_attribute_key.items():
            if len(handles) > 1:
                violations.append(
                    Violation(
                        rule=ViolationRule.DUPLICATE_ATTRIBUTE_IDENTITY,
                        elements=[f"<{label},{owner}>"],
                        handles=handles,
                        detail=f"count={len(handles)}",
                    )
                )

        violations.extend(self.cycles())

        for handle in graph.attribute_nodes:
            contexts: Dict[Tuple, List[int]] = defaultdict(list)
            for literal in graph.literals_of(handle):
                contexts[context_set(graph.literal_edge_of(literal.handle).context)].append(literal.handle)
            for context, literals in contexts.items():
                if len(literals) > 1:
                    rendered = ",".join(f"{name}={render_value(graph.literal_edge_of(literals[0]).context[name])}"
                                        for name, _ in context)
                    violations.append(
                        Violation(
                            rule=ViolationRule.DUPLICATE_LITERAL_CONTEXT,
                            severity=Severity.WARNING,
                            elements=self._render([handle]),
                            handles=literals,
                            detail=f"context=[{rendered}] count={len(literals)}",
                        )
                    )
        return violations

    def _edge_label_classes(self) -> List[Violation]:
        """Equal labels out of one start node (or one start class) lead to one end class"""
        graph = self.graph
        groups: Dict[Tuple, Dict[str, List[int]]] = defaultdict(lambda: defaultdict(list))
        for edge in graph.entity_edges.values():
            if self.global_edge_labels:
                scope = ("class", graph.entity_nodes[edge.start].class_label)
            else:
                scope = ("node", edge.start)
            end_class = graph.entity_nodes[edge.end].class_label
            groups[(scope, edge.label)][end_class].append(edge.handle)

        violations = []
        for (scope, label), classes in groups.items():
            if len(classes) < 2:
                continue
            handles = sorted(h for members in classes.values() for h in members)
            subject = scope[1] if scope[0] == "class" else render_element(graph, scope[1])
            violations.append(
                Violation(
                    rule=ViolationRule.EDGE_LABEL_CLASS_CONFLICT,
                    elements=[str(subject)],
                    handles=handles,
                    detail=f"label={label} classes={','.join(sorted(classes))}",
                )
            )
        return violations

    # ------------------------------------------------------------------
    # Assertions and multiplicities
    # ------------------------------------------------------------------

    def check_assertion(self, assertion: Assertion) -> List[Violation]:
        """Every node of an anchored class needs at least one match binding it to the anchor"""
        ensure_valid(assertion.pattern)
        graph = self.graph

        governed: Dict[str, List[int]] = {}
        for var in assertion.anchor_vars:
            label = assertion.pattern.node(var).label_constant()
            governed[var] = [node.handle for node in graph.class_members(label)]
        if not any(governed.values()):
            return []

        matches = match(graph, assertion.pattern)
        covered: Dict[str, Set[int]] = defaultdict(set)
        for found in matches:
            for var in assertion.anchor_vars:
                covered[var].add(found.bindings[var])

        failed: Set[int] = set()
        for var, handles in governed.items():
            failed.update(h for h in handles if h not in covered[var])

        violations = []
        for handle in self._ordered(failed):
            violations.append(
                Violation(
                    rule=ViolationRule.ASSERTION_FAILED,
                    elements=self._render([handle]),
                    handles=[handle],
                    name=assertion.name,
                )
            )
        if violations:
            logger.info(f"Assertion {assertion.name} failed for {len(violations)} node(s)")
        return violations

    def check_multiplicity(self, multiplicity: Multiplicity) -> List[Violation]:
        """Count edges labelled ``edge_label`` between the two classes, per node, both ways"""
        graph = self.graph
        violations = []

        def counted(edge) -> bool:
            return edge.label == multiplicity.edge_label and (
                multiplicity.edge_kind is None or edge.kind is multiplicity.edge_kind
            )

        for node in graph.class_members(multiplicity.source_class):
            observed = sum(
                1
                for edge in graph.out_edges(node.handle)
                if counted(edge) and graph.entity_nodes[edge.end].class_label == multiplicity.target_class
            )
            if not multiplicity.forward_range.contains(observed):
                violations.append(self._multiplicity_violation(multiplicity, node.handle, "forward", observed))

        for node in graph.class_members(multiplicity.target_class):
            observed = sum(
                1
                for edge in graph.in_edges(node.handle)
                if counted(edge) and graph.entity_nodes[edge.start].class_label == multiplicity.source_class
            )
            if not multiplicity.backward_range.contains(observed):
                violations.append(self._multiplicity_violation(multiplicity, node.handle, "backward", observed))
        return violations

    def _multiplicity_violation(self, multiplicity: Multiplicity, handle: int, side: str, observed: int) -> Violation:
        return Violation(
            rule=ViolationRule.MULTIPLICITY_FAILED,
            elements=self._render([handle]),
            handles=[handle],
            name=str(multiplicity),
            detail=f"{side} observed={observed}",
        )

    def validate(
        self,
        assertions: Iterable[Assertion] = (),
        multiplicities: Iterable[Multiplicity] = (),
    ) -> ValidationReport:
        violations = self.check_structure() + self.check_entity_integrity()
        for assertion in assertions:
            violations.extend(self.check_assertion(assertion))
        for multiplicity in multiplicities:
            violations.extend(self.check_multiplicity(multiplicity))

        unique: Dict[Tuple, Violation] = {}
        for violation in violations:
            unique.setdefault((violation.rule, tuple(violation.elements), violation.name, violation.detail), violation)
        report = ValidationReport(violations=sorted(unique.values(), key=lambda v: v.sort_key()))
        logger.info(f"Validation finished: {report.summary()}")
        return report


def check_structure(graph: GradGraph) -> List[Violation]:
    return ConstraintService(graph).check_structure()


def check_entity_integrity(graph: GradGraph, global_edge_labels: Optional[bool] = None) -> List[Violation]:
    return ConstraintService(graph, global_edge_labels).check_entity_integrity()


def check_assertion(graph: GradGraph, assertion: Assertion) -> List[Violation]:
    return ConstraintService(graph).check_assertion(assertion)


def check_multiplicity(graph: GradGraph, multiplicity: Multiplicity) -> List[Violation]:
    return ConstraintService(graph).check_multiplicity(multiplicity)


def validate(
    graph: GradGraph,
    assertions: Iterable[Assertion] = (),
    multiplicities: Iterable[Multiplicity] = (),
    global_edge_labels: Optional[bool] = None,
) -> ValidationReport:
    """Structure, entity integrity, assertions and multiplicities in one ordered report"""
    return ConstraintService(graph, global_edge_labels).validate(assertions, multiplicities)
