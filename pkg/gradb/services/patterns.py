"""Validity rules for graph patterns"""

import logging
from collections import Counter, defaultdict
from typing import Dict, List

from gradb.core.exceptions import InvalidPattern
from gradb.models.elements import EntityEdgeKind
from gradb.schemas.pattern import (
    EdgeKind,
    GraphPattern,
    NodeKind,
    PatternIssue,
    PredicateTarget,
)

logger = logging.getLogger(__name__)

# Predicate targets each pattern element kind carries
NODE_TARGETS = {
    NodeKind.ENTITY: {PredicateTarget.NODE_LABEL, PredicateTarget.IDENTIFIER},
    NodeKind.ATTRIBUTE: {PredicateTarget.NODE_LABEL},
    NodeKind.LITERAL: {PredicateTarget.LITERAL_VALUE},
}

EDGE_TARGETS = {
    EdgeKind.ENTITY: {PredicateTarget.EDGE_LABEL, PredicateTarget.EDGE_ATTRIBUTE},
    EdgeKind.ATTRIBUTE: set(),
    EdgeKind.LITERAL: {PredicateTarget.EDGE_ATTRIBUTE},
}

ENDPOINT_KINDS = {
    EdgeKind.ENTITY: (NodeKind.ENTITY, NodeKind.ENTITY),
    EdgeKind.ATTRIBUTE: (NodeKind.ENTITY, NodeKind.ATTRIBUTE),
    EdgeKind.LITERAL: (NodeKind.ATTRIBUTE, NodeKind.LITERAL),
}


def validate_pattern(pattern: GraphPattern) -> List[PatternIssue]:
    """Return every validity issue of ``pattern``; an empty list means valid"""
    issues: List[PatternIssue] = []

    def issue(rule: str, subject: str, message: str) -> None:
        issues.append(PatternIssue(rule=rule, subject=subject, message=message))

    kinds: Dict[str, NodeKind] = {}
    for node in pattern.nodes:
        if node.var in kinds:
            issue("DuplicateVariable", node.var, "node variable declared twice")
            continue
        kinds[node.var] = node.kind

        for predicate in node.predicates:
            if predicate.target not in NODE_TARGETS[node.kind]:
                issue(
                    "IllegalPredicateTarget",
                    node.var,
                    f"{node.kind.value} nodes carry no {predicate.target.value} property",
                )
            elif predicate.target.is_named and not predicate.name:
                issue("IllegalPredicateTarget", node.var, f"{predicate.target.value} predicate needs a name")
            elif predicate.target.is_label and not predicate.op.is_equality:
                issue("IllegalLabelOperator", node.var, f"label compared with {predicate.op.value}")

    edge_vars = pattern.edge_vars()
    for name, count in Counter(edge_vars).items():
        if count > 1 or name in kinds:
            issue("DuplicateVariable", name, "edge variable clashes with another variable")

    incoming: Dict[str, List[str]] = defaultdict(list)
    parent_edges: Counter = Counter()

    for name, edge in zip(edge_vars, pattern.edges):
        unknown = [var for var in (edge.start_var, edge.end_var) if var not in kinds]
        if unknown:
            for var in unknown:
                issue("UnknownVariable", name, f"endpoint {var} is not a declared node")
            continue

        expected = ENDPOINT_KINDS[edge.kind]
        actual = (kinds[edge.start_var], kinds[edge.end_var])
        if actual != expected:
            issue(
                "IllegalEndpointKinds",
                name,
                f"{edge.kind.value} edges link {expected[0].value} to {expected[1].value}, "
                f"not {actual[0].value} to {actual[1].value}",
            )
            continue

        for predicate in edge.predicates:
            if predicate.target not in EDGE_TARGETS[edge.kind]:
                issue(
                    "IllegalPredicateTarget",
                    name,
                    f"{edge.kind.value} edges carry no {predicate.target.value} property",
                )
            elif predicate.target.is_named and not predicate.name:
                issue("IllegalPredicateTarget", name, f"{predicate.target.value} predicate needs a name")
            elif predicate.target.is_label and not predicate.op.is_equality:
                issue("IllegalLabelOperator", name, f"label compared with {predicate.op.value}")

        if edge.kind is not EdgeKind.ENTITY:
            incoming[edge.end_var].append(edge.start_var)
        elif edge.entity_kind is not None and edge.entity_kind is not EntityEdgeKind.ASSOCIATION:
            parent_edges[(edge.start_var, edge.entity_kind)] += 1

    for node in pattern.nodes:
        if node.kind is NodeKind.ENTITY:
            continue
        parents = incoming.get(node.var, [])
        if not parents:
            owner = "entity" if node.kind is NodeKind.ATTRIBUTE else "attribute"
            issue("MissingParent", node.var, f"{node.kind.value} node is not linked to an {owner} node")
        elif len(parents) > 1:
            rule = "MultipleAttributeParents" if node.kind is NodeKind.ATTRIBUTE else "MultipleLiteralParents"
            issue(rule, node.var, f"linked to {len(parents)} parents: {', '.join(parents)}")

    for (var, kind), count in parent_edges.items():
        if count > 1:
            issue("MultipleParentEdges", var, f"{count} outgoing {kind.value} edges")

    # Deduplicate the per-node issues raised twice by duplicate declarations
    unique = {(i.rule, i.subject, i.message): i for i in issues}
    return sorted(unique.values(), key=lambda i: (i.rule, i.subject, i.message))


def ensure_valid(pattern: GraphPattern) -> None:
    issues = validate_pattern(pattern)
    if issues:
        logger.info(f"Rejected pattern with {len(issues)} issue(s): {', '.join(str(i) for i in issues)}")
        raise InvalidPattern(issues)
