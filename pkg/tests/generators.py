"""Seeded random graphs and patterns for the property tests."""

import random
from typing import List, Sequence

from gradb.models.elements import EntityEdgeKind, PARENT_KINDS
from gradb.models.graph import GradGraph
from gradb.schemas.pattern import AtomicPredicate, EdgeKind, GraphPattern, NodeKind, PatternEdge, PatternNode
from gradb.services.serializer import dumps

CLASSES = ("A", "B", "C")
ATTRIBUTE_LABELS = ("color", "size", "score")
CONTEXTS = ({}, {"src": "x"}, {"src": "y"})

NODE_CAP = 60


def edge_label(kind: EntityEdgeKind, start_class: str, end_class: str) -> str:
    # one label per (kind, start class, end class) keeps edge labels class-consistent
    return f"{kind.value[:3]}:{start_class}>{end_class}"


def random_value(rng: random.Random):
    choice = rng.randrange(4)
    if choice == 0:
        return rng.randint(0, 9)
    if choice == 1:
        return rng.randint(0, 9) + 0.5
    if choice == 2:
        return rng.choice(("x", "y", "z"))
    return rng.random() < 0.5


def random_graph(
    seed: int,
    classes: Sequence[str] = CLASSES,
    max_entities: int = 10,
    max_attributes: int = 3,
    max_literals: int = 2,
) -> GradGraph:
    """A duplicate-free graph with acyclic parent-kind edges.

    Identifier ``key`` is unique across the graph, so weak nodes stay distinct
    even when cut off from their parent.
    """
    rng = random.Random(seed)
    g = GradGraph(strict=False)
    prefix = "".join(c.lower() for c in classes)
    handles: List[int] = []
    for index in range(rng.randint(0, max_entities)):
        class_label = rng.choice(classes)
        identifiers = {"key": f"{prefix}{index}"}
        if rng.random() < 0.3:
            identifiers["num"] = rng.randint(0, 3)
        handles.append(g.add_entity_node(class_label, identifiers).handle)

    def class_of(handle: int) -> str:
        return g.entity_nodes[handle].class_label

    # parent-kind edges only point to earlier nodes
    for index in range(1, len(handles)):
        if rng.random() < 0.25:
            kind = rng.choice(PARENT_KINDS)
            start, end = handles[index], handles[rng.randrange(index)]
            g.add_entity_edge(start, end, kind, edge_label(kind, class_of(start), class_of(end)))

    for _ in range(rng.randint(0, 2 * len(handles))):
        start, end = rng.choice(handles), rng.choice(handles)
        if start == end or g.edges_between(start, end):
            continue
        attributes = {"w": rng.randint(0, 2)} if rng.random() < 0.4 else {}
        kind = EntityEdgeKind.ASSOCIATION
        g.add_entity_edge(start, end, kind, edge_label(kind, class_of(start), class_of(end)), attributes)

    for handle in handles:
        for label in rng.sample(ATTRIBUTE_LABELS, rng.randint(0, max_attributes)):
            if g.node_count + 2 > NODE_CAP:
                return g
            attribute = g.add_attribute(handle, label)
            for context in rng.sample(CONTEXTS, rng.randint(1, max_literals)):
                if g.node_count + 1 > NODE_CAP:
                    return g
                g.add_literal(attribute.handle, random_value(rng), context)
    return g


def random_pattern(graph: GradGraph, seed: int, max_nodes: int = 5) -> GraphPattern:
    """A valid pattern whose labels are drawn from ``graph``"""
    rng = random.Random(seed)
    classes = graph.classes() or list(CLASSES)
    labels = sorted({edge.label for edge in graph.entity_edges.values()})

    nodes: List[PatternNode] = []
    edges: List[PatternEdge] = []
    entity_vars = []
    for index in range(rng.randint(1, min(3, max_nodes))):
        predicates = []
        if rng.random() < 0.6:
            predicates.append(AtomicPredicate.label(rng.choice(classes)))
        if rng.random() < 0.15:
            predicates.append(AtomicPredicate.identifier("num", rng.choice(("<=", ">", "=")), rng.randint(0, 3)))
        var = f"e{index}"
        entity_vars.append(var)
        nodes.append(PatternNode(var=var, kind=NodeKind.ENTITY, predicates=predicates))

    for start in entity_vars:
        for end in entity_vars:
            if start != end and rng.random() < 0.3:
                predicates = []
                if labels and rng.random() < 0.5:
                    predicates.append(AtomicPredicate.edge_label(rng.choice(labels)))
                edges.append(PatternEdge(start_var=start, end_var=end, kind=EdgeKind.ENTITY, predicates=predicates))

    if len(nodes) < max_nodes and rng.random() < 0.6:
        predicates = [AtomicPredicate.label(rng.choice(ATTRIBUTE_LABELS))] if rng.random() < 0.7 else []
        nodes.append(PatternNode(var="a", kind=NodeKind.ATTRIBUTE, predicates=predicates))
        edges.append(PatternEdge(start_var=rng.choice(entity_vars), end_var="a", kind=EdgeKind.ATTRIBUTE))
        if len(nodes) < max_nodes and rng.random() < 0.5:
            predicates = []
            if rng.random() < 0.5:
                predicates.append(AtomicPredicate.value(rng.choice(("<", ">=", "=", "!=")), rng.randint(0, 9)))
            nodes.append(PatternNode(var="l", kind=NodeKind.LITERAL, predicates=predicates))
            edge_predicates = []
            if rng.random() < 0.3:
                edge_predicates.append(AtomicPredicate.attribute("src", "=", rng.choice(("x", "y"))))
            edges.append(PatternEdge(start_var="a", end_var="l", kind=EdgeKind.LITERAL, predicates=edge_predicates))
    return GraphPattern(nodes=nodes, edges=edges)


def graph_signature(graph: GradGraph) -> str:
    """Canonical text; equal for graphs that are isomorphic up to handles"""
    return dumps(graph).split("\n", 1)[1]
