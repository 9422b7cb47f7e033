"""Unification of one GRAD graph into another.

Two strategies decide which entity nodes unify: identity-key equality and
rule-driven matching on chosen identifiers. Everything else (identifier union,
attribute merge by label, literal merge by context and value, entity-edge
merge by identity, weak-part handling) is shared.
"""

import logging
from typing import Dict, List, Optional, Set

from gradb.core.exceptions import ConflictingIdentifiers, ConflictingParentEdge
from gradb.models.elements import EntityEdgeKind, EntityNode
from gradb.models.graph import GradGraph
from gradb.models.identity import (
    IdentityKey,
    context_set,
    entity_key,
    identifier_set,
    safe_entity_key,
    sort_key,
)
from gradb.models.values import Value, canonical_value, values_equal
from gradb.schemas.algebra import JoinPredicate, MergeRule

logger = logging.getLogger(__name__)


class GraphMerger:
    """Folds source graphs into ``target``.

    With ``predicate`` set, strong entity nodes unify under its merge rules;
    classes without a rule (or every class when ``predicate`` is None) unify
    on equal identity keys. Weak parts unify only under a unified parent and
    with an equal identifier set.
    """

    def __init__(self, target: GradGraph, predicate: Optional[JoinPredicate] = None, identity_fallback: bool = True):
        self.target = target
        self.predicate = predicate
        self.identity_fallback = identity_fallback
        self.unified_count = 0
        self._keys: Dict[IdentityKey, int] = {}
        for handle in target.entity_nodes:
            self._keys.setdefault(safe_entity_key(target, handle), handle)

    # ------------------------------------------------------------------
    # Entity node unification
    # ------------------------------------------------------------------

    def _rule_candidates(self, node: EntityNode, rule: MergeRule, existing: Set[int]) -> List[int]:
        if any(name not in node.identifiers for name in rule.match_on):
            return []
        wanted = {name: node.identifiers[name] for name in rule.match_on}
        return [
            found.handle
            for found in self.target.find_entities(node.class_label, wanted)
            if found.handle in existing and not self.target.is_weak(found.handle)
        ]

    def _weak_candidates(self, source: GradGraph, node: EntityNode, parent: int) -> List[int]:
        ids = identifier_set(node.identifiers)
        return [
            part.handle
            for part in self.target.weak_parts_of(parent)
            if part.class_label == node.class_label and identifier_set(part.identifiers) == ids
        ]

    def _pick(self, node: EntityNode, candidates: List[int]) -> int:
        if len(candidates) > 1:
            ordered = sorted(candidates, key=lambda h: sort_key(self.target, h))
            logger.warning(
                f"{len(candidates)} nodes qualify to absorb a {node.class_label} node; "
                f"using {safe_entity_key(self.target, ordered[0])}"
            )
            return ordered[0]
        return candidates[0]

    def _unify_identifiers(self, handle: int, identifiers: Dict[str, Value]) -> None:
        existing = self.target.entity_nodes[handle]
        merged = dict(existing.identifiers)
        changed = False
        for name, value in identifiers.items():
            if name in merged:
                if not values_equal(merged[name], value):
                    raise ConflictingIdentifiers(safe_entity_key(self.target, handle), name)
            else:
                merged[name] = value
                changed = True
        if changed:
            old_key = safe_entity_key(self.target, handle)
            self.target._replace_identifiers(handle, merged)
            if self._keys.get(old_key) == handle:
                del self._keys[old_key]
            self._keys.setdefault(safe_entity_key(self.target, handle), handle)

    def _entity_order(self, source: GradGraph) -> List[int]:
        """Composition parents before their weak parts"""
        order: List[int] = []
        placed: Set[int] = set()

        def place(handle: int, trail: Set[int]) -> None:
            if handle in placed:
                return
            parent = source.parent_of(handle, EntityEdgeKind.COMPOSITION)
            if parent is not None and parent.handle not in trail:
                place(parent.handle, trail | {handle})
            placed.add(handle)
            order.append(handle)

        for handle in source.entity_nodes:
            place(handle, {handle})
        return order

    # ------------------------------------------------------------------
    # Merge
    # ------------------------------------------------------------------

    def merge(self, source: GradGraph, preset: Optional[Dict[int, int]] = None) -> Dict[int, int]:
        """Merge ``source`` into the target; returns the source-to-target handle mapping.

        ``preset`` fixes the target node of chosen source entity nodes.
        """
        target = self.target
        strict, target.strict = target.strict, False
        try:
            return self._merge(source, preset or {})
        finally:
            target.strict = strict

    def _merge(self, source: GradGraph, preset: Dict[int, int]) -> Dict[int, int]:
        target = self.target
        existing = set(target.entity_nodes)
        mapping: Dict[int, int] = {}
        unified: Set[int] = set()
        handled_edges: Set[int] = set()

        for handle in self._entity_order(source):
            node = source.entity_nodes[handle]
            parent_edge = source.parent_edge(handle, EntityEdgeKind.COMPOSITION)
            chosen: Optional[int] = preset.get(handle)

            if chosen is None:
                if parent_edge is not None and parent_edge.end in mapping:
                    parent = mapping[parent_edge.end]
                    if parent_edge.end in unified:
                        candidates = self._weak_candidates(source, node, parent)
                        if candidates:
                            chosen = self._pick(node, candidates)
                elif parent_edge is None:
                    rule = self.predicate.rule_for(node.class_label) if self.predicate else None
                    if rule is not None:
                        candidates = self._rule_candidates(node, rule, existing)
                        if candidates:
                            chosen = self._pick(node, candidates)
                    elif self.identity_fallback:
                        key = entity_key(source, handle)
                        found = self._keys.get(key)
                        if found is not None and (self.predicate is None or found in existing):
                            chosen = found

            if chosen is not None:
                self._unify_identifiers(chosen, node.identifiers)
                mapping[handle] = chosen
                unified.add(handle)
                continue

            created = target.add_entity_node(node.class_label, node.identifiers)
            mapping[handle] = created.handle
            if parent_edge is not None and parent_edge.end in mapping:
                self._merge_edge(source, parent_edge.handle, mapping)
                handled_edges.add(parent_edge.handle)
            self._keys.setdefault(safe_entity_key(target, created.handle), created.handle)

        for edge_handle in source.entity_edges:
            if edge_handle not in handled_edges:
                self._merge_edge(source, edge_handle, mapping)

        for handle, attribute in source.attribute_nodes.items():
            merged = target.add_attribute(mapping[attribute.parent], attribute.label)
            mapping[handle] = merged.handle
            mapping[source.attribute_edge_of(handle).handle] = target.attribute_edge_of(merged.handle).handle

        for handle, literal in source.literal_nodes.items():
            self._merge_literal(source, handle, mapping)

        self.unified_count += len(unified)
        return mapping

    def _merge_edge(self, source: GradGraph, edge_handle: int, mapping: Dict[int, int]) -> None:
        target = self.target
        edge = source.entity_edges[edge_handle]
        start, end = mapping[edge.start], mapping[edge.end]

        for existing in target.edges_between(start, end):
            if existing.label != edge.label:
                continue
            if existing.kind is not edge.kind:
                logger.warning(
                    f"Edge {edge.label} merged onto an existing {existing.kind.value} edge "
                    f"(incoming kind {edge.kind.value} dropped)"
                )
            attributes = dict(existing.attributes)
            for name, value in edge.attributes.items():
                if name not in attributes:
                    attributes[name] = value
                elif not values_equal(attributes[name], value):
                    logger.warning(
                        f"Edge {edge.label} attribute {name} conflict: keeping {attributes[name]!r}, dropping {value!r}"
                    )
            if attributes != existing.attributes:
                target._replace_edge_attributes(existing.handle, attributes)
            mapping[edge_handle] = existing.handle
            return

        if edge.kind.is_parent_kind:
            current = target.parent_edge(start, edge.kind)
            if current is not None:
                raise ConflictingParentEdge(
                    f"{safe_entity_key(target, start)} already has a {edge.kind.value} edge "
                    f"to {safe_entity_key(target, current.end)}"
                )
        created = target.add_entity_edge(start, end, edge.kind, edge.label, edge.attributes)
        mapping[edge_handle] = created.handle

    def _merge_literal(self, source: GradGraph, handle: int, mapping: Dict[int, int]) -> None:
        target = self.target
        literal = source.literal_nodes[handle]
        source_edge = source.literal_edge_of(handle)
        attribute = mapping[literal.parent]
        signature = context_set(source_edge.context)

        clash = False
        for sibling in target.literals_of(attribute):
            sibling_edge = target.literal_edge_of(sibling.handle)
            if context_set(sibling_edge.context) != signature:
                continue
            if canonical_value(sibling.value) == canonical_value(literal.value):
                mapping[handle] = sibling.handle
                mapping[source_edge.handle] = sibling_edge.handle
                return
            clash = True

        if clash:
            owner = target.attribute_nodes[attribute]
            logger.warning(
                f"DuplicateLiteralContext: {owner.label} of {safe_entity_key(target, owner.parent)} "
                f"keeps values side by side under context {source_edge.context}"
            )
        created = target._add_literal(attribute, literal.value, source_edge.context, warn=False)
        mapping[handle] = created.handle
        mapping[source_edge.handle] = target.literal_edge_of(created.handle).handle
