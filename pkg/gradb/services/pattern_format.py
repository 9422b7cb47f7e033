"""Text formats for patterns, templates, constraint sets and join predicates.

The grammar of each format is documented in FORMATS.md.
"""

import logging
import re
import shlex
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Tuple, Union

from pydantic import ValidationError

from gradb.core.config import settings
from gradb.core.exceptions import GradError, SourceError, SpecError
from gradb.models.elements import EntityEdgeKind
from gradb.models.values import ComparisonOp
from gradb.schemas.algebra import (
    GraphTemplate,
    JoinPredicate,
    MergeRule,
    TemplateAttribute,
    TemplateEdge,
    TemplateEntity,
    TemplateLiteral,
    TemplateValue,
)
from gradb.schemas.constraints import Assertion, ConstraintSet, Multiplicity, Range
from gradb.schemas.pattern import (
    AtomicPredicate,
    EdgeKind,
    GraphPattern,
    NodeKind,
    PatternEdge,
    PatternNode,
    PredicateTarget,
)
from gradb.services.codec import decode_value, encode_value

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

OPERATORS = {"<", "<=", "=", ">=", ">", "!=", "≤", "≥", "≠", "==", "<>"}
SLOT = re.compile(r"^\$\{([^.{}]+)\.([^{}]+)\}$")
RANGE = re.compile(r"\[([^\]]*)\]")


def _lines(text: str) -> Iterator[Tuple[int, str]]:
    """Non-blank, non-comment lines with their 1-based numbers"""
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped and not stripped.startswith("#"):
            yield number, stripped


def _tokens(number: int, line: str) -> List[str]:
    try:
        return shlex.split(line)
    except ValueError as e:
        raise SpecError(f"line {number}: {e}")


def _sections(text: str, names: Tuple[str, ...]) -> Iterator[Tuple[str, int, str]]:
    section: Optional[str] = None
    for number, line in _lines(text):
        if line in names:
            section = line
            continue
        if section is None:
            raise SpecError(f"line {number}: expected one of the section headers {', '.join(names)}")
        yield section, number, line


def _read(path: PathLike) -> str:
    try:
        return Path(path).read_text(encoding=settings.FILE_ENCODING)
    except (OSError, UnicodeDecodeError) as e:
        logger.error(f"Error reading {path}: {e}")
        raise SourceError(f"cannot read {path}: {e}")


def _constant(number: int, token: str):
    """A tag-first typed constant such as ``f:7``, decoded like grad/1 values"""
    try:
        return decode_value(token, escaped=False)
    except GradError as e:
        raise SpecError(f"line {number}: {e.message}")


def _quote(text: str) -> str:
    return shlex.quote(text)


# ----------------------------------------------------------------------
# Patterns
# ----------------------------------------------------------------------


def _parse_target(number: int, token: str) -> Tuple[PredicateTarget, Optional[str]]:
    head, _, name = token.partition(".")
    try:
        target = PredicateTarget(head)
    except ValueError:
        raise SpecError(f"line {number}: unknown predicate target {token!r}")
    if target.is_named != bool(name):
        raise SpecError(f"line {number}: predicate target {token!r} is malformed")
    return target, name or None


def _parse_predicates(number: int, tokens: List[str]) -> List[AtomicPredicate]:
    if len(tokens) % 3:
        raise SpecError(f"line {number}: predicates are written 'target op type:value'")
    predicates = []
    for index in range(0, len(tokens), 3):
        target, name = _parse_target(number, tokens[index])
        op = tokens[index + 1]
        if op not in OPERATORS:
            raise SpecError(f"line {number}: unknown operator {op!r}")
        predicates.append(
            AtomicPredicate(target=target, name=name, op=op, constant=_constant(number, tokens[index + 2]))
        )
    return predicates


def _label_shorthand(
    number: int, tokens: List[str], target: PredicateTarget
) -> Tuple[List[AtomicPredicate], List[str]]:
    if len(tokens) >= 2 and tokens[0] in OPERATORS:
        return [AtomicPredicate(target=target, op=tokens[0], constant=tokens[1])], tokens[2:]
    return [], tokens


def parse_pattern(text: str) -> GraphPattern:
    """Parse the ``nodes`` / ``edges`` pattern format"""
    nodes: List[PatternNode] = []
    edges: List[PatternEdge] = []
    try:
        for section, number, line in _sections(text, ("nodes", "edges")):
            tokens = _tokens(number, line)
            if section == "nodes":
                if len(tokens) < 2:
                    raise SpecError(f"line {number}: node lines start with 'var kind'")
                try:
                    kind = NodeKind(tokens[1])
                except ValueError:
                    raise SpecError(f"line {number}: unknown node kind {tokens[1]!r}")
                labels, rest = _label_shorthand(number, tokens[2:], PredicateTarget.NODE_LABEL)
                nodes.append(PatternNode(var=tokens[0], kind=kind, predicates=labels + _parse_predicates(number, rest)))
                continue

            if len(tokens) < 3:
                raise SpecError(f"line {number}: edge lines start with 'start end kind'")
            var = None
            if len(tokens) > 3 and tokens[-1].startswith("@"):
                var = tokens.pop()[1:]
            kind_token, _, entity_kind = tokens[2].partition(":")
            try:
                kind = EdgeKind(kind_token)
                edge_kind = EntityEdgeKind(entity_kind) if entity_kind else None
            except ValueError:
                raise SpecError(f"line {number}: unknown edge kind {tokens[2]!r}")
            labels, rest = _label_shorthand(number, tokens[3:], PredicateTarget.EDGE_LABEL)
            edges.append(
                PatternEdge(
                    start_var=tokens[0],
                    end_var=tokens[1],
                    kind=kind,
                    entity_kind=edge_kind,
                    predicates=labels + _parse_predicates(number, rest),
                    var=var,
                )
            )
    except ValidationError as e:
        raise SpecError(f"invalid pattern: {e.errors()[0]['msg']}")
    return GraphPattern(nodes=nodes, edges=edges)


def _format_predicates(predicates: List[AtomicPredicate], shorthand: PredicateTarget) -> List[str]:
    parts: List[str] = []
    rest = predicates
    if predicates and predicates[0].target is shorthand and isinstance(predicates[0].constant, str):
        parts += [predicates[0].op.value, _quote(predicates[0].constant)]
        rest = predicates[1:]
    for predicate in rest:
        target = predicate.target.value + (f".{predicate.name}" if predicate.name else "")
        parts += [_quote(target), predicate.op.value, _quote(encode_value(predicate.constant, escaped=False))]
    return parts


def format_pattern(pattern: GraphPattern) -> str:
    lines = ["nodes"]
    for node in pattern.nodes:
        parts = [_quote(node.var), node.kind.value] + _format_predicates(node.predicates, PredicateTarget.NODE_LABEL)
        lines.append("  " + " ".join(parts))
    lines.append("edges")
    for edge in pattern.edges:
        kind = edge.kind.value + (f":{edge.entity_kind.value}" if edge.entity_kind else "")
        parts = [_quote(edge.start_var), _quote(edge.end_var), kind]
        parts += _format_predicates(edge.predicates, PredicateTarget.EDGE_LABEL)
        if edge.var:
            parts.append(_quote("@" + edge.var))
        lines.append("  " + " ".join(parts))
    return "\n".join(lines) + "\n"


def load_pattern(path: PathLike) -> GraphPattern:
    return parse_pattern(_read(path))


# ----------------------------------------------------------------------
# Templates
# ----------------------------------------------------------------------


def _template_value(number: int, token: str, bare: bool = False) -> TemplateValue:
    slot = SLOT.match(token)
    if slot:
        return TemplateValue.slot(slot.group(1), slot.group(2))
    if bare:
        return TemplateValue.of(token)
    return TemplateValue.of(_constant(number, token))


def _template_map(number: int, tokens: List[str]) -> Dict[str, TemplateValue]:
    result: Dict[str, TemplateValue] = {}
    for token in tokens:
        name, sep, value = token.partition("=")
        if not sep or not name:
            raise SpecError(f"line {number}: expected name=value, got {token!r}")
        if name in result:
            raise SpecError(f"line {number}: {name} given twice")
        result[name] = _template_value(number, value)
    return result


def parse_template(text: str) -> GraphTemplate:
    """Parse a composition template: a GRAD fragment with ``${var.field}`` slots"""
    template = GraphTemplate()
    try:
        for section, number, line in _sections(text, ("nodes", "edges")):
            tokens = _tokens(number, line)
            if section == "nodes":
                if len(tokens) < 3:
                    raise SpecError(f"line {number}: template node lines start with 'var kind ...'")
                var, kind = tokens[0], tokens[1]
                if kind == "entity":
                    template.entities.append(
                        TemplateEntity(
                            var=var,
                            class_label=_template_value(number, tokens[2], bare=True),
                            identifiers=_template_map(number, tokens[3:]),
                        )
                    )
                elif kind == "attribute":
                    if len(tokens) != 4:
                        raise SpecError(f"line {number}: attribute lines are 'var attribute ENTITYVAR LABEL'")
                    template.attributes.append(
                        TemplateAttribute(
                            var=var, entity_var=tokens[2], label=_template_value(number, tokens[3], bare=True)
                        )
                    )
                elif kind == "literal":
                    if len(tokens) < 4:
                        raise SpecError(f"line {number}: literal lines are 'var literal ATTRVAR value [name=value...]'")
                    template.literals.append(
                        TemplateLiteral(
                            var=var,
                            attribute_var=tokens[2],
                            value=_template_value(number, tokens[3]),
                            context=_template_map(number, tokens[4:]),
                        )
                    )
                else:
                    raise SpecError(f"line {number}: unknown template node kind {kind!r}")
                continue

            if len(tokens) < 4:
                raise SpecError(f"line {number}: template edge lines are 'start end KIND LABEL [name=value...]'")
            try:
                kind = EntityEdgeKind(tokens[2])
            except ValueError:
                raise SpecError(f"line {number}: unknown entity edge kind {tokens[2]!r}")
            template.edges.append(
                TemplateEdge(
                    start_var=tokens[0],
                    end_var=tokens[1],
                    kind=kind,
                    label=_template_value(number, tokens[3], bare=True),
                    attributes=_template_map(number, tokens[4:]),
                )
            )
    except ValidationError as e:
        raise SpecError(f"invalid template: {e.errors()[0]['msg']}")
    return template


def _format_template_value(value: TemplateValue, bare: bool = False) -> str:
    if value.is_slot:
        return f"${{{value.var}.{value.field}}}"
    if bare and isinstance(value.constant, str):
        return value.constant
    return encode_value(value.constant, escaped=False)


def _format_template_map(values: Dict[str, TemplateValue]) -> List[str]:
    return [_quote(f"{name}={_format_template_value(values[name])}") for name in sorted(values)]


def format_template(template: GraphTemplate) -> str:
    lines = ["nodes"]
    for entity in template.entities:
        parts = [_quote(entity.var), "entity", _quote(_format_template_value(entity.class_label, bare=True))]
        lines.append("  " + " ".join(parts + _format_template_map(entity.identifiers)))
    for attribute in template.attributes:
        parts = [_quote(attribute.var), "attribute", _quote(attribute.entity_var)]
        parts.append(_quote(_format_template_value(attribute.label, bare=True)))
        lines.append("  " + " ".join(parts))
    for literal in template.literals:
        parts = [_quote(literal.var), "literal", _quote(literal.attribute_var)]
        parts.append(_quote(_format_template_value(literal.value)))
        lines.append("  " + " ".join(parts + _format_template_map(literal.context)))
    lines.append("edges")
    for edge in template.edges:
        parts = [_quote(edge.start_var), _quote(edge.end_var), edge.kind.value]
        parts.append(_quote(_format_template_value(edge.label, bare=True)))
        lines.append("  " + " ".join(parts + _format_template_map(edge.attributes)))
    return "\n".join(lines) + "\n"


def load_template(path: PathLike) -> GraphTemplate:
    return parse_template(_read(path))


# ----------------------------------------------------------------------
# Constraint sets
# ----------------------------------------------------------------------


def parse_range(text: str) -> Range:
    """``*``, ``N`` or ``min..max`` with ``*`` as an unbounded maximum"""
    text = text.strip()
    try:
        if text == "*":
            return Range()
        low, sep, high = text.partition("..")
        if not sep:
            return Range(min=int(low), max=int(low))
        return Range(min=int(low), max=None if high.strip() == "*" else int(high))
    except ValueError as e:
        raise SpecError(f"bad multiplicity range {text!r}: {e}")


def check_multiplicity_kind(multiplicity: Multiplicity) -> None:
    """Reject multiplicities that no graph respecting typed-edge semantics could meet"""
    kind = multiplicity.edge_kind
    if kind is None or not kind.is_parent_kind:
        return
    upper = multiplicity.forward_range.max
    if upper is None or upper > 1:
        raise SpecError(
            f"MultiplicityConflict: {multiplicity} allows more than one outgoing {kind.value} edge"
        )


def parse_multiplicity(line: str, number: int = 0) -> Multiplicity:
    brackets = RANGE.findall(line)
    first = line.find("[")
    if first < 0:
        raise SpecError(f"line {number}: multiplicity lines need [min..max] ranges")
    head = _tokens(number, line[:first])
    tail = _tokens(number, RANGE.sub(" ", line[first:]))
    if len(head) != 3:
        raise SpecError(f"line {number}: multiplicity lines start with 'SOURCE LABEL TARGET'")

    ranges: List[str] = []
    for bracket in brackets:
        ranges.extend(bracket.split(","))
    if len(ranges) != 2:
        raise SpecError(f"line {number}: expected a forward and a backward range, got {len(ranges)}")
    if len(tail) > 1:
        raise SpecError(f"line {number}: unexpected tokens after ranges: {' '.join(tail)}")

    try:
        edge_kind = EntityEdgeKind(tail[0]) if tail else None
        multiplicity = Multiplicity(
            source_class=head[0],
            edge_label=head[1],
            target_class=head[2],
            forward_range=parse_range(ranges[0]),
            backward_range=parse_range(ranges[1]),
            edge_kind=edge_kind,
        )
    except (ValueError, ValidationError) as e:
        raise SpecError(f"line {number}: {e}")
    check_multiplicity_kind(multiplicity)
    return multiplicity


def parse_constraints(text: str, pattern_loader: Optional[Callable[[str], GraphPattern]] = None) -> ConstraintSet:
    """Parse a constraint file; ``pattern_loader`` resolves assertion pattern references"""
    pattern_loader = pattern_loader or load_pattern
    constraints = ConstraintSet()
    for section, number, line in _sections(text, ("assertions", "multiplicities")):
        if section == "multiplicities":
            constraints.multiplicities.append(parse_multiplicity(line, number))
            continue

        tokens = _tokens(number, line)
        if len(tokens) != 3:
            raise SpecError(f"line {number}: assertion lines are 'name pattern_path anchor[,anchor]'")
        name, reference, anchors = tokens
        try:
            pattern = pattern_loader(reference)
        except (OSError, SourceError) as e:
            raise SpecError(f"line {number}: cannot read pattern {reference}: {e}")
        try:
            constraints.assertions.append(
                Assertion(name=name, pattern=pattern, anchor_vars=[a for a in anchors.split(",") if a])
            )
        except ValidationError as e:
            raise SpecError(f"line {number}: {e.errors()[0]['msg']}")
    return constraints


def format_constraints(constraints: ConstraintSet, pattern_paths: Optional[Dict[str, str]] = None) -> str:
    pattern_paths = pattern_paths or {}
    lines = ["assertions"]
    for assertion in constraints.assertions:
        reference = pattern_paths.get(assertion.name, f"{assertion.name}.pattern")
        lines.append(f"  {_quote(assertion.name)} {_quote(reference)} {','.join(assertion.anchor_vars)}")
    lines.append("multiplicities")
    for multiplicity in constraints.multiplicities:
        parts = [_quote(multiplicity.source_class), _quote(multiplicity.edge_label), _quote(multiplicity.target_class)]
        parts += [str(multiplicity.forward_range), str(multiplicity.backward_range)]
        if multiplicity.edge_kind:
            parts.append(multiplicity.edge_kind.value)
        lines.append("  " + " ".join(parts))
    return "\n".join(lines) + "\n"


def load_constraints(path: PathLike) -> ConstraintSet:
    """Load a constraint file; assertion pattern paths are relative to it"""
    base = Path(path).parent
    return parse_constraints(_read(path), pattern_loader=lambda ref: load_pattern(base / ref))


# ----------------------------------------------------------------------
# Join predicates
# ----------------------------------------------------------------------


def parse_join_predicate(text: str) -> JoinPredicate:
    """One ``CLASS name[,name...]`` merge rule per line"""
    rules = []
    for number, line in _lines(text):
        tokens = _tokens(number, line)
        if len(tokens) < 2:
            raise SpecError(f"line {number}: join rules are 'CLASS name[,name...]'")
        names = [name for token in tokens[1:] for name in token.split(",") if name]
        try:
            rules.append(MergeRule(class_label=tokens[0], match_on=names))
        except ValidationError as e:
            raise SpecError(f"line {number}: {e.errors()[0]['msg']}")
    return JoinPredicate(rules=rules)


def format_join_predicate(predicate: JoinPredicate) -> str:
    return "".join(f"{_quote(rule.class_label)} {','.join(rule.match_on)}\n" for rule in predicate.rules)


def load_join_predicate(path: PathLike) -> JoinPredicate:
    return parse_join_predicate(_read(path))
