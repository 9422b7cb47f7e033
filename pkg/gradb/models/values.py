"""Typed scalar and composite values stored on GRAD elements.

A Value is one of ``str``, ``int``, ``float``, ``bool`` or a non-empty ``tuple``
of Values (composite). ``bool`` is checked before ``int`` everywhere since it
is an ``int`` subclass.
"""

import math
from enum import Enum
from typing import Any, Tuple, Union

from gradb.core.exceptions import IncomparableTypes, InvalidValue

Scalar = Union[str, int, float, bool]
Value = Union[Scalar, Tuple[Any, ...]]


class ValueKind(str, Enum):
    TEXT = "text"
    NUMERIC = "numeric"
    BOOLEAN = "boolean"
    COMPOSITE = "composite"


class ComparisonOp(str, Enum):
    LT = "<"
    LE = "<="
    EQ = "="
    GE = ">="
    GT = ">"
    NE = "!="

    @classmethod
    def parse(cls, token: str) -> "ComparisonOp":
        aliases = {"≤": "<=", "≥": ">=", "≠": "!=", "==": "=", "<>": "!="}
        return cls(aliases.get(token, token))

    @property
    def is_equality(self) -> bool:
        return self in (ComparisonOp.EQ, ComparisonOp.NE)


# Rank of each kind in the canonical total order
_KIND_RANK = {
    ValueKind.BOOLEAN: 0,
    ValueKind.NUMERIC: 1,
    ValueKind.TEXT: 2,
    ValueKind.COMPOSITE: 3,
}


def value_kind(value: Any) -> ValueKind:
    """Classify a Python object as a Value kind"""
    if isinstance(value, bool):
        return ValueKind.BOOLEAN
    if isinstance(value, (int, float)):
        return ValueKind.NUMERIC
    if isinstance(value, str):
        return ValueKind.TEXT
    if isinstance(value, tuple):
        return ValueKind.COMPOSITE
    raise InvalidValue(f"unsupported value type: {type(value).__name__}")


def ensure_value(value: Any) -> Value:
    """Validate a Value, converting lists to composite tuples"""
    if isinstance(value, list):
        value = tuple(value)
    kind = value_kind(value)
    if kind is ValueKind.COMPOSITE:
        if not value:
            raise InvalidValue("composite values contain at least one element")
        return tuple(ensure_value(item) for item in value)
    return value


def is_scalar(value: Value) -> bool:
    return value_kind(value) is not ValueKind.COMPOSITE


def values_equal(a: Value, b: Value) -> bool:
    """Type-aware equality: cross-kind values are never equal"""
    kind = value_kind(a)
    if kind is not value_kind(b):
        return False
    if kind is ValueKind.COMPOSITE:
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    if kind is ValueKind.NUMERIC and _is_nan(a) and _is_nan(b):
        # NaN equals itself so that identity and content equality agree
        return True
    return a == b


def _is_nan(value: Value) -> bool:
    return isinstance(value, float) and math.isnan(value)


def compare_values(a: Value, op: Union[ComparisonOp, str], b: Value) -> bool:
    """Evaluate ``a op b``"""
    op = op if isinstance(op, ComparisonOp) else ComparisonOp.parse(op)

    if op is ComparisonOp.EQ:
        return values_equal(a, b)
    if op is ComparisonOp.NE:
        return not values_equal(a, b)

    kind_a, kind_b = value_kind(a), value_kind(b)
    if kind_a is not kind_b:
        raise IncomparableTypes(f"cannot order {kind_a.value} against {kind_b.value}")
    if kind_a in (ValueKind.BOOLEAN, ValueKind.COMPOSITE):
        raise IncomparableTypes(f"{kind_a.value} values support only = and !=")

    if kind_a is ValueKind.NUMERIC:
        # int widened to decimal
        a, b = float(a), float(b)

    if op is ComparisonOp.LT:
        return a < b
    if op is ComparisonOp.LE:
        return a <= b
    if op is ComparisonOp.GE:
        return a >= b
    return a > b


def canonical_value(value: Value) -> Tuple[Any, ...]:
    """Hashable, totally ordered form; numerically equal int/float share it"""
    kind = value_kind(value)
    if kind is ValueKind.COMPOSITE:
        return (_KIND_RANK[kind], tuple(canonical_value(item) for item in value))
    if kind is ValueKind.NUMERIC:
        if isinstance(value, float) and math.isnan(value):
            return (_KIND_RANK[kind], 1, 0)
        return (_KIND_RANK[kind], 0, value)
    return (_KIND_RANK[kind], value)


def render_value(value: Value) -> str:
    """Human-readable rendering used in keys and CLI tables"""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return "[" + ",".join(render_value(item) for item in value) + "]"
    return str(value)
