"""Type-tagged value encoding shared by the grad/1 format and the text formats.

``s:`` text, ``i:`` integer, ``f:`` decimal, ``b:`` boolean, ``c:[...]`` composite.
Inside composites and in grad/1 documents text is percent-encoded so that
separators never appear unescaped.
"""

import math
from typing import Dict, List
from urllib.parse import quote, unquote

from gradb.core.exceptions import InvalidValue
from gradb.models.values import Value, ensure_value

TAGS = ("s", "i", "f", "b", "c")


def escape(text: str) -> str:
    return quote(text, safe="")


def unescape(text: str) -> str:
    return unquote(text)


def encode_value(value: Value, escaped: bool = True) -> str:
    """Render a Value with its type tag"""
    if isinstance(value, bool):
        return "b:true" if value else "b:false"
    if isinstance(value, int):
        return f"i:{value}"
    if isinstance(value, float):
        return f"f:{repr(value)}"
    if isinstance(value, str):
        return "s:" + (escape(value) if escaped else value)
    if isinstance(value, tuple):
        return "c:[" + ",".join(encode_value(item, escaped=True) for item in value) + "]"
    raise InvalidValue(f"unsupported value type: {type(value).__name__}")


def _split_composite(body: str) -> List[str]:
    items, depth, current = [], 0, []
    for char in body:
        if char == "[":
            depth += 1
        elif char == "]":
            depth -= 1
            if depth < 0:
                raise InvalidValue("unbalanced ] in composite value")
        if char == "," and depth == 0:
            items.append("".join(current))
            current = []
        else:
            current.append(char)
    if depth != 0:
        raise InvalidValue("unbalanced [ in composite value")
    items.append("".join(current))
    return items


def decode_value(text: str, escaped: bool = True) -> Value:
    """Parse a tagged Value; raises InvalidValue on a malformed token"""
    tag, sep, body = text.partition(":")
    if not sep or tag not in TAGS:
        raise InvalidValue(f"bad type tag in {text!r}")

    if tag == "s":
        return unescape(body) if escaped else body
    if tag == "i":
        try:
            return int(body)
        except ValueError:
            raise InvalidValue(f"not an integer: {body!r}")
    if tag == "f":
        try:
            number = float(body)
        except ValueError:
            raise InvalidValue(f"not a decimal: {body!r}")
        if math.isnan(number) and body.lower() != "nan":
            raise InvalidValue(f"not a decimal: {body!r}")
        return number
    if tag == "b":
        if body not in ("true", "false"):
            raise InvalidValue(f"not a boolean: {body!r}")
        return body == "true"

    if not (body.startswith("[") and body.endswith("]")) or len(body) < 3:
        raise InvalidValue(f"composite values are written c:[v,...], got {text!r}")
    return ensure_value(tuple(decode_value(item, escaped=True) for item in _split_composite(body[1:-1])))


def encode_map(values: Dict[str, Value]) -> str:
    """``name=value;...`` sorted by name, ``-`` when empty"""
    if not values:
        return "-"
    return ";".join(f"{escape(name)}={encode_value(values[name])}" for name in sorted(values))


def decode_map(text: str) -> Dict[str, Value]:
    if text == "-":
        return {}
    result: Dict[str, Value] = {}
    for pair in text.split(";"):
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise InvalidValue(f"map entries are written name=value, got {pair!r}")
        name = unescape(name)
        if name in result:
            raise InvalidValue(f"name {name!r} repeated in map")
        result[name] = decode_value(value)
    return result
