"""Exception hierarchy shared by the store, the services and the CLI."""

from typing import Any, List, Optional


class GradError(Exception):
    """Base class for every engine error"""

    code = "GradError"

    def __init__(self, message: str = "", code: Optional[str] = None):
        super().__init__(message or self.code)
        if code:
            self.code = code

    @property
    def message(self) -> str:
        return str(self.args[0]) if self.args else self.code


class GraphIntegrityError(GradError):
    """A mutation would break a structural invariant of the store"""

    code = "GraphIntegrityError"


class EmptyLabel(GraphIntegrityError):
    code = "EmptyLabel"


class EmptyIdentifier(GraphIntegrityError):
    code = "EmptyIdentifier"


class DuplicateIdentity(GraphIntegrityError):
    code = "DuplicateIdentity"


class UnknownNode(GraphIntegrityError):
    code = "UnknownNode"


class DuplicateParentEdge(GraphIntegrityError):
    code = "DuplicateParentEdge"


class DuplicateEdgeLabelPair(GraphIntegrityError):
    code = "DuplicateEdgeLabelPair"


class CompositeContextValue(GraphIntegrityError):
    code = "CompositeContextValue"


class UnsupportedElement(GraphIntegrityError):
    code = "UnsupportedElement"


class IdentityCycle(GraphIntegrityError):
    code = "IdentityCycle"


class InvalidValue(GradError):
    code = "InvalidValue"


class IncomparableTypes(GradError):
    code = "IncomparableTypes"


class InvalidPattern(GradError):
    """Raised with the list of validity issues found in a pattern"""

    code = "InvalidPattern"

    def __init__(self, issues: List[Any]):
        self.issues = list(issues)
        rules = ", ".join(sorted({issue.rule for issue in self.issues}))
        super().__init__(f"invalid pattern: {rules}")


class CapExceeded(GradError):
    code = "CapExceeded"


class TemplateError(GradError):
    code = "TemplateError"


class UnboundTemplateVariable(TemplateError):
    code = "UnboundTemplateVariable"


class TemplateNotGradCompliant(TemplateError):
    code = "TemplateNotGradCompliant"


class ConflictingIdentifiers(GradError):
    """Two unified entity nodes disagree on a shared identifier"""

    code = "ConflictingIdentifiers"

    def __init__(self, key: Any, name: str):
        self.key = key
        self.name = name
        super().__init__(f"identifier {name} conflicts on {key}")


class ConflictingParentEdge(GradError):
    code = "ConflictingParentEdge"


class SpecError(GradError):
    """Malformed pattern, template, constraint or predicate document"""

    code = "SpecError"


class ParseError(GradError):
    code = "ParseError"

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class UnsupportedVersion(GradError):
    code = "UnsupportedVersion"


class SinkError(GradError):
    code = "SinkError"


class SourceError(GradError):
    """An input file exists but cannot be read as text"""

    code = "SourceError"


class MissingInput(GradError):
    """A file named on the command line does not exist"""

    code = "MissingInput"


class MappingError(GradError):
    code = "MappingError"


class TypeCoercionError(MappingError):
    code = "TypeCoercionError"
