"""Exception hierarchy.

Every error raised by the toolkit derives from :class:`PstGenError`.  The CLI
maps the three broad families onto exit codes: content problems (``1``),
missing files (``2``) and malformed structured documents (``3``).
"""

from __future__ import annotations


class PstGenError(Exception):
    exit_code = 1


# -- templates ---------------------------------------------------------------


class TemplateError(PstGenError):
    """A problem located in a template file."""

    def __init__(self, message: str, source_name: str = "<string>", line: int | None = None):
        self.message = message
        self.source_name = source_name
        self.line = line
        super().__init__(str(self))

    def __str__(self) -> str:
        where = self.source_name if self.line is None else f"{self.source_name}:{self.line}"
        return f"{where}: {self.message}"


class MalformedDirective(TemplateError):
    pass


class ParamMissingEquals(TemplateError):
    pass


class NoConnector(TemplateError):
    pass


class DuplicateConnector(TemplateError):
    pass


class StrayDirective(TemplateError):
    pass


class StrayCode(TemplateError):
    pass


class DuplicateParam(TemplateError):
    pass


class ReservedParam(TemplateError):
    pass


# -- trees -------------------------------------------------------------------


class PstError(PstGenError):
    pass


class UnknownConnector(PstError):
    pass


class UnmatchedConnector(PstError):
    def __init__(self, connector_ids, source_name: str = "<template>"):
        self.connector_ids = tuple(connector_ids)
        self.source_name = source_name
        ids = ", ".join(self.connector_ids)
        super().__init__(f"{source_name}: no link matches connector(s) {ids}")


class UnresolvedParam(PstError):
    def __init__(self, name: str, path: str):
        self.name = name
        self.path = path
        super().__init__(f"{path}: parameter ${{{name}}} has no definition in scope")


class SchemaError(PstGenError):
    """A structured document (PST JSON or manifest) does not match its schema."""

    exit_code = 3

    def __init__(self, message: str, path: str = "$"):
        self.path = path
        super().__init__(f"{path}: {message}")


# -- graphs ------------------------------------------------------------------


class GraphError(PstGenError):
    pass


class ForeignHandle(GraphError):
    pass


class EmptyDeps(GraphError):
    pass


class DuplicateNode(GraphError):
    pass


class NotValidated(GraphError):
    pass


class InvalidGraph(GraphError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(describe_violation(v) for v in self.violations)
        super().__init__(f"invalid control-flow graph: {lines}")


def describe_violation(v) -> str:
    fields = ", ".join(f"{k}={getattr(v, k)!r}" for k in v.__dataclass_fields__)
    return f"{type(v).__name__}({fields})"


# -- recipes and builds ------------------------------------------------------


class RecipeError(PstGenError):
    pass


class UnknownTemplate(RecipeError):
    pass


class UnknownDependency(RecipeError):
    pass


class BuildError(PstGenError):
    pass


class ContextUnderflow(BuildError):
    pass


class UnbalancedBuild(BuildError):
    pass


class ZeroGenerated(PstGenError, ValueError):
    pass
