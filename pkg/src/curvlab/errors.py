"""Exception types shared across the package."""


class CurvlabError(Exception):
    """Base class for package-specific failures."""


class GeometryError(CurvlabError):
    """A metric is degenerate or not positive definite where it must be."""


class ParseError(CurvlabError):
    """Malformed metric-definition text."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "") + ": "
        super().__init__(where + message)


class GenerationError(CurvlabError):
    """Random metric generation failed to produce a positive-definite metric."""


class NullspaceError(CurvlabError):
    """The constraint system does not have a one-dimensional nullspace."""

    def __init__(self, dimension: int, singular_values):
        self.dimension = dimension
        self.singular_values = list(map(float, singular_values))
        super().__init__(
            f"nullspace dimension is {dimension}, expected 1; "
            f"singular values: {self.singular_values}"
        )
