"""Exception types shared across the package."""


class SchemaError(ValueError):
    """Invalid attribute schema or configuration document."""


class ManifestError(ValueError):
    """Malformed or inconsistent signal manifest entry.

    Carries the offending line number when known so ingestion reports are
    actionable.
    """

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        prefix = ""
        if source is not None:
            prefix += f"{source}:"
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class DerivationError(ValueError):
    """A derivation rule cannot be applied to its inputs."""


class ExtractionError(ValueError):
    """An image file cannot be decoded or measured."""


class QueryError(ValueError):
    """An aggregation query references unknown attributes or bad parameters."""
