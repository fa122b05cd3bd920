"""Exception types shared across the toolkit."""


class ReviewKitError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ReviewKitError):
    """Invalid pipeline configuration.

    Carries every validation problem found, not just the first one.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class FetchError(ReviewKitError):
    """A host request failed after any applicable retries.

    ``status`` carries the HTTP status when one was received; 404 means the
    resource does not exist, which callers may treat as absence.
    """

    def __init__(self, message, retryable=False, status=None):
        super().__init__(message)
        self.retryable = retryable
        self.status = status


class PayloadError(ReviewKitError):
    """A host response could not be interpreted.

    ``field`` names the missing or malformed element when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ArchiveError(ReviewKitError):
    """A round archive is unreadable or structurally invalid."""


class SchemaVersionError(ArchiveError):
    """A round archive declares a schema version this build does not speak."""

    def __init__(self, found, supported):
        super().__init__(
            f"unsupported archive schema_version {found!r} (supported: {supported})"
        )
        self.found = found
        self.supported = supported


class LexError(ReviewKitError):
    """Java source text could not be tokenized."""

    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MethodExtractionError(ReviewKitError):
    """A file version could not be scanned for method declarations."""

    def __init__(self, message, path):
        super().__init__(f"{path}: {message}")
        self.path = path


class AbstractionError(ReviewKitError):
    """A method body could not be abstracted."""


class DatasetError(ReviewKitError):
    """Dataset construction failed (for example, too few instances to split)."""


class RuleFileError(ReviewKitError):
    """A relevance rule file is malformed; names the offending line."""

    def __init__(self, message, line_no):
        super().__init__(f"rule line {line_no}: {message}")
        self.line_no = line_no


class PredictionFormatError(ReviewKitError):
    """A prediction file violates the wire format; names the offending line."""

    def __init__(self, message, line_no):
        super().__init__(f"prediction line {line_no}: {message}")
        self.line_no = line_no


class DecodingError(ReviewKitError):
    """A sequence model failed while scoring; names the decode step."""

    def __init__(self, message, step):
        super().__init__(f"decode step {step}: {message}")
        self.step = step


class MissingArtifactError(ReviewKitError):
    """A pipeline input artifact is absent.

    ``producer`` names the subcommand that creates the artifact.
    """

    def __init__(self, path, producer):
        super().__init__(
            f"missing input artifact {path}; run `reviewkit {producer}` first"
        )
        self.path = str(path)
        self.producer = producer
