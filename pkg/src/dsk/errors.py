"""Exception hierarchy shared by the toolkit modules."""


class DskError(Exception):
    """Base class for all toolkit errors."""


class ChatParseError(DskError):
    def __init__(self, message: str, line: int | None = None, span: str | None = None):
        detail = message
        if line is not None:
            detail += f" (line {line})"
        if span is not None:
            detail += f" in {span!r}"
        super().__init__(detail)
        self.line = line
        self.span = span


class AlignmentLoadError(DskError):
    def __init__(self, message: str, record: int | None = None):
        detail = message if record is None else f"{message} (record {record})"
        super().__init__(detail)
        self.record = record


class AlignmentMismatchError(DskError):
    pass


class InvalidDurationError(DskError):
    pass


class LexiconError(DskError):
    pass


class FeatureError(DskError):
    pass


class ManifestError(DskError):
    pass


class ModelError(DskError):
    pass
