"""Exception hierarchy shared by all transdyn modules."""


class TransdynError(Exception):
    """Base class for all library errors."""


class InvalidEpsilonError(TransdynError):
    """Radius must be a positive rational."""


class MetricViolationError(TransdynError):
    """Distance table fails a metric axiom; message names the offending entries."""


class InvalidMapError(TransdynError):
    """Lookup table or block-code rule is not a total self-map."""


class InvalidIndexError(TransdynError):
    """Sequence/word index out of range."""


class InvalidSequenceError(TransdynError):
    """Prefix/period description is malformed."""


class BackendMismatchError(TransdynError):
    """Operation combined objects living on different space backends."""


class HorizonError(TransdynError):
    """Bounded symbolic computation exceeded its configured horizon or window cap."""


class PreconditionError(TransdynError):
    """Caller violated a documented precondition (e.g. non-surjective family)."""


class PerfectSpaceRequiredError(PreconditionError):
    """Checker variant is only meaningful on perfect spaces and was not overridden."""


class DegenerateTopologyError(PreconditionError):
    """Compact-subfamily property requested on a family where it is vacuous."""


class UnknownVariantError(TransdynError):
    """Condition id is not registered for the requested property."""


class InvalidMorphismError(TransdynError):
    """Map pair fails the morphism requirements (surjectivity / intertwining)."""


class ClosureBoundError(TransdynError):
    """Semigroup closure grew past the caller-supplied bound."""


class DocumentError(TransdynError):
    """System document rejected; carries a 1-based line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
