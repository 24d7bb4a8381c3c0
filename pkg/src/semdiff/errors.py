"""Exception types shared across the toolkit."""


class SemdiffError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(SemdiffError):
    """A persisted record is malformed or violates an invariant.

    Carries the 1-based line number of the offending record when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ParseError(SemdiffError):
    """Subject source text failed to parse; ``side`` says which operand."""

    def __init__(self, message: str, side: str | None = None):
        self.side = side
        if side is not None:
            message = f"{side}: {message}"
        super().__init__(message)


class TreeTooLargeError(SemdiffError):
    """A syntax tree exceeded the node budget for tree edit distance."""


class StaleSiteError(SemdiffError):
    """A mutation site no longer matches the source it was derived from."""


class TransportError(SemdiffError):
    """Network or authentication failure talking to the model provider."""


class MalformedResponse(SemdiffError):
    """Provider reply could not be validated after exhausting retries."""


class InvalidRange(SemdiffError):
    """Provider primitive called with lo > hi."""


class RunnerCrashed(SemdiffError):
    """The runner process broke protocol (distinct from subject errors)."""


class RunnerNotFound(SemdiffError):
    """No runner executable was configured or found."""


class ConfigError(SemdiffError):
    """A configuration value violates its invariant."""


class EmptySeries(SemdiffError):
    """A statistics kernel was handed an empty series."""


class DegenerateInput(SemdiffError):
    """Correlation input is constant or too short to rank."""


class ZeroDenominator(SemdiffError):
    """Distinguishability denominator (mean inter score) is zero."""


class NotEnoughTasks(SemdiffError):
    """Cross-pairing was asked for more pairs than tasks allow."""


class NoFeasibleCandidate(SemdiffError):
    """Every threshold candidate left a corner region empty."""


class NoControlPoints(SemdiffError):
    """Boundary-distance statistics need at least one control-region point."""


class MissingScores(SemdiffError):
    """Records lack scores for a requested metric; lists the pair ids."""

    def __init__(self, metric: str, pair_ids: list[str]):
        self.metric = metric
        self.pair_ids = pair_ids
        shown = ", ".join(pair_ids[:5])
        more = "" if len(pair_ids) <= 5 else f" (+{len(pair_ids) - 5} more)"
        super().__init__(f"metric {metric!r} missing for pairs: {shown}{more}")
