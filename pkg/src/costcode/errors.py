"""Exception types shared across the package."""


class CostcodeError(Exception):
    """Base class for all package errors."""


class InvalidInputError(CostcodeError, ValueError):
    """Malformed argument: out-of-range symbol, bad probability, bad flag value."""


class ParseError(CostcodeError, ValueError):
    """Input file could not be parsed; message names the offending line."""

    def __init__(self, path: str, line_no: int, message: str):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class NonRegularCostError(CostcodeError):
    """Per-context capacity roots disagree beyond the regularity tolerance."""


class SupportBlowupError(CostcodeError):
    """Requested block length would materialize more symbols than allowed."""


class ExactnessUnavailableError(CostcodeError):
    """Instance too large for every exact smooth-entropy method."""


class PrecisionExhaustionError(CostcodeError):
    """Interval descent ran out of float resolution before terminating."""


class InvalidCodewordError(CostcodeError):
    """Decoder was handed a word that is not in the codebook."""


class CodebookInvariantError(CostcodeError):
    """A built codebook failed post-construction validation."""


class InfeasibleError(CostcodeError):
    """Search space excludes every solution (e.g. oracle cost budget too small)."""
