"""Exception hierarchy shared across the package."""


class ChartshotError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ChartshotError, ValueError):
    """A domain object was constructed with values that break its invariants."""


# chart_data
class EmptyInput(ValidationError):
    pass


class MalformedRow(ValidationError):
    pass


class InconsistentArity(ValidationError):
    pass


# vdt_builder
class InvalidHex(ValidationError):
    pass


class InconsistentSeries(ValidationError):
    pass


class XmlError(ChartshotError):
    pass


class MissingFill(ChartshotError):
    pass


class UnresolvableLabel(ChartshotError):
    pass


# prompt_kit
class SpecInvariantViolation(ValidationError):
    pass


class ParseError(ChartshotError):
    """A chain-of-reasoning text has no final-answer sentence."""


# llm_gateway
class GatewayError(ChartshotError):
    """Base for completion-endpoint failures."""

    transient = False


class AuthError(GatewayError):
    pass


class RateLimited(GatewayError):
    transient = True


class TransportError(GatewayError):
    transient = True


class MalformedResponse(GatewayError):
    pass


# bench
class SchemaError(ChartshotError):
    def __init__(self, message: str, path=None, index=None):
        self.path = path
        self.index = index
        where = ""
        if path is not None:
            where = f" [{path}" + (f" record {index}" if index is not None else "") + "]"
        super().__init__(message + where)
