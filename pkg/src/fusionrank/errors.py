"""Exception hierarchy shared by every fusionrank module."""


class FusionRankError(Exception):
    """Base class. The CLI maps these to exit code 2."""


class InvalidAngleError(FusionRankError, ValueError):
    pass


class DegenerateTorsionError(FusionRankError, ValueError):
    pass


class ShapeError(FusionRankError, ValueError):
    pass


class SchemaError(FusionRankError, ValueError):
    pass


class ParseError(FusionRankError, ValueError):
    def __init__(self, message, row=None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class ValidationError(FusionRankError, ValueError):
    pass


class EmptyInputError(FusionRankError, ValueError):
    pass


class DomainError(FusionRankError, ValueError):
    pass


class SizeError(FusionRankError, ValueError):
    pass


class ConfigError(FusionRankError, ValueError):
    pass


class DegenerateTestError(FusionRankError, ValueError):
    pass


class FormatError(FusionRankError, ValueError):
    pass


class MetadataError(FormatError):
    pass


class FormatOverflowError(FormatError):
    pass
