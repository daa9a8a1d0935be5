"""Exception types shared across the package."""


class GaugelatError(Exception):
    """Base class for all package errors."""


class InvalidParameter(GaugelatError, ValueError):
    pass


class InvalidChain(InvalidParameter):
    pass


class UnsupportedGeometry(InvalidParameter):
    pass


class BasisMismatch(GaugelatError, ValueError):
    pass


class DecompositionFailure(GaugelatError, ArithmeticError):
    pass


class ContractViolation(GaugelatError, ArithmeticError):
    pass


class InvalidTransform(GaugelatError, ValueError):
    pass


class ExtractionError(GaugelatError, ArithmeticError):
    def __init__(self, msg, bond=None):
        super().__init__(msg if bond is None else f"{msg} (bond {bond})")
        self.bond = bond


class FitFailure(GaugelatError, ArithmeticError):
    pass


class InvalidFilter(GaugelatError, ValueError):
    pass


class RecordNotFound(GaugelatError, LookupError):
    pass


class RecipeError(GaugelatError, ValueError):
    def __init__(self, fields):
        self.fields = list(fields)
        super().__init__("invalid recipe: " + "; ".join(self.fields))
