from typing import Any, Optional


class CoringCdgaError(ValueError):
    """base class; every error may carry a JSON-serializable witness"""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness

    def to_dict(self) -> dict:
        result = {"error": type(self).__name__, "message": str(self)}
        if self.witness is not None:
            result["witness"] = self.witness
        return result


# input handling
class ConfigError(CoringCdgaError):
    pass


class FormatError(CoringCdgaError):
    pass


class ShapeError(CoringCdgaError):
    pass


# algebras and modules
class NotAssociative(CoringCdgaError):
    pass


class NotUnital(CoringCdgaError):
    pass


class MissingAction(CoringCdgaError):
    pass


class NotSubmodule(CoringCdgaError):
    pass


# corings
class NotBased(CoringCdgaError):
    pass


class NoBasePoint(CoringCdgaError):
    pass


class NotCoring(CoringCdgaError):
    pass


# curved algebras
class LeibnizIncompatible(CoringCdgaError):
    pass


class CurvatureMismatch(CoringCdgaError):
    pass


class BianchiFailed(CoringCdgaError):
    pass


class DomainMismatch(CoringCdgaError):
    pass


class WindowTooNarrow(CoringCdgaError):
    pass


class NotMorphism(CoringCdgaError):
    pass


# pre-Galois and comatrix data
class NotProgenerator(CoringCdgaError):
    pass


class BNotClosed(CoringCdgaError):
    pass


class ConnectionNotIntegrable(CoringCdgaError):
    pass


# comodules
class HigherComponentsPresent(CoringCdgaError):
    pass


class NotClosed(CoringCdgaError):
    pass


class NotDegreeZero(CoringCdgaError):
    pass


class NotComodule(CoringCdgaError):
    pass


# contramodules and divergences
class ComponentLeibnizFailed(CoringCdgaError):
    pass


class NotRightBLinear(CoringCdgaError):
    pass


class NotComplex(CoringCdgaError):
    pass


class NotContramodule(CoringCdgaError):
    pass


class NotContramoduleMap(CoringCdgaError):
    pass


# catalog
class NotReflexive(CoringCdgaError):
    pass


class NotTransitive(CoringCdgaError):
    pass


class BowTieFailed(CoringCdgaError):
    pass
