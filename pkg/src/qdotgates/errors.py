"""Exception hierarchy shared by every layer of the simulator."""


class QDotError(Exception):
    """Base class for all simulator errors."""


class ArgumentError(QDotError, ValueError):
    """An argument is out of range or inconsistent with another argument."""


class NumericalContractError(QDotError, ArithmeticError):
    """A numerical precondition (e.g. Hermiticity) is violated."""


class DegenerateError(QDotError):
    """The requested quantity is ill-defined for the given input."""


class DegenerateGateError(DegenerateError):
    """A projected gate is too far from diagonal to carry a phase."""


class DegenerateGeometryError(DegenerateError):
    """A point lies on a trajectory, or a trajectory is otherwise ill-posed."""


class AdiabaticityError(DegenerateGeometryError):
    """The tracked potential minimum jumped between neighbouring trap positions."""
