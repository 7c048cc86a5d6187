"""
Exception hierarchy shared by every module.

The CLI maps these onto exit codes (see src/commands/__init__.py):
  1 -> validation errors, 2 -> EnumerationTooLarge, 3 -> verification violations.
"""


class InfluenceError(Exception):
    """Base class for all library errors."""


class GraphFormatError(InfluenceError):
    """Edge-list text could not be parsed or failed validation."""

    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


class InvalidSeedError(InfluenceError):
    """A node id or budget lies outside the graph."""


class EnumerationTooLarge(InfluenceError):
    """An exact computation would exceed its resource guard."""

    def __init__(self, required: int, cap: int, what: str = "binary choices"):
        self.required = required
        self.cap = cap
        self.what = what
        super().__init__(f"exact enumeration needs {required} {what}, cap is {cap}")


class InconsistentRealisation(InfluenceError):
    """A partial realisation does not describe any live-edge graph of the influence graph."""


class PolicyViolation(InfluenceError):
    """An adaptive policy broke its |pi| = k contract."""


class MalformedTree(InfluenceError):
    """A materialised decision tree is structurally invalid for its graph."""


class ItemAlreadySelected(InfluenceError):
    """An SMSM item is already part of the partial state."""


class InvalidInstance(InfluenceError):
    """An SMSM instance, objective or instance family is ill-formed."""


class UnknownCheck(InfluenceError):
    """A verification check id is not registered."""
