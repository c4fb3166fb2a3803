"""Exceptions raised across the package."""


class OspError(Exception):
    """Base class for all package errors."""


class AmbiguousTop(OspError):
    pass


class UnknownAlternative(OspError):
    pass


class InvalidPartition(OspError):
    pass


class IncompatibleQuotas(OspError):
    pass


class ConstantRule(OspError):
    """A committee is trivial: the rule it induces never changes its outcome."""


class NotEmvr(OspError):
    """The table is not induced by any committee (its winning family is not monotone)."""


class IncompleteStrategy(OspError):
    pass


class SearchSpaceExceeded(OspError):
    """An exhaustive check would evaluate more combinations than the cap allows."""

    def __init__(self, needed: int, cap: int, what: str = "strategy combinations"):
        super().__init__(f"{what}: {needed} exceeds cap {cap}")
        self.needed = needed
        self.cap = cap


class IdenticalStrategies(OspError):
    pass


class EmptyChoiceLabel(OspError):
    pass


class HypothesisNotMet(OspError):
    pass


class PreconditionViolated(OspError):
    pass


class NotAntichain(OspError):
    pass


class NotOsp(OspError):
    pass


class ParseError(OspError):
    pass


class GoldenMismatch(OspError):
    pass
