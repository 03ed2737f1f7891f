"""Exception hierarchy. Every error carries a short ``code`` used by the CLI."""


class CtreedError(Exception):
    code = "Error"


class UnknownPredicate(CtreedError):
    code = "UnknownPredicate"


class UnboundVariable(CtreedError):
    code = "UnboundVariable"


class ArityMismatch(CtreedError):
    code = "ArityMismatch"


class NonInjectiveRename(CtreedError):
    code = "NonInjectiveRename"


class PreconditionViolated(CtreedError):
    code = "PreconditionViolated"


class BudgetExceeded(CtreedError):
    code = "BudgetExceeded"


class ResourceExceeded(CtreedError):
    code = "ResourceExceeded"


class AtomOutsideUniverse(CtreedError):
    code = "AtomOutsideUniverse"


class UniverseMismatch(CtreedError):
    code = "UniverseMismatch"


class CapabilityMissing(CtreedError):
    code = "CapabilityMissing"


class InternalInconsistency(CtreedError):
    code = "InternalInconsistency"


class ShapeMismatch(CtreedError):
    code = "ShapeMismatch"


class InvalidStrategy(CtreedError):
    code = "InvalidStrategy"


class DomainRejected(CtreedError):
    code = "DomainRejected"


class InvalidAutomaton(CtreedError):
    code = "InvalidAutomaton"


class DuplicateCdVariable(CtreedError):
    code = "DuplicateCdVariable"


class NominalsNotSupported(CtreedError):
    code = "NominalsNotSupported"


class UnknownFeature(CtreedError):
    code = "UnknownFeature"


class UnknownIndividual(CtreedError):
    code = "UnknownIndividual"


class UnknownDomain(CtreedError):
    code = "UnknownDomain"


class UnsupportedConstruct(CtreedError):
    code = "UnsupportedConstruct"


class ParseError(CtreedError):
    """Malformed input text; ``line`` and ``col`` are 1-based."""

    code = "SyntaxError"

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{message} at line {line}, column {col}"
        super().__init__(message)
