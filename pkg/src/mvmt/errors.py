"""Exception types shared across the package."""


class MvmtError(Exception):
    """Base class for all library errors."""


class ParseError(MvmtError):
    pass


class LatticeAxiomViolation(MvmtError):
    def __init__(self, axiom, witnesses):
        self.axiom = axiom
        self.witnesses = witnesses
        super().__init__(f"lattice axiom {axiom!r} fails on {witnesses}")


class FilterNotPrime(MvmtError):
    def __init__(self, law, pair, detail=""):
        self.law = law
        self.pair = pair
        super().__init__(f"filter violates {law} law on pair {pair}{detail}")


class CarrierNotClosed(MvmtError):
    def __init__(self, op, inputs, output):
        self.op = op
        self.inputs = inputs
        self.output = output
        super().__init__(f"op {op!r} on {inputs} escapes the carrier with {output!r}")


class UnknownElement(MvmtError):
    pass


class NoStrongConjunction(MvmtError):
    pass


class NoUnit(MvmtError):
    pass


class ArityMismatch(ParseError):
    pass


class UnknownSymbol(ParseError):
    pass


class NotASentence(MvmtError):
    pass


class BoundsTooLarge(MvmtError):
    pass


class ValueNotInCarrier(MvmtError):
    pass


class MissingTupleNoDefault(MvmtError):
    pass


class DomainMismatch(MvmtError):
    pass


class SignatureMismatch(MvmtError):
    pass


class AlgebraMismatch(MvmtError):
    pass


class GraphTooLarge(MvmtError):
    pass


class NoPositiveAtoms(MvmtError):
    pass


class CoreNotFound(MvmtError):
    pass


class NonIntegralAlgebra(MvmtError):
    pass


class FixtureDrift(MvmtError):
    pass
