"""Exception hierarchy shared by all modules."""


class QHLorentzError(Exception):
    """Base class for every error raised by the package."""


class DivisionByZero(QHLorentzError, ZeroDivisionError):
    pass


class UnknownVariable(QHLorentzError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class EvaluationPole(QHLorentzError, ZeroDivisionError):
    pass


class TranscendentalValue(QHLorentzError, ValueError):
    """Substitution would produce a value outside the exact ring (e.g. exp(-2))."""


class NotDifferentiable(QHLorentzError, ValueError):
    """A formal derivative symbol was differentiated again."""


class NonlinearSystem(QHLorentzError, ValueError):
    pass


class Unsupported(QHLorentzError, ValueError):
    pass


class ParseError(QHLorentzError, ValueError):
    pass


class SingularMetric(QHLorentzError, ValueError):
    pass


class FlatMetric(QHLorentzError, ValueError):
    pass


class PdeMismatch(QHLorentzError, AssertionError):
    def __init__(self, pair, engine, reference):
        self.pair = pair
        self.engine = engine
        self.reference = reference
        super().__init__(
            f"component {pair}: engine gives {engine}, which is not a nonzero "
            f"rational multiple of {reference}"
        )


class NotAnAlgebra(QHLorentzError, ValueError):
    def __init__(self, i, j, residual):
        self.i = i
        self.j = j
        self.residual = residual
        super().__init__(f"bracket [e{i}, e{j}] = {residual} is not in the span of the basis")


class IrrationalDensity(QHLorentzError, ValueError):
    pass


class WrongCase(QHLorentzError, ValueError):
    pass
