"""Exception hierarchy shared by every module."""


class ScvxError(Exception):
    """Base class for all library errors."""


class Undetermined(ScvxError):
    """A countable sum could not be certified within the truncation budget."""


class OrbitUnbounded(ScvxError):
    pass


class NoFamily(ScvxError):
    """The space has no implemented finite coseparating family."""


class NotAffine(ScvxError):
    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class UnknownAtom(ScvxError):
    pass


class SpaceMismatch(ScvxError):
    pass


class NotSigmaAlgebra(ScvxError):
    pass


class NotMeasurableSet(ScvxError):
    pass


class NotMeasurable(ScvxError):
    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class OutOfRange(ScvxError):
    pass


class InvalidFunctional(ScvxError):
    def __init__(self, message, witness=()):
        super().__init__(message)
        self.witness = tuple(witness)


class NotWeaklyAveraging(InvalidFunctional):
    pass


class NotAdditive(InvalidFunctional):
    pass


class NegativeMass(InvalidFunctional):
    pass


class NotNatural(InvalidFunctional):
    """A generalized-point table breaks J(g . m) = g(J(m))."""


class NoBarycenter(ScvxError):
    pass


class GridMiss(ScvxError):
    pass


class NotDeterministic(ScvxError):
    pass


class Inconsistent(ScvxError):
    pass


class UnsupportedSubject(ScvxError):
    pass


class Unsupported(ScvxError):
    pass


class NotMonotone(ScvxError):
    def __init__(self, message, pair, partition):
        super().__init__(message)
        self.pair = pair
        self.partition = partition
