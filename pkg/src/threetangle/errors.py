"""Exception hierarchy."""


class ThreeTangleError(Exception):
    """Base class for all errors raised by this package."""


class ZeroStateError(ThreeTangleError, ValueError):
    """A state vector with (numerically) vanishing norm was supplied."""


class IndexOutOfRangeError(ThreeTangleError, IndexError):
    """A qubit index outside 1..n was supplied."""


class RankExceededError(ThreeTangleError, ValueError):
    """The density matrix has more than two eigenvalues above the rank tolerance."""


class WrongArityError(ThreeTangleError, ValueError):
    """A state with the wrong number of qubits was passed."""


class DegenerateMeasureError(ThreeTangleError, ValueError):
    """The threetangle vanishes identically on the range of the mixture."""


class InfeasibleError(ThreeTangleError, ValueError):
    """The requested points cannot decompose the given mixture."""


class BadGridError(ThreeTangleError, ValueError):
    """Abscissae passed to the envelope routine are not strictly increasing."""


class ArityError(ThreeTangleError, ValueError):
    """Class parameters do not match the class arity."""


class NoPrintedDataError(ThreeTangleError, LookupError):
    """No closed-form eigen-system is tabulated for this reduction."""
