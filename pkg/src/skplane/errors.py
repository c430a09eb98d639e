"""Exception hierarchy shared across the package."""


class SkplaneError(Exception):
    """Base class for all package errors."""


# -- ingest ----------------------------------------------------------------

class MissingColumn(SkplaneError):
    """Configured header column absent from the CSV."""


class MalformedRow(SkplaneError):
    """A CSV row could not be parsed; carries the 1-based row number."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class DuplicateKey(SkplaneError):
    """The same (symbol, date) pair appeared more than once."""


class InsufficientData(SkplaneError):
    """Too few observations to compute returns."""


class NonPositiveValue(SkplaneError):
    """A value that must be strictly positive was not."""


# -- moments ---------------------------------------------------------------

class TooShort(SkplaneError):
    """Window has fewer values than the estimator needs."""


class ZeroVariance(SkplaneError):
    """All values in a window are equal."""


class EmptyInput(SkplaneError):
    """Empty value list where at least one element is required."""


# -- plane -----------------------------------------------------------------

class EmptyPanel(SkplaneError):
    """Operation requires a non-empty moment panel."""


# -- econometrics ----------------------------------------------------------

class NonFiniteValue(SkplaneError):
    """A design input (S, K or the era dummy) is not finite."""


class RankDeficient(SkplaneError):
    """Design matrix columns are collinear; names the offending terms."""

    def __init__(self, terms):
        super().__init__(f"collinear design columns: {', '.join(terms)}")
        self.terms = tuple(terms)


class TooFewRows(SkplaneError):
    """Fewer rows than columns in the design."""


class TooFewGroups(SkplaneError):
    """Random effects needs at least two groups."""


class WrongEstimator(SkplaneError):
    """Test requested on a fit from the wrong estimator."""


class UnknownTerm(SkplaneError):
    """Requested coefficient name not present in the fit."""


class SingularSubcovariance(SkplaneError):
    """Sub-covariance of the tested terms is not invertible."""


# -- synth -----------------------------------------------------------------

class InvalidConfig(SkplaneError):
    """Synthetic-data configuration violates its constraints."""


class Singular(SkplaneError):
    """Normal-equation system is singular (oracle solver)."""
