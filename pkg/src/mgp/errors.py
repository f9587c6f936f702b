"""Exception types shared across the package."""


class NumericalDegeneracyError(RuntimeError):
    """A required matrix factorization or density is numerically degenerate.

    Raised when a Cholesky factorization fails after jitter, when every
    mixture component assigns zero density to conditioning data, or when
    an optimizer encounters a non-finite objective.
    """


class NotFittedError(ValueError):
    """A model method that needs a completed fit() was called before it."""
