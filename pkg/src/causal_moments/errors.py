"""Exception hierarchy shared by every module in the package."""


class CausalMomentsError(Exception):
    """Base class for all errors raised by causal_moments."""


class SchemaError(CausalMomentsError):
    """A required CSV column is missing or the header is unusable."""


class ParseError(CausalMomentsError):
    """A CSV cell could not be parsed; carries the 1-based data row number."""

    def __init__(self, message, row):
        super().__init__(f"row {row}: {message}")
        self.row = row


class ValidationError(CausalMomentsError):
    """Input data or a specification violates an invariant."""


class NoDataError(CausalMomentsError):
    """An arm, stratum or table that an estimator needs is empty."""


class InvalidOrderError(CausalMomentsError):
    """Moment order must be a positive integer."""


class ConfigError(CausalMomentsError):
    """Integration or bootstrap configuration is inconsistent."""


class TensorGridTooLargeError(ConfigError):
    """Tensor-product grid requested for dimension >= 3 without opting in."""


class EstimationQualityError(CausalMomentsError):
    """Monte Carlo noise inverted a bound interval by more than its error budget."""


class BootstrapFailure(CausalMomentsError):
    """Every bootstrap replicate failed."""


class DegenerateEffectWarning(UserWarning):
    """A denominator fell below the guard value and was replaced."""


class QualityWarning(UserWarning):
    """Result is usable but degraded, e.g. many bootstrap replicates failed."""
