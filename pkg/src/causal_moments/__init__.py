"""Moments, product moments and bounds of causal effects from observational data."""
from .bounds import (Interval, correlation_bounds, kurtosis_bounds, moment_bounds, product_bounds,
                     skewness_bounds)
from .data import DomainBounds, ObservationTable, empirical_cdf, ingest_csv, parse_csv_text, read_csv
from .errors import (BootstrapFailure, CausalMomentsError, ConfigError, DegenerateEffectWarning,
                     EstimationQualityError, InvalidOrderError, NoDataError, ParseError, SchemaError,
                     TensorGridTooLargeError, ValidationError)
from .identify import (ArmPair, DerivedStats, Estimate, MomentRequest, ate, central_moment_identified,
                       central_product_moment_identified, correlation_identified, derived_stats,
                       estimate_moment, moment_identified, moment_profile, product_moment_identified,
                       product_profile)
from .quadrature import IntegrationConfig, Integrand, integrate, integrate_with_error

__version__ = "0.1.0"
