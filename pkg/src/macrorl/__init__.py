"""macrorl: monetary-policy decision making as a discrete-action MDP.

Historical FRED data is distilled into a linear-Gaussian transition
model; tabular, deep, Bayesian, and policy-gradient agents plus rule
baselines are trained and compared on the resulting environment with
seeded, reproducible statistics.
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    agents,
    belief,
    benchmark,
    config,
    discretizers,
    dynamics,
    environment,
    evaluation,
    market_data,
    seeding,
)
from .errors import (  # noqa: F401
    DataError,
    DivergenceError,
    DomainError,
    FredParseError,
    InsufficientDataError,
    MacroRlError,
    MissingColumnError,
    ModelFileError,
    NumericError,
    SingularDesignError,
)
