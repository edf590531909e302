"""Fractional Poisson and Wright renewal processes.

Special functions (Mittag-Leffler, Wright, M-Wright), the one-sided stable
law, counting and Erlang distributions, renewal functions, exact samplers,
diffusion limits, and a Laplace-inversion oracle that cross-checks every
closed form.
"""

__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    CancellationError,
    ConvergenceError,
    DegenerateLawError,
    DomainError,
    PrecisionError,
    SamplingError,
)
from .specfun import EvalResult, Method, Order, m_wright, ml, ml_deriv, wright  # noqa: E402
from .stable import (  # noqa: E402
    StableLaw,
    inverse_subordinator_pdf,
    stable_cdf,
    stable_pdf,
    subordinator_pdf,
)
from .renewal_core import (  # noqa: E402
    CountingDistribution,
    DeltaLaw,
    ExponentialLaw,
    counting_probs,
    renewal_function,
)
from .processes import FractionalPoisson, WrightProcess, make_process  # noqa: E402
from .laplace_oracle import talbot_invert  # noqa: E402
from .montecarlo import RngStream, simulate_counting  # noqa: E402

__all__ = [
    "__version__",
    "CancellationError",
    "ConvergenceError",
    "DegenerateLawError",
    "DomainError",
    "PrecisionError",
    "SamplingError",
    "EvalResult",
    "Method",
    "Order",
    "ml",
    "ml_deriv",
    "wright",
    "m_wright",
    "StableLaw",
    "stable_pdf",
    "stable_cdf",
    "subordinator_pdf",
    "inverse_subordinator_pdf",
    "CountingDistribution",
    "ExponentialLaw",
    "DeltaLaw",
    "counting_probs",
    "renewal_function",
    "FractionalPoisson",
    "WrightProcess",
    "make_process",
    "talbot_invert",
    "RngStream",
    "simulate_counting",
]
