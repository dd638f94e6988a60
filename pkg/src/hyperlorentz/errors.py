"""Exception types shared across the package.

Validation-style failures (bad parameters, infeasible configurations)
derive from ValueError; the command line maps them to exit code 2.
Failures of a running computation derive from RuntimeError and map to
exit code 3.
"""


class ValidationError(ValueError):
    """A parameter or configuration value is unusable."""


class InfeasibleFieldError(ValidationError):
    """The requested Poisson field would exceed the expected-count cap."""


class RegionTooSmallError(ValidationError):
    """An obstacle field does not cover the requested simulation horizon."""


class RunawayError(RuntimeError):
    """An event loop exceeded its safety cap."""
