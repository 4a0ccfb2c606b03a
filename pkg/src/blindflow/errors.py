"""Exception types shared across the package.

ValidationError marks bad user input (malformed files, out-of-range
parameters, guard violations).  InvariantError marks a broken internal
contract: a scheduler emitting garbage, a conservation check failing, an
infeasible certificate.  The CLI maps them to exit codes 1 and 2.
"""


class ValidationError(ValueError):
    """Raised when user-supplied input fails validation."""


class InvariantError(RuntimeError):
    """Raised when an internal invariant that should always hold is violated."""
