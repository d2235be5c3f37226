"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2,
numerical failures exit 3, violated mathematical invariants exit 4.
"""


class CurveError(ValueError):
    """Invalid curve geometry (irregular, self-intersecting, degenerate)."""


class ConfigError(ValueError):
    """Invalid user input or configuration."""


class NumericsError(RuntimeError):
    """A numerical procedure failed or refused (solver breakdown,
    under-resolved grid, ill-conditioned linear system)."""


class InvariantError(RuntimeError):
    """A mathematical invariant that should hold was violated."""
