"""Semantic exception hierarchy.

Exit-code mapping used by the CLI: DimensionCapError -> 3 (resource),
SpecError -> 2 (usage/parse), everything else surfacing as a check
failure -> 1.
"""


class CubeLabError(Exception):
    """Base class for all library errors."""


class DimensionCapError(CubeLabError):
    """A requested table would exceed the configured dimension cap."""

    def __init__(self, n: int, cap: int, what: str = "table"):
        self.n = n
        self.cap = cap
        super().__init__(
            f"dimension {n} exceeds the cap of {cap} for {what} "
            f"(override via the cap argument or CUBELAB_MAX_N)"
        )


class CoordinateError(CubeLabError, ValueError):
    """A coordinate index or coordinate set is out of range."""


class DomainError(CubeLabError, ValueError):
    """Input violates a mathematical precondition (wrong range/class)."""


class SimplexError(CubeLabError):
    """The feasibility LP solver failed numerically (not 'infeasible')."""


class RegressionError(CubeLabError):
    """Least-squares stage cannot run (feature cap / too few samples)."""


class SpecError(CubeLabError, ValueError):
    """A function-spec file or CLI request cannot be parsed."""
