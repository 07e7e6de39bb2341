"""
Error hierarchy for the asynchronous diffusion lab.

Every domain error derives from DiffusionError and from the closest builtin
exception, so callers can catch either the specific class or a generic
ValueError/ArithmeticError/LookupError.
"""

from typing import Optional


class DiffusionError(Exception):
    """Base class for all errors raised by the lab."""


class ConfigError(DiffusionError, ValueError):
    """Experiment configuration is missing, malformed or inconsistent."""


class UnknownPreset(ConfigError, LookupError):
    """Requested preset name is not registered."""


class DigestMismatch(ConfigError):
    """Two artifacts that must come from one configuration do not."""


# ---------------------------------------------------------------- topology


class NetworkError(DiffusionError, ValueError):
    """Network specification violates a structural invariant."""


class ColumnSumError(NetworkError):
    def __init__(self, column: int, total: float):
        self.column = column
        self.total = total
        super().__init__(
            f"Column {column} of the combination matrix sums to {total!r}, expected 1"
        )


class NegativeWeight(NetworkError):
    def __init__(self, row: int, column: int, value: float):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"Negative combination weight a[{row},{column}] = {value!r}")


class NeighborhoodMismatch(NetworkError):
    def __init__(self, row: int, column: int):
        self.row = row
        self.column = column
        super().__init__(
            f"Positive weight a[{row},{column}] but agent {row} is not in the neighborhood of agent {column}"
        )


class ModeError(NetworkError):
    """Operation is not defined for the network's operating mode."""


class NotPrimitive(NetworkError, ArithmeticError):
    """Expected combination matrix has no simple Perron eigenvalue at 1."""


# ---------------------------------------------------------------- regression


class ProblemError(DiffusionError, ValueError):
    """Regression problem is malformed."""


class DimensionError(ProblemError):
    pass


class NonPositiveDefinite(ProblemError, ArithmeticError):
    pass


class SingularSystem(ProblemError, ArithmeticError):
    pass


# ---------------------------------------------------------------- diffusion


class NonFiniteIterate(DiffusionError, ArithmeticError):
    """An iterate overflowed or became NaN."""

    def __init__(
        self,
        agent: int,
        iteration: int,
        local_step: Optional[int] = None,
        run: Optional[int] = None,
    ):
        self.agent = agent
        self.iteration = iteration
        self.local_step = local_step
        self.run = run
        where = f"agent {agent}, iteration {iteration}"
        if local_step is not None:
            where += f", local step {local_step}"
        if run is not None:
            where += f", run {run}"
        super().__init__(f"Non-finite or exploding iterate at {where}")


class Diverged(NonFiniteIterate):
    """Run aborted because the recursion left the stable region."""


class EmptyTail(DiffusionError, ValueError):
    """Tail window of a trajectory holds no records."""


# ---------------------------------------------------------------- theory


class ShapeError(DiffusionError, ValueError):
    """Block structure of an operand does not conform."""


class EnumerationCapExceeded(DiffusionError, ArithmeticError):
    def __init__(self, agent: int, events: int, cap: int):
        self.agent = agent
        self.events = events
        self.cap = cap
        super().__init__(
            f"Agent {agent} has {events} sampling events, above the enumeration cap {cap}"
        )


class UnstableSpectrum(DiffusionError, ArithmeticError):
    def __init__(self, rho: float):
        self.rho = rho
        super().__init__(
            f"Spectral radius of the iteration operator is {rho:.6f} >= 1; steady state does not exist"
        )
