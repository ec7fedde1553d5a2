"""Exception types shared across the package."""


class CapeError(Exception):
    """Base class for all package-specific errors."""


class NoPathFound(CapeError):
    def __init__(self, message: str = "no feasible path found", agent: str | None = None):
        super().__init__(message)
        self.agent = agent


class DegenerateRay(CapeError):
    """Raised when obstacle ray x-coordinates cannot be separated."""


class ScenarioInfeasible(CapeError):
    pass


class GenerationFailed(CapeError):
    pass


class EmptyResultSet(CapeError):
    pass


class IndexOutOfRange(CapeError):
    def __init__(self, step: int, length: int):
        super().__init__(f"waypoint step {step} out of range for path of length {length}")
        self.step = step
        self.length = length


class TransportError(CapeError):
    pass
