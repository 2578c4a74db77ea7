"""Exception types shared across the package."""


class GameDomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class BoundaryMismatchError(GameDomainError):
    """A cone-boundary predicate was queried off the boundary it is defined on."""


class ApexSingularityError(GameDomainError):
    """Cylindrical dynamics evaluated at (or too close to) the cone apex r = 0."""


class ScenarioError(ValueError):
    """A scenario file failed to parse or is missing required fields."""
