"""Exception types raised across the package."""


class DomainError(ValueError):
    """A point lies outside the open domain of a kernel family."""


class FeasibilityError(ValueError):
    """A configured cap or closed-form condition rules the request out."""


class AmbiguityError(ValueError):
    """A tolerance-based relation is not transitive on the given input."""
