"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class DimensionError(ValidationError):
    pass


class SizeLimitError(ValidationError):
    pass


class HypothesisViolation(ValueError):
    """Circuit does not satisfy the assumptions an exact analytic routine needs."""


class IncommensurateSupportError(ValidationError):
    pass


class DegenerateTrainingSetError(ValidationError):
    pass
