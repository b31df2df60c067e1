class MOTError(Exception):
    """Domain error: bad input or a precondition the data does not meet."""


class InstanceError(MOTError, ValueError):
    """Malformed measure, instance file, or cost table."""


class NotInConvexOrder(MOTError):
    def __init__(self, msg="not in convex order"):
        super().__init__(msg)


class InvariantError(AssertionError):
    """An internal consistency check failed; indicates a bug, not bad data."""
