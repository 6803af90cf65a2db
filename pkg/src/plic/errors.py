"""Exception hierarchy.

Exit-code mapping used by the CLI:
  2 -- precondition / hypothesis failures (PreconditionError subtree)
  3 -- search / ladder exhaustion (ExhaustionError subtree)
  4 -- internal invariant violations (InvariantViolation)
"""


class PlicError(Exception):
    pass


class PreconditionError(PlicError):
    """An operation was called outside its contract."""


class OutOfDomain(PreconditionError):
    pass


class InfinitePreimage(PreconditionError):
    pass


class NotHomeomorphism(PreconditionError):
    pass


class FixedPointViolated(PreconditionError):
    pass


class NoDepartures(PreconditionError):
    pass


class HalfConstant(PreconditionError):
    def __init__(self, side: str):
        super().__init__(f"{side} restriction is constant")
        self.side = side


class OrderViolated(PreconditionError):
    pass


class EmptyIntersection(PreconditionError):
    pass


class PreconditionViolated(PreconditionError):
    """Generic named-precondition failure (carries what failed)."""

    def __init__(self, what: str):
        super().__init__(what)
        self.what = what


class NoLift(PlicError):
    pass


class HypothesisFailed(PreconditionError):
    pass


class IndexOutOfRange(PreconditionError):
    pass


class NotAThread(PreconditionError):
    def __init__(self, index: int):
        super().__init__(f"thread condition fails at index {index}")
        self.index = index


class EndpointCoordinate(PreconditionError):
    pass


class LengthMismatch(PreconditionError):
    pass


class WindowTooShort(PreconditionError):
    pass


class DiameterGuardFailed(PreconditionError):
    pass


class MixedOrientations(PreconditionError):
    pass


class ExhaustionError(PlicError):
    pass


class SearchExhausted(ExhaustionError):
    def __init__(self, explored: int):
        super().__init__(f"search exhausted after exploring {explored} nodes")
        self.explored = explored


class LadderExhausted(ExhaustionError):
    def __init__(self, best_mesh):
        super().__init__(f"grid ladder exhausted; best mesh achieved: {best_mesh}")
        self.best_mesh = best_mesh


class InvariantViolation(PlicError):
    """A postcondition that theory guarantees did not hold; always a bug."""


class SimplicityViolated(InvariantViolation):
    def __init__(self, detail: str):
        super().__init__(f"polyline is not simple: {detail}")
        self.detail = detail


class AccessBlocked(InvariantViolation):
    def __init__(self, detail: str):
        super().__init__(f"access segment obstructed: {detail}")
        self.detail = detail
