"""Exception hierarchy shared by all modules."""


class LogitstabError(Exception):
    """Base class for all package errors."""


class StateSpaceTooLarge(LogitstabError):
    """The joint strategy space exceeds the configured cap."""

    def __init__(self, n_states, cap):
        super().__init__(f"state space has {n_states} states, cap is {cap}")
        self.n_states = n_states
        self.cap = cap


class InvalidParams(LogitstabError):
    pass


class MissingPotential(LogitstabError):
    pass


class EmptyStrategySet(LogitstabError):
    pass


class TooManyPaths(LogitstabError):
    pass


class DisconnectedPlayer(LogitstabError):
    pass


class ParseError(LogitstabError):
    pass


class SchemaError(ParseError):
    pass


class ReducibleChain(LogitstabError):
    pass


class SolveFailure(LogitstabError):
    pass


class Unreachable(LogitstabError):
    def __init__(self, state):
        super().__init__(f"state {state} cannot reach the requested root")
        self.state = state


class TooLarge(LogitstabError):
    pass


class InternalInconsistency(LogitstabError):
    """Two routes that must agree (e.g. radius-coradius vs potential argmin) disagree."""
