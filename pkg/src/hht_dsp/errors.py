class DomainError(ValueError):
    """Input violates an operation's preconditions."""


class NotEnoughExtremaError(DomainError):
    """Too few maxima or minima to build both envelopes.

    Raised during sifting to mark a monotone residue; callers that decompose
    catch it as a normal stopping condition.
    """
