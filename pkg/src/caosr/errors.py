"""Exception types raised by the simulator."""


class CaosrError(Exception):
    """Base class for all simulator errors."""


class EmptyLog(CaosrError):
    """A parameter log with no captures was used where captures are required."""


class DegenerateMaximum(CaosrError):
    """A behavior parameter was configured with a non-positive maximum."""


class UnsupportedEvidence(CaosrError):
    """No observation or belief can be formed from the available evidence."""


class WrongAuthority(CaosrError):
    """Registration was attempted against a node that is not a navigation controller."""


class NotRegistered(CaosrError):
    """An agent operation was attempted on an unregistered node."""


class DuplicateResource(CaosrError):
    """A resource id was attached twice to the same resource record."""


class OrphanReply(CaosrError):
    """A belief reply arrived whose request id matches no outstanding request."""


class InconsistentTiming(CaosrError):
    """A recorded timing entry violates one of its defining sum identities."""


class ScenarioError(CaosrError):
    """Scenario file failed to parse or validate."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnknownPreset(CaosrError):
    """An experiment preset name was not recognized."""
