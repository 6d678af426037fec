"""Exception types raised across the package.

Every error the public API raises deliberately derives from MpisacError,
so callers can catch one base class. Anything else escaping is a bug.
"""


class MpisacError(Exception):
    """Base class for all deliberate errors."""


class MalformedScenario(MpisacError):
    """Scenario file unreadable, unparsable, or missing required fields."""


class InvalidScenario(MpisacError):
    """Scenario parsed but violates an invariant; message names the field."""


class DegenerateGeometry(MpisacError):
    """A geometric quantity (distance, direction) is undefined or zero."""


class RankDeficientChannels(MpisacError):
    """Channel rows too close to linearly dependent for nulling."""


class ZeroEffectiveChannel(MpisacError):
    """A beamformer has no usable projection left after nulling."""


class InvalidThreshold(MpisacError):
    """Vote threshold outside 1..N."""


class TooLargeForEnumeration(MpisacError):
    """Exhaustive enumeration was requested beyond its size guard."""


class DegenerateRates(MpisacError):
    """Error rates at or beyond the boundary where the fusion formulas break."""


class UnreachableTarget(MpisacError):
    """A sensing selection whose echo gain is numerically zero."""


class Infeasible(MpisacError):
    """Power allocation constraints cannot all be met for this selection."""


class OracleTooLarge(MpisacError):
    """Grid oracle asked to enumerate more than it tractably can."""


class NoFeasibleSelection(MpisacError):
    """No selection vector admits a feasible power allocation."""
