"""Multi-point integrated sensing and communication: simulation and selection.

A set of dual-functional radars shares one band. Each radar either
senses a common target or serves a common receiver; the package
synthesizes the channels, builds zero-forcing beams, allocates transmit
power, scores fused detection accuracy against communication rate, and
searches the binary sensing/communication assignment.
"""

from .errors import (
    DegenerateGeometry,
    DegenerateRates,
    Infeasible,
    InvalidScenario,
    InvalidThreshold,
    MalformedScenario,
    MpisacError,
    NoFeasibleSelection,
    OracleTooLarge,
    RankDeficientChannels,
    TooLargeForEnumeration,
    UnreachableTarget,
    ZeroEffectiveChannel,
)

__version__ = "0.1.0"
