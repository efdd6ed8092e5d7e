"""Exception types shared across the package."""

from __future__ import annotations


class BusRemedyError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(BusRemedyError):
    """Scenario file or CLI parameters are malformed or inconsistent."""


class DegenerateBounds(BusRemedyError):
    """Study-area rectangle has non-positive width or height."""


class UnknownNode(BusRemedyError):
    pass


class UnknownLine(BusRemedyError):
    pass


class UnknownOrigin(BusRemedyError):
    pass


class UnknownTerminal(BusRemedyError):
    """Terminal selector must be 'a' (first stop) or 'b' (last stop)."""


class ZeroFleet(BusRemedyError):
    """Headway is undefined for a line with no vehicles."""


class MissingEdgeTime(BusRemedyError):
    """A consecutive stop pair has no inter-stop running time."""


class MissingDistance(BusRemedyError):
    """A distance lookup refers to a node that does not exist."""


class EmptySuffix(BusRemedyError):
    """A line extension must append at least one node."""


class EmptyLine(BusRemedyError):
    """Line-level scores need at least one stop."""


class EmptyCluster(BusRemedyError):
    """Cluster-level scores need at least one member."""


class NonPositiveTime(BusRemedyError):
    """Gravity sums require strictly positive travel times."""


class ClusterTooLarge(BusRemedyError):
    """Exact path routing is capped; raise the cap or accept the heuristic fallback."""


class Infeasible(BusRemedyError):
    """No fleet allocation satisfies the capacity and budget constraints."""

    def __init__(self, message: str, cluster_id: str | None = None):
        super().__init__(message)
        self.cluster_id = cluster_id


class EmptySets(BusRemedyError):
    """The integer program needs at least one station and one extendable line."""


class TooLarge(BusRemedyError):
    """The exhaustive solver only accepts instances below its enumeration cap."""


class IoFailure(BusRemedyError):
    """Filesystem write or read failed."""


class MissingArtifact(BusRemedyError):
    """A CLI command needs an artifact another command has not produced yet."""
