"""Exception types raised across the toolkit.

Every validation error carries the witness that triggered it (indices,
labels, or offending values) so callers can report *where* an input
stopped being a metric space, a path, or a certificate.
"""

from __future__ import annotations


class ForgeError(Exception):
    """Base class for all toolkit errors."""


class MetricError(ForgeError):
    """A candidate distance matrix failed a metric axiom."""


class NegativeDistance(MetricError):
    def __init__(self, i: int, j: int, value: float):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"d[{i}][{j}] = {value} is negative")


class AsymmetryError(MetricError):
    def __init__(self, i: int, j: int, dij: float, dji: float):
        self.i, self.j, self.dij, self.dji = i, j, dij, dji
        super().__init__(f"d[{i}][{j}] = {dij} != d[{j}][{i}] = {dji}")


class TriangleViolation(MetricError):
    def __init__(self, i: int, j: int, k: int, slack: float):
        self.i, self.j, self.k = i, j, k
        self.slack = slack
        super().__init__(
            f"d[{i}][{j}] > d[{i}][{k}] + d[{k}][{j}] by {slack}"
        )


class ZeroDistanceDistinctPoints(MetricError):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"distinct points {i} and {j} are at distance 0")


class NonzeroSelfDistance(MetricError):
    def __init__(self, i: int, value: float):
        self.i, self.value = i, value
        super().__init__(f"d[{i}][{i}] = {value} != 0")


class UnknownPoint(ForgeError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"point {label!r} is not in the space")


class EndpointMismatch(ForgeError):
    """Concatenation of paths whose junction points disagree."""

    def __init__(self, end_label: str, start_label: str):
        self.end_label, self.start_label = end_label, start_label
        super().__init__(
            f"first path ends at {end_label!r}, second starts at {start_label!r}"
        )


class NoPath(ForgeError):
    def __init__(self, x: str, y: str, r: float):
        self.x, self.y, self.r = x, y, r
        super().__init__(f"no r-path from {x!r} to {y!r} at scale r={r}")


class PartialMap(ForgeError):
    def __init__(self, missing: str):
        self.missing = missing
        super().__init__(f"map table has no entry for point {missing!r}")


class DomainMismatch(ForgeError):
    """Two objects were combined but live over incompatible spaces."""


class MissingBridge(ForgeError):
    def __init__(self, x: str, y: str, r: float):
        self.x, self.y, self.r = x, y, r
        super().__init__(
            f"no r-path bridges the contraction targets {x!r} and {y!r} at r={r}"
        )


class ValidationFailure(ForgeError):
    """A constructed certificate failed its own re-validation.

    `where` names the offending cell / pair in construction coordinates.
    """

    def __init__(self, message: str, where: object = None):
        self.where = where
        super().__init__(message if where is None else f"{message} at {where}")


class FormatError(ForgeError):
    """Malformed serialized input (bad JSON shape, unknown kind, ...)."""
