"""Exception and warning types raised across the package."""

from __future__ import annotations


class SplitMpsError(Exception):
    """Base class for all errors raised by :mod:`splitmps`."""


class InvalidInput(SplitMpsError, ValueError):
    """An argument violates a documented precondition."""


class TooLarge(SplitMpsError):
    """A dense object would exceed the configured size budget."""


class RankZero(SplitMpsError, ValueError):
    """A matrix that must be non-zero has numerical rank zero."""


class NonUnique(SplitMpsError):
    """A fixed point or eigenvalue that must be unique is degenerate."""


class NotProjectivePair(SplitMpsError):
    """Two matrices do not commute up to a scalar."""


class NoGauge(SplitMpsError):
    """No gauge transformation relates the two tensors."""


class DegenerateGauge(SplitMpsError):
    """A gauge solution exists but one of its blocks is singular."""


class NotNormal(SplitMpsError):
    """The tensor is not normal within the search cap."""


class NotInjective(NotNormal):
    """The tensor is not injective at length one."""


class NotInvertible(SplitMpsError):
    """A virtual-to-physical map is not injective at the requested length."""


class InvalidGeometry(SplitMpsError, ValueError):
    """Operator supports do not fit on the chain as requested."""


class NotEigenstate(SplitMpsError):
    """The state is not an eigenvector of the operator."""


class UnsupportedBoundary(SplitMpsError):
    """Open boundaries require a uniform bond dimension."""


class NotFound(SplitMpsError, KeyError):
    """Unknown fixture identifier."""


class NotAWire(UserWarning):
    """Teleportation was run on tensors that are not all unitary."""
