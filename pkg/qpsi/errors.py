from __future__ import annotations

from typing import Optional


class QpsiError(Exception):
    """Base class for every error raised by qpsi.

    `component` names the piece of an identity being evaluated when the error
    surfaced; check_identity fills it in on the way out.
    """

    exit_code = 3

    def __init__(self, message: str, component: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.component = component

    def at(self, component: str) -> "QpsiError":
        self.component = component if not self.component else f"{component}, {self.component}"
        return self

    def __str__(self) -> str:
        if self.component:
            return f"[{self.component}] {self.message}"
        return self.message

    def __reduce__(self):
        # subclasses take different constructor arguments; restore from state instead
        return _rebuild_error, (type(self), self.message), self.__dict__


def _rebuild_error(cls, message):
    err = cls.__new__(cls)
    Exception.__init__(err, message)
    return err


class DivisionNearZero(QpsiError):
    """Divisor interval contains zero: a pole or exhausted precision."""


class NonFiniteBound(QpsiError):
    """A value or its error bound left the finite range."""


class PoleError(QpsiError):
    def __init__(
        self,
        label: str,
        k: Optional[int] = None,
        distance: Optional[float] = None,
        index: Optional[int] = None,
        component: Optional[str] = None,
    ):
        self.label = label
        self.k = k
        self.distance = distance
        self.index = index
        super().__init__(self._describe(), component)

    def _describe(self) -> str:
        parts = [f"pole in factor of {self.label}"]
        if self.index is not None:
            parts.append(f"parameter #{self.index}")
        if self.k is not None:
            parts.append(f"k={self.k}")
        if self.distance is not None:
            parts.append(f"|1 - x q^j| = {self.distance:.3e}")
        return ", ".join(parts)

    def with_index(self, index: int) -> "PoleError":
        self.index = index
        self.message = self._describe()
        return self


class NoConvergence(QpsiError):
    pass


class ConstraintViolation(QpsiError):
    exit_code = 2


class ConfigError(QpsiError):
    exit_code = 2
