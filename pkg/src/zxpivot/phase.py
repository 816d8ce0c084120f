"""Exact spider phases: rational multiples of pi, normalized into [0, 2pi).

Phases are stored as a reduced fraction of pi so that spider fusion is exact;
no floating point enters until a diagram is interpreted as a matrix.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from typing import Union

PhaseLike = Union["Phase", Fraction, int, str]


class Phase:
    """An angle (numerator/denominator)*pi with the fraction in [0, 2).

    Arithmetic is modulo 2*pi.  The stabilizer fragment corresponds to
    denominator dividing 2, the real fragment to denominator 1.
    """

    __slots__ = ("_frac",)

    def __init__(self, numerator: PhaseLike = 0, denominator: int | None = None):
        if isinstance(numerator, Phase):
            frac = numerator._frac
        elif isinstance(numerator, str):
            frac = Fraction(numerator)
        elif denominator is not None:
            frac = Fraction(numerator, denominator)
        else:
            frac = Fraction(numerator)
        object.__setattr__(self, "_frac", frac % 2)

    @property
    def numerator(self) -> int:
        return self._frac.numerator

    @property
    def denominator(self) -> int:
        return self._frac.denominator

    @property
    def frac(self) -> Fraction:
        """The phase in units of pi, reduced, in [0, 2)."""
        return self._frac

    def is_zero(self) -> bool:
        return self._frac == 0

    def is_pi(self) -> bool:
        return self._frac == 1

    def is_real(self) -> bool:
        """True for phases 0 and pi (denominator 1)."""
        return self._frac.denominator == 1

    def is_stabilizer(self) -> bool:
        """True for multiples of pi/2 (denominator divides 2)."""
        return 2 % self._frac.denominator == 0

    def to_complex(self) -> complex:
        """exp(i * phase) as a complex number."""
        if self._frac == 0:
            return 1.0 + 0.0j
        if self._frac == 1:
            return -1.0 + 0.0j
        if self._frac == Fraction(1, 2):
            return 1.0j
        if self._frac == Fraction(3, 2):
            return -1.0j
        return cmath.exp(1j * cmath.pi * float(self._frac))

    def __add__(self, other: PhaseLike) -> "Phase":
        return Phase(self._frac + Phase(other)._frac)

    def __sub__(self, other: PhaseLike) -> "Phase":
        return Phase(self._frac - Phase(other)._frac)

    def __neg__(self) -> "Phase":
        return Phase(-self._frac)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Phase):
            return self._frac == other._frac
        if isinstance(other, (int, Fraction)):
            return self._frac == Fraction(other) % 2
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("Phase", self._frac))

    def __repr__(self) -> str:
        return f"Phase({self._frac.numerator}/{self._frac.denominator})"

    def __str__(self) -> str:
        return f"{self._frac.numerator}/{self._frac.denominator}"

    @classmethod
    def parse(cls, text: str) -> "Phase":
        """Parse the wire format ``"<num>/<den>"`` (units of pi)."""
        return cls(Fraction(text))


ZERO = Phase(0)
PI = Phase(1)
HALF_PI = Phase(1, 2)
MINUS_HALF_PI = Phase(-1, 2)
