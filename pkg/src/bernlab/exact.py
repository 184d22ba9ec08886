"""Exact scalar helpers shared across modules.

Rationals travel as `fractions.Fraction`; quantities of the form log(r) with
r rational are kept multiplicatively as `LogValue` so that equality and
modular reduction stay exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = ["LogValue", "parse_fraction", "format_fraction"]


def parse_fraction(text) -> Fraction:
    """Parse "p/q" (or an int/float/Fraction passthrough) into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        return Fraction(text).limit_denominator(10**12)
    return Fraction(str(text).strip())


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


@dataclass(frozen=True, order=False)
class LogValue:
    """log(arg) for a positive rational arg, stored exactly."""

    arg: Fraction

    def __post_init__(self):
        if self.arg <= 0:
            raise ValueError(f"LogValue argument must be positive, got {self.arg}")
        object.__setattr__(self, "arg", Fraction(self.arg))

    def __float__(self) -> float:
        # math.log(Fraction) loses precision for huge numerators; split the log
        return math.log(self.arg.numerator) - math.log(self.arg.denominator)

    @property
    def is_zero(self) -> bool:
        return self.arg == 1

    def __neg__(self) -> "LogValue":
        return LogValue(1 / self.arg)

    def __add__(self, other: "LogValue") -> "LogValue":
        return LogValue(self.arg * other.arg)

    def __sub__(self, other: "LogValue") -> "LogValue":
        return LogValue(self.arg / other.arg)

    def __repr__(self):
        return f"log({format_fraction(self.arg)})"
