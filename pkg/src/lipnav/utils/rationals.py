"""Exact rational parsing and conversion."""

import math
from fractions import Fraction

from lipnav.errors import StructuralError

Scalar = Fraction | int | float | str


def parse_rational(text: str) -> Fraction:
    """Parse a "p/q" or decimal string exactly.

    Args:
        text: String such as "3/4", "0.25" or "-2"

    Returns:
        The exact Fraction the string denotes

    Raises:
        StructuralError: If the string is not a finite rational
    """
    cleaned = text.strip()
    try:
        value = Fraction(cleaned)
    except (ValueError, ZeroDivisionError) as exc:
        raise StructuralError(f"not a rational number: {text!r}") from exc
    return value


def as_fraction(value: Scalar) -> Fraction:
    """Convert a scalar to a Fraction without rounding.

    Floats convert to their exact binary value, so 0.1 is not 1/10.
    Pass strings when the decimal meaning matters.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise StructuralError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise StructuralError(f"not a finite number: {value!r}")
        return Fraction(value)
    return parse_rational(value)
