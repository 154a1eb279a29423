"""Formatting utilities for lipnav."""

from fractions import Fraction


def format_scalar(value: Fraction | float | None) -> str:
    """Format a scalar for reports.

    Args:
        value: Exact or float value

    Returns:
        "p/q" or an integer string for fractions, repr-style text for floats,
        "null" for None
    """
    if value is None:
        return "null"
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return repr(value)


def parse_point_list(text: str) -> list[str]:
    """Split a comma separated point list, dropping blanks.

    Args:
        text: String like "u1, v1"

    Returns:
        Point names in the given order
    """
    return [part.strip() for part in text.split(",") if part.strip()]
