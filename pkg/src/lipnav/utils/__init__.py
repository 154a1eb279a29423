"""Utility functions for lipnav."""

from lipnav.utils.formatting import format_scalar, parse_point_list
from lipnav.utils.rationals import Scalar, as_fraction, parse_rational

__all__ = [
    "Scalar",
    "as_fraction",
    "format_scalar",
    "parse_point_list",
    "parse_rational",
]
