"""Finite pointed metric spaces, Lipschitz-free norms and diameter-two witnesses."""

__version__ = "0.1.0"
