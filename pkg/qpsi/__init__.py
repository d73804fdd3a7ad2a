"""Certified numerical verification of very-well-poised q-series identities."""

__all__ = ["core", "identities", "verify", "limit"]
__version__ = "0.3.0"
