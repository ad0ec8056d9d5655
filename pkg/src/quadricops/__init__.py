"""Exact Weyl-algebra construction of conformally covariant operators on real quadrics."""

__version__ = "0.1.0"
