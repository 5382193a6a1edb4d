"""Binding-precedent citation modeling for Brazilian court decisions."""

__version__ = "0.1.0"
