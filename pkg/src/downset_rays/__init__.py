"""Enumeration of down-set extreme rays of partially ordered cones."""

__version__ = "0.1.0"
