"""Circumscribing polygons for sets of disjoint line segments."""

__version__ = "0.1.0"
