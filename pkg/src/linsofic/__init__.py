"""Exact rank-metric approximation of groups by matrices over arbitrary fields."""

__version__ = "0.1.0"
