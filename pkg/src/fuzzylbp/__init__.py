"""Fuzzy local binary pattern descriptors and evaluation harness."""

__version__ = "0.1.0"
