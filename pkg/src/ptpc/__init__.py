"""Exact minimum-weight codeword counting for pre-transformed polar codes."""

__version__ = "0.1.0"
