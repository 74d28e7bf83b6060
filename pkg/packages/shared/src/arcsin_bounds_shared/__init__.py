"""Shared domain types for the arcsin-bounds monorepo."""

__version__ = "0.1.0"
