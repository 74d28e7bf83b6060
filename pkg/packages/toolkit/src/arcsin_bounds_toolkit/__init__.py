"""Shafer-Fink type bounds for arcsin: derivation, certification and checks."""

__version__ = "0.1.0"
