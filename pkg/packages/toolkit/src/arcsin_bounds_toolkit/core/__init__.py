"""Numerics: oracle, bound families, solvers and certificates."""
