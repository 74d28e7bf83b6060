"""Tests for the arcsin-bounds toolkit."""
