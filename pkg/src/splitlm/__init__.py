"""Exact algebra for chart ideals of ramified unitary splitting models."""
