"""Constrained-pattern analysis for logically constrained rewrite systems."""
