"""Brute-force ground-instance oracle."""
