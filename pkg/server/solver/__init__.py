"""Constraint satisfiability over integers and booleans."""
