"""Core types: operators, tolerances, errors and results."""
