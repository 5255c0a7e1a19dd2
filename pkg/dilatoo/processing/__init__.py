"""Suites and ensembles of constructions."""
