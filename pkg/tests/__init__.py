"""
Test package for dc-gsocp.

Tests are organized into unit, functional (table reproductions and scheme
properties), integration (oracles against the solver) and performance suites.
"""
