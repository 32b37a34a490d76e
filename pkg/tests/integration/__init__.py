"""Checks of the solver against independent oracles."""
