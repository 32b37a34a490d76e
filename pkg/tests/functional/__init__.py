"""End-to-end reproduction of the published convergence tables."""
