"""Finite-time nested oscillatory integrals."""
