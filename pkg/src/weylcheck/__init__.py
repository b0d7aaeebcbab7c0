"""Numerical verification engine for Weyl and Hermitian-Weyl geometry."""

__version__ = "0.1.0"
