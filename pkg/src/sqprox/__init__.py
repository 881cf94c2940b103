"""Certified proximal point iterations for strongly quasiconvex functions on
Hadamard spaces."""

__version__ = "0.1.0"
