"""Quasi-invariant matrix-valued kernels on the polydisc and numerical certificates for them."""

__version__ = "0.1.0"
