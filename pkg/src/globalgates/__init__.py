"""Certified addressing schemes and global-pulse compilation for qubit arrays
driven only by translation- or isometry-invariant controls."""

__version__ = "0.1.0"
