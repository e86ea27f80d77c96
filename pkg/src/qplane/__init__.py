"""qplane: exact symbolic calculus and symplectic structures on quantum planes."""

__version__ = "0.1.0"
