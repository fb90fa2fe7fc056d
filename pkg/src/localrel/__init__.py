"""localrel: exact verification of local distribution relations for Hecke
operators on p-adic lattice models."""

__version__ = "0.1.0"
