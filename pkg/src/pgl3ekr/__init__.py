"""Machine verification of the Erdős–Ko–Rado property for PGL(3, q) acting on PG(2, q)."""

__version__ = "0.1.0"
