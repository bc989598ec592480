"""Higher moments of local-to-global systems over F_q[x]."""

__version__ = "0.1.0"
