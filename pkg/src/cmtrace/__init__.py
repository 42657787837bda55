"""Trace invariants of 3x3 matrix pairs, Calogero-Moser relations and Cremona orbits."""

__version__ = "0.1.0"
