"""Lightweight restoration building blocks (LIST, GSAT, efficient up/downsampling)
with a NumPy inference engine and exact parameter/FLOP accounting."""

__version__ = "0.1.0"
