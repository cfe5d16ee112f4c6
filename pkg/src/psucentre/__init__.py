"""Centres of p-blocks of PSU(3,q) and of the Sylow normalizer."""
__version__ = "0.1.0"
