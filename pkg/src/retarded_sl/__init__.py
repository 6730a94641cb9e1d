"""Forward and inverse spectral computations for Sturm-Liouville problems
with retarded argument and transmission conditions."""

__version__ = "0.1.0"
