"""Random correlation matrices, their determinants and the Beta-product law."""

__version__ = "0.1.0"
