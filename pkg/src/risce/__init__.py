"""Model-free cross-entropy optimization of binary RIS configurations."""

__version__ = "0.1.0"
