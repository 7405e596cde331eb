"""oodlab: out-of-distribution analysis for handwritten text recognition experiments."""

__version__ = "0.1.0"
