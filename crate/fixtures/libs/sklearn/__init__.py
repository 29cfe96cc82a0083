"""Machine learning in Python."""

__version__ = "0.0.test"
