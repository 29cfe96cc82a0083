"""Powerful data structures for data analysis."""


def read_csv(filepath_or_buffer, sep=",", header="infer", low_memory=True):
    """Read a comma-separated values (csv) file into DataFrame."""


class DataFrame:
    """Two-dimensional, size-mutable, potentially heterogeneous tabular data."""

    def merge(self, right, how="inner", on=None):
        """Merge DataFrame or named Series objects with a database-style join."""

    def where(self, cond, other=None):
        """Replace values where the condition is False."""
