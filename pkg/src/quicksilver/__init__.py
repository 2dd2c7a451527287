"""quicksilver: federated metadata harvesting, indexing, and faceted search."""

__version__ = "0.1.0"
