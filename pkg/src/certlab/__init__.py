"""Certificate-complexity measures, verifiers and query-algorithm simulators."""

__version__ = "0.1.0"
