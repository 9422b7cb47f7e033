"""GRAD graph database engine: store, matcher, constraints, algebra and I/O."""

__version__ = "1.0.0"
