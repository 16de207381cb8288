"""Local calculus on transitive Lie algebroids: forms, gluing, metrics, integration and gauge actions."""

__version__ = "0.1.0"
