"""Finitary equational theories and finite-set monads."""

__version__ = "0.1.0"
