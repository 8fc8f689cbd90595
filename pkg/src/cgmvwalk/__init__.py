"""Quantum walks on the quarter plane through CMV matrices and OPUC."""
__version__ = "0.1.0"
