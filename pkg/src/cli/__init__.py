"""
Command line interface for the msq tool
"""
from .main import cli

__all__ = ["cli"]
