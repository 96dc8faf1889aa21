"""Threat analysis of advanced data-flow diagrams with a rule language."""

__version__ = "0.1.0"
