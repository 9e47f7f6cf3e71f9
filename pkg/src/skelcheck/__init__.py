"""Skeleton abstraction of coloured Petri nets for sound model checking."""

__version__ = "0.1.0"
