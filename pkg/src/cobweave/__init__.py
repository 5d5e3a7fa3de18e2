"""Automata, transducers and Boolean 1D TQFTs with defects."""

__version__ = "0.1.0"
