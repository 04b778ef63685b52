"""Annotation and evaluation tooling for bimanual cloth-folding demonstrations."""

__version__ = "0.1.0"
