"""Verifiable-reward grading for LLM-emitted Prolog programs."""

__version__ = "0.1.0"
