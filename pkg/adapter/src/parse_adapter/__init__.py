"""Dependency-parse adapter: benchmark question JSONL to CoNLL-U."""

from .adapter import DEFAULT_MODEL, AdapterConfig, parse_corpus
from .backends import AdapterStartupError, BuiltinBackend, SpacyBackend, load_backend

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MODEL",
    "AdapterConfig",
    "parse_corpus",
    "AdapterStartupError",
    "BuiltinBackend",
    "SpacyBackend",
    "load_backend",
    "__version__",
]
