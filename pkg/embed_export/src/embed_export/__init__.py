"""Sentence-embedding exporter writing the EMB1 interchange format."""

__version__ = "0.1.0"

from .encoders import HashingEncoder, SentenceTransformerEncoder, make_encoder
from .exporter import ExportConfig, export_embeddings

__all__ = [
    "ExportConfig",
    "HashingEncoder",
    "SentenceTransformerEncoder",
    "export_embeddings",
    "make_encoder",
]
