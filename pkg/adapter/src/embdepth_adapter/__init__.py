"""Text-to-vector adapter producing the embdepth corpus wire format."""

from .adapter import DEFAULT_MODEL, PAIR_SEPARATOR, AdapterError, EmbedJob, embed_corpus
from .backends import HashedBowBackend, ModelError, SentenceTransformerBackend, resolve_backend

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MODEL",
    "PAIR_SEPARATOR",
    "AdapterError",
    "EmbedJob",
    "embed_corpus",
    "HashedBowBackend",
    "SentenceTransformerBackend",
    "ModelError",
    "resolve_backend",
    "__version__",
]
