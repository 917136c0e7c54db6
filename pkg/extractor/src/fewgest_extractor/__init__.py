"""Video-to-landmark ingestion: converts RGB gesture clips into GSJL
landmark sequence files."""

from .backends import MarkerBackend, MediaPipeBackend, resolve_backend
from .extract import ExtractionJob, extract_video, fit_to_length

__version__ = "0.1.0"
