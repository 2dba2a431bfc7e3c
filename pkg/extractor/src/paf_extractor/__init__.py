"""Audio -> PAF extraction frontend for phonoprint."""

from .errors import AlignmentError, AudioDecodeError, ExtractorError, ModelLoadError
from .extract import (
    DEFAULT_INVENTORY,
    ExtractorConfig,
    extract_paf,
    extract_paf_bytes,
    grid_frame_count,
    make_backend,
)
from .pafio import NO_PHONEME, write_paf_bytes

__version__ = "0.1.0"
