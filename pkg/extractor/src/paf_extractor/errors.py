class ExtractorError(Exception):
    """Base class for extraction failures."""


class AudioDecodeError(ExtractorError):
    """Input audio could not be decoded."""


class ModelLoadError(ExtractorError):
    """A recognizer or encoder backend failed to load."""


class AlignmentError(ExtractorError):
    """Backend frame count disagrees with the grid beyond tolerance."""
