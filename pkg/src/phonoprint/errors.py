"""Exception types shared across the package.

Binary-format errors derive from FormatError and carry the byte offset at
which the problem was detected, so parser failures are diagnosable without
a hex dump.
"""


class PhonoprintError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(PhonoprintError):
    """A malformed PAF or profile byte stream."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class BadMagic(FormatError):
    pass


class UnsupportedVersion(FormatError):
    pass


class TruncatedFile(FormatError):
    pass


class TrailingData(FormatError):
    pass


class InvalidPhonemeId(FormatError):
    pass


class InvalidInventory(FormatError):
    pass


class InvalidProfile(FormatError):
    pass


class DimMismatch(PhonoprintError):
    """Feature dimensions disagree (within a file or across inputs)."""


class TooManyPhonemes(PhonoprintError):
    """Phoneme inventory exceeds the 16-bit index space."""


class EmptyReferenceSet(PhonoprintError):
    """No usable reference tracks to build or score against."""


class ZeroVector(PhonoprintError):
    """Cosine distance is undefined for (near-)zero vectors."""


class EmptyEntry(PhonoprintError):
    """A profile entry holds no reference vectors."""


class EmptyTrack(PhonoprintError):
    """Operation requires at least one frame."""


class NoScorablePhonemes(PhonoprintError):
    """No occurrence in the track has a label present in the profile."""


class WrongMode(PhonoprintError):
    """Operation applies to the other scoring mode."""


class OneClassOnly(PhonoprintError):
    """Metrics need at least one bona fide and one fake score."""


class NoValidSpeaker(PhonoprintError):
    """No speaker has scores from both classes."""


class NotRiff(PhonoprintError):
    """Input is not a RIFF/WAVE stream."""


class UnsupportedCodec(PhonoprintError):
    pass


class UnsupportedBitDepth(PhonoprintError):
    pass


class SampleRateMismatch(PhonoprintError):
    pass


class DegenerateSignal(PhonoprintError):
    """Constant signal cannot be normalized."""


class SilentSignal(PhonoprintError):
    """Signal power is zero."""


class LengthMismatch(PhonoprintError):
    pass


class EncoderMissing(PhonoprintError):
    """External MP3 encoder binary was not found."""


class EncoderFailed(PhonoprintError):
    """External MP3 encoder exited with a non-zero status."""


class DurationDrift(PhonoprintError):
    """Codec round-trip changed the duration beyond tolerance."""
