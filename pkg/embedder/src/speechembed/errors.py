"""Error taxonomy. Everything is a ValueError so callers can catch broadly."""


class EmbedError(ValueError):
    pass


class AudioReadError(EmbedError):
    """Missing, malformed, or unsupported WAV input."""


class EmptyTranscriptError(EmbedError):
    """Transcript contains no tokens."""


class ManifestError(EmbedError):
    """Manifest CSV missing or malformed."""
