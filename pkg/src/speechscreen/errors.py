"""Exception types shared across the pipeline."""


class AudioFormatError(ValueError):
    """Malformed or truncated audio container."""


class UnsupportedCodecError(AudioFormatError):
    """Valid container but an encoding this reader does not handle."""


class EmptyInputError(ValueError):
    """Operation received an empty signal or transcript."""


class TooShortError(ValueError):
    """Input is shorter than the operation's minimum length."""


class ManifestError(ValueError):
    """Dataset manifest failed validation; message carries the row number."""


class ConfigError(ValueError):
    """Bad configuration value or file."""
