"""Frozen-encoder embedding extraction for the speech screening pipeline."""

from .audio import SEGMENT_SECONDS, TARGET_RATE, load_wav, resample, segments
from .encoders import AUDIO_STRIDE, AUDIO_WINDOW, DEFAULT_DIM, AudioEncoder, TextEncoder
from .errors import AudioReadError, EmbedError, EmptyTranscriptError, ManifestError
from .manifest import load_manifest
from .sbem import (
    INDEX_COLUMNS,
    MAGIC,
    SOURCE_AUDIO,
    SOURCE_TEXT,
    VERSION,
    read_sbem,
    write_index,
    write_sbem,
)
from .tokenizer import (
    BOS_ID,
    DEFAULT_PAUSE_TOKENS,
    EOS_ID,
    PAD_ID,
    SEQUENCE_LEN,
    Tokenizer,
    load_pause_tokens,
)

__all__ = [
    "AUDIO_STRIDE",
    "AUDIO_WINDOW",
    "AudioEncoder",
    "AudioReadError",
    "BOS_ID",
    "DEFAULT_DIM",
    "DEFAULT_PAUSE_TOKENS",
    "EOS_ID",
    "EmbedError",
    "EmptyTranscriptError",
    "INDEX_COLUMNS",
    "MAGIC",
    "ManifestError",
    "PAD_ID",
    "SEGMENT_SECONDS",
    "SEQUENCE_LEN",
    "SOURCE_AUDIO",
    "SOURCE_TEXT",
    "TARGET_RATE",
    "TextEncoder",
    "Tokenizer",
    "VERSION",
    "load_manifest",
    "load_pause_tokens",
    "load_wav",
    "read_sbem",
    "resample",
    "segments",
    "write_index",
    "write_sbem",
]
