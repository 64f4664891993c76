"""Word-level tokenizer with dedicated pause-marker ids and fixed-length output.

Ids: <s>=0, </s>=1, <pad>=2, <unk>=3, then one dedicated id per configured
pause marker, then hashed word ids. The hash is content-stable (sha256), so
the same text always produces the same id sequence across runs and machines.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

from .errors import EmptyTranscriptError

BOS_ID = 0
EOS_ID = 1
PAD_ID = 2
UNK_ID = 3
_FIRST_MARKER_ID = 4

SEQUENCE_LEN = 512
WORD_BUCKETS = 1 << 15

# filled hesitations plus an unfilled-pause marker; override with a file of
# one marker per line
DEFAULT_PAUSE_TOKENS = ("<pause>", "um", "uh", "er", "ah", "hmm", "mm")

_STRIP = "\"'.,!?;:()[]{}<>`~*_-" + "‘’“”"


def load_pause_tokens(path: str | Path | None) -> tuple:
    if path is None:
        return DEFAULT_PAUSE_TOKENS
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    tokens = tuple(t.strip().lower() for t in lines if t.strip())
    if not tokens:
        raise ValueError(f"pause token file {path} is empty")
    return tokens


def _word_id(word: str, n_markers: int) -> int:
    digest = hashlib.sha256(word.encode("utf-8")).digest()
    bucket = int.from_bytes(digest[:8], "little") % WORD_BUCKETS
    return _FIRST_MARKER_ID + n_markers + bucket


class Tokenizer:
    def __init__(self, pause_tokens: tuple = DEFAULT_PAUSE_TOKENS):
        self.pause_tokens = tuple(t.lower() for t in pause_tokens)
        self.marker_ids = {t: _FIRST_MARKER_ID + i for i, t in enumerate(self.pause_tokens)}

    @property
    def first_word_id(self) -> int:
        return _FIRST_MARKER_ID + len(self.pause_tokens)

    def words(self, text: str) -> list:
        out = []
        for raw in text.lower().split():
            if raw in self.marker_ids:  # markers keep their punctuation
                out.append(raw)
                continue
            word = raw.strip(_STRIP)
            if word in self.marker_ids:
                out.append(word)
            elif word:
                out.append(word)
        return out

    def token_id(self, word: str) -> int:
        marker = self.marker_ids.get(word)
        if marker is not None:
            return marker
        return _word_id(word, len(self.pause_tokens))

    def encode(self, text: str) -> tuple:
        """(ids of length SEQUENCE_LEN, valid count including <s> and </s>)."""
        words = self.words(text)
        if not words:
            raise EmptyTranscriptError("transcript has no tokens")
        body = [self.token_id(w) for w in words[: SEQUENCE_LEN - 2]]
        ids = [BOS_ID] + body + [EOS_ID]
        valid = len(ids)
        ids.extend([PAD_ID] * (SEQUENCE_LEN - valid))
        return tuple(ids), valid
