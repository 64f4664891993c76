"""Hand-crafted linguistic features from utterance transcripts.

A transcript is plain text with one utterance per line; blank lines and lines
with no word tokens are dropped. Tokens are lowercased words with surrounding
punctuation stripped (internal apostrophes and hyphens survive).
"""

from __future__ import annotations

import csv
import math
import string
from importlib import resources
from pathlib import Path

import numpy as np

from .config import Config, split_words
from .errors import EmptyInputError

LINGUISTIC_FIELDS = (
    "ttr",
    "mattr_50",
    "honore_r",
    "brunet_w",
    "mean_utterance_len",
    "mean_word_len",
    "subordination_rate",
    "coherence_mean",
    "coherence_min",
    "discourse_edge_density",
    "discourse_largest_component",
    "tense_concordance",
    "valence_mean",
    "arousal_mean",
    "dominance_mean",
    "filled_pause_count",
    "filled_pause_rate_per100",
    "immediate_repetition_count",
    "absent_coherence",
    "sentiment_oov",
)

HONORE_CAP = 1e4
BRUNET_EXPONENT = -0.165

_STRIP = string.punctuation + "‘’“”"

IRREGULAR_PAST = frozenset(
    "was were had did went said got made knew thought saw came took told felt "
    "left put kept began gave found heard ran brought sat stood lost paid met "
    "held wrote spoke broke chose drove ate fell meant".split()
)

PRESENT_VERBS = frozenset(
    "is are am be being do does have has go goes say says get gets make makes "
    "know knows think thinks see sees want wants feel feels come comes take "
    "takes tell tells keep keeps give gives find finds need needs like likes "
    "try tries live lives seem seems".split()
)


def tokenize(utterance: str) -> list:
    out = []
    for raw in utterance.lower().split():
        word = raw.strip(_STRIP)
        if word:
            out.append(word)
    return out


def parse_transcript(text: str) -> list:
    """Lines -> token lists, keeping only utterances with at least one token."""
    utterances = []
    for line in text.splitlines():
        tokens = tokenize(line)
        if tokens:
            utterances.append(tokens)
    return utterances


def load_transcript(path: str | Path) -> list:
    return parse_transcript(Path(path).read_text(encoding="utf-8"))


def type_token_ratio(tokens: list) -> float:
    return len(set(tokens)) / len(tokens)


def moving_average_ttr(tokens: list, window: int) -> float:
    """Mean TTR over a sliding token window; plain TTR when too short."""
    if len(tokens) < window:
        return type_token_ratio(tokens)
    ratios = [
        len(set(tokens[i : i + window])) / window for i in range(len(tokens) - window + 1)
    ]
    return float(np.mean(ratios))


def honore_statistic(tokens: list) -> float:
    """100 ln(N) / (1 - V1/V); capped when every type is a hapax."""
    n = len(tokens)
    counts: dict = {}
    for t in tokens:
        counts[t] = counts.get(t, 0) + 1
    v = len(counts)
    v1 = sum(1 for c in counts.values() if c == 1)
    if v1 == v:
        return HONORE_CAP
    return min(100.0 * math.log(n) / (1.0 - v1 / v), HONORE_CAP)


def brunet_index(tokens: list) -> float:
    n = len(tokens)
    v = len(set(tokens))
    return n ** (v**BRUNET_EXPONENT)


def _tf_vector(tokens: list) -> dict:
    vec: dict = {}
    for t in tokens:
        vec[t] = vec.get(t, 0) + 1
    return vec


def tf_cosine(a: list, b: list) -> float:
    va, vb = _tf_vector(a), _tf_vector(b)
    dot = sum(c * vb.get(t, 0) for t, c in va.items())
    na = math.sqrt(sum(c * c for c in va.values()))
    nb = math.sqrt(sum(c * c for c in vb.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


def discourse_graph(utterances: list, threshold: float):
    """Utterance similarity graph: edge when TF cosine >= threshold.

    Returns (edge_density, largest_component_fraction).
    """
    n = len(utterances)
    if n < 2:
        return 0.0, 1.0 if n else 0.0
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    edges = 0
    for i in range(n):
        for j in range(i + 1, n):
            if tf_cosine(utterances[i], utterances[j]) >= threshold:
                edges += 1
                parent[find(i)] = find(j)
    sizes: dict = {}
    for i in range(n):
        r = find(i)
        sizes[r] = sizes.get(r, 0) + 1
    density = edges / (n * (n - 1) / 2)
    return density, max(sizes.values()) / n


def tense_concordance(tokens: list) -> float:
    """Share of the dominant tense among tokens classified as past or present.

    Present-verb lookup wins over the -ed suffix rule ("need" stays present).
    Fewer than two classified tokens means concordance 1.0.
    """
    past = present = 0
    for t in tokens:
        if t in PRESENT_VERBS:
            present += 1
        elif t in IRREGULAR_PAST or (len(t) >= 4 and t.endswith("ed")):
            past += 1
    total = past + present
    if total <= 1:
        return 1.0
    return max(past, present) / total


def load_vad_lexicon(path: str = "") -> dict:
    """word -> (valence, arousal, dominance), each in [0, 1]."""
    if path:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = resources.files("speechscreen").joinpath("data/vad_lexicon_small.csv").read_text("utf-8")
    out: dict = {}
    reader = csv.DictReader(text.splitlines())
    for row in reader:
        out[row["word"].strip().lower()] = (
            float(row["valence"]),
            float(row["arousal"]),
            float(row["dominance"]),
        )
    return out


def extract_linguistic(utterances: list, cfg: Config, vad: dict | None = None) -> dict:
    """Full linguistic feature dict (keys = LINGUISTIC_FIELDS, in order).

    ``utterances`` is a list of token lists as produced by parse_transcript.
    """
    utterances = [u for u in utterances if u]
    tokens = [t for u in utterances for t in u]
    if not tokens:
        raise EmptyInputError("transcript has no word tokens")
    if vad is None:
        vad = load_vad_lexicon(cfg.vad_lexicon_path)

    out: dict = {}
    out["ttr"] = type_token_ratio(tokens)
    out["mattr_50"] = moving_average_ttr(tokens, cfg.mattr_window)
    out["honore_r"] = honore_statistic(tokens)
    out["brunet_w"] = brunet_index(tokens)
    out["mean_utterance_len"] = len(tokens) / len(utterances)
    out["mean_word_len"] = float(np.mean([len(t) for t in tokens]))

    subordinators = set(split_words(cfg.subordinators))
    out["subordination_rate"] = sum(1 for t in tokens if t in subordinators) / len(tokens)

    absent_coherence = len(utterances) < 2
    if absent_coherence:
        out["coherence_mean"] = 0.0
        out["coherence_min"] = 0.0
    else:
        sims = [tf_cosine(utterances[i], utterances[i + 1]) for i in range(len(utterances) - 1)]
        out["coherence_mean"] = float(np.mean(sims))
        out["coherence_min"] = float(np.min(sims))
    density, largest = discourse_graph(utterances, cfg.coherence_threshold)
    out["discourse_edge_density"] = density
    out["discourse_largest_component"] = largest

    out["tense_concordance"] = tense_concordance(tokens)

    hits = [vad[t] for t in tokens if t in vad]
    oov = len(hits) == 0
    if oov:
        out["valence_mean"], out["arousal_mean"], out["dominance_mean"] = 0.5, 0.5, 0.5
    else:
        arr = np.asarray(hits)
        out["valence_mean"] = float(arr[:, 0].mean())
        out["arousal_mean"] = float(arr[:, 1].mean())
        out["dominance_mean"] = float(arr[:, 2].mean())

    fillers = set(split_words(cfg.filled_pauses))
    filled = sum(1 for t in tokens if t in fillers)
    out["filled_pause_count"] = float(filled)
    out["filled_pause_rate_per100"] = 100.0 * filled / len(tokens)

    repeats = 0
    for u in utterances:
        repeats += sum(1 for i in range(len(u) - 1) if u[i] == u[i + 1])
    out["immediate_repetition_count"] = float(repeats)

    out["absent_coherence"] = float(absent_coherence)
    out["sentiment_oov"] = float(oov)

    assert tuple(out.keys()) == LINGUISTIC_FIELDS
    return out
