"""Semantic similarity between a candidate program and its reference
solution: cosine similarity of text embeddings blended with predicate-
name overlap.

The default embedding provider is a deterministic hashed character-
trigram frequency vector, so the whole pipeline runs offline. A remote
HTTP provider can be swapped in for real sentence embeddings.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

from .analyzer import extract_predicate_names
from .sandbox import PrologProgram

TRIGRAM_DIM = 512
FLOOR_REWARD = 0.5


@dataclass
class SemanticScore:
    cosine: float
    predicate_overlap: float
    s_sem: float
    reward: float


class TrigramEmbedder:
    """L2-normalized hashed character-trigram frequencies. Deterministic
    across processes (crc32, not the salted builtin hash)."""

    def __init__(self, dim: int = TRIGRAM_DIM):
        self.dim = dim

    def embed(self, text: str) -> list[float]:
        vec = [0.0] * self.dim
        padded = f"  {text.lower()} "
        for i in range(len(padded) - 2):
            tri = padded[i:i + 3]
            vec[zlib.crc32(tri.encode("utf-8")) % self.dim] += 1.0
        norm = math.sqrt(sum(v * v for v in vec))
        if norm > 0:
            vec = [v / norm for v in vec]
        return vec


class RemoteEmbedder:
    """POSTs raw UTF-8 text to an embedding endpoint that answers with
    a JSON array (or ``{"embedding": [...]}``)."""

    def __init__(self, url: str, timeout: float = 30.0, session=None):
        import requests

        self.url = url
        self.timeout = timeout
        self._session = session or requests.Session()

    def embed(self, text: str) -> list[float]:
        resp = self._session.post(
            self.url,
            data=text.encode("utf-8"),
            headers={"Content-Type": "text/plain; charset=utf-8"},
            timeout=self.timeout,
        )
        resp.raise_for_status()
        payload = resp.json()
        if isinstance(payload, dict):
            payload = payload.get("embedding")
        if not isinstance(payload, list):
            raise ValueError("embedding endpoint returned no vector")
        return [float(v) for v in payload]


def cosine(a: list[float], b: list[float]) -> float:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    if na == 0 or nb == 0:
        return 0.0
    return dot / (na * nb)


def predicate_overlap(candidate: PrologProgram, reference: PrologProgram) -> float:
    """|shared predicate names| / max(1, |reference predicate names|)."""
    cand = extract_predicate_names(candidate)
    ref = extract_predicate_names(reference)
    return len(cand & ref) / max(1, len(ref))


def semantic_score(
    candidate: str | None,
    reference: str | None,
    embedder=None,
) -> SemanticScore:
    """Blend cosine similarity and predicate overlap; the reward is
    2 * s_sem floored at 0.5 so even unrelated attempts keep a pulse.
    Missing or empty text on either side scores s_sem = 0.
    """
    if not candidate or not candidate.strip() or not reference or not reference.strip():
        return SemanticScore(0.0, 0.0, 0.0, FLOOR_REWARD)
    embedder = embedder or TrigramEmbedder()
    cos = cosine(embedder.embed(candidate), embedder.embed(reference))
    cos = min(max(cos, 0.0), 1.0)
    pred = predicate_overlap(PrologProgram(candidate), PrologProgram(reference))
    s_sem = (cos + pred) / 2.0
    reward = max(FLOOR_REWARD, 2.0 * s_sem)
    return SemanticScore(cos, pred, s_sem, reward)
