"""Request serialization and backward one-hot character quantization."""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..log_model import ApiCallRecord

# 52 letters + 10 digits + 32 ASCII punctuation = 94 printable characters;
# two private-use placeholders round the alphabet out to 96 slots without
# ever matching log text.
_RESERVED = ""
_DEFAULT_CHARS = (
    string.ascii_lowercase + string.ascii_uppercase + string.digits + string.punctuation + _RESERVED
)

DEFAULT_QUANTIZATION_LENGTH = 1014


@dataclass(frozen=True)
class Alphabet:
    chars: str

    def __post_init__(self):
        if not self.chars:
            raise ValueError("alphabet must not be empty")
        if len(set(self.chars)) != len(self.chars):
            raise ValueError("alphabet contains duplicate characters")
        object.__setattr__(
            self, "_index", {c: i for i, c in enumerate(self.chars)}
        )

    def __len__(self) -> int:
        return len(self.chars)

    def index(self, ch: str) -> int | None:
        """Slot of ch, or None for out-of-alphabet and blank characters."""
        if ch.isspace():
            return None
        return self._index.get(ch)

    @classmethod
    def from_file(cls, path: str | Path) -> "Alphabet":
        """Load from a JSON file: {"characters": "<all chars>"} or a list."""
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        chars = obj["characters"]
        if isinstance(chars, list):
            chars = "".join(chars)
        return cls(chars)


def default_alphabet() -> Alphabet:
    return Alphabet(_DEFAULT_CHARS)


def serialize_request(record: ApiCallRecord) -> str:
    """Canonical text form: api name, '|', then name=value pairs sorted by name."""
    pairs = "&".join(f"{k}={v}" for k, v in sorted(record.params))
    return f"{record.api}|{pairs}"


def char_indices(text: str, alphabet: Alphabet, l0: int) -> np.ndarray:
    """Alphabet slot per output column, -1 where the column is all-zero.

    Column j holds the (j+1)-th character counted from the end of the text;
    anything past l0 is dropped and short texts pad with -1 at the tail.
    """
    idx = np.full(l0, -1, dtype=np.int32)
    n = min(len(text), l0)
    for j in range(n):
        slot = alphabet.index(text[len(text) - 1 - j])
        if slot is not None:
            idx[j] = slot
    return idx


def indices_to_onehot(idx: np.ndarray, m: int) -> np.ndarray:
    """Expand index rows (batch, l0) into one-hot (batch, m, l0) float64."""
    if idx.ndim == 1:
        idx = idx[None, :]
    batch, l0 = idx.shape
    out = np.zeros((batch, m, l0), dtype=np.float64)
    b, j = np.nonzero(idx >= 0)
    out[b, idx[b, j], j] = 1.0
    return out


def quantize(text: str, alphabet: Alphabet, l0: int = DEFAULT_QUANTIZATION_LENGTH) -> np.ndarray:
    """One-hot matrix (m, l0) reading the text backward.

    The latest characters land near column 0; out-of-alphabet and blank
    characters become all-zero columns.
    """
    if l0 < 1:
        raise ValueError("quantization length must be >= 1")
    return indices_to_onehot(char_indices(text, alphabet, l0), len(alphabet))[0]
