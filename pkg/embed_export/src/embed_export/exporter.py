"""Read a corpus JSONL, encode each document's raw text, write EMB1.

EMB1 layout: 4 ASCII bytes "EMB1", uint32-LE row count, uint32-LE
dimension, then row-major IEEE-754 float32-LE values.  Row i aligns with
document i of the input corpus file.  Raw text is encoded rather than any
preprocessed tokens, since contextual encoders expect natural sentences.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .encoders import make_encoder

EMB1_MAGIC = b"EMB1"
_HEADER = struct.Struct("<4sII")


@dataclass
class ExportConfig:
    input_path: str
    output_path: str
    model: str = "sentence-transformers/all-MiniLM-L6-v2"
    batch_size: int = 32

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")


def read_texts(path: str | Path) -> list[str]:
    """Document texts in file order from a corpus (or tokenized) JSONL."""
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"corpus file not found: {path}")
    texts = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(
                    f"malformed JSON at line {lineno} of {path}: {exc}"
                ) from exc
            if "_config" in record:
                continue
            if "text" not in record:
                raise ValueError(f"record without text field at line {lineno} of {path}")
            texts.append(str(record["text"]))
    return texts


def export_embeddings(config: ExportConfig) -> dict:
    """Encode every document and write the EMB1 file.

    Rows are L2-normalized float32; a metadata sidecar records the encoder
    so downstream runs know what produced the vectors.  Returns summary
    stats {n_docs, dim, encoder}.
    """
    texts = read_texts(config.input_path)
    if not texts:
        raise ValueError(f"empty corpus: {config.input_path}")
    encoder = make_encoder(config.model)

    batches = []
    for start in range(0, len(texts), config.batch_size):
        batches.append(encoder.encode_batch(texts[start:start + config.batch_size]))
    values = np.vstack(batches).astype(np.float32)
    if values.shape[0] != len(texts):
        raise ValueError(
            f"encoder returned {values.shape[0]} rows for {len(texts)} documents"
        )
    norms = np.linalg.norm(values, axis=1)
    if (norms == 0).any():
        raise ValueError("encoder produced a zero vector; cannot L2-normalize")
    values /= norms[:, np.newaxis]

    out = Path(config.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    n_docs, dim = values.shape
    with open(out, "wb") as fh:
        fh.write(_HEADER.pack(EMB1_MAGIC, n_docs, dim))
        fh.write(np.ascontiguousarray(values, dtype="<f4").tobytes())

    meta = {"encoder": encoder.name, "n_docs": int(n_docs), "dim": int(dim),
            "input": str(config.input_path), "batch_size": config.batch_size}
    out.with_suffix(out.suffix + ".meta.json").write_text(
        json.dumps(meta, sort_keys=True) + "\n", encoding="utf-8"
    )
    return meta
