"""Bit-exact binary file formats: embedding datasets and checkpoints.

Both formats are little-endian with fixed-width fields and magic
prefixes; the checkpoint additionally carries a trailing CRC-32 over
everything that precedes it.  See docs/formats.md for the normative
byte layout.
"""

import struct
import zlib

import numpy as np

from .exceptions import (
    CorruptionError,
    DimensionError,
    MagicError,
    TruncationError,
    VersionError,
)
from .labels import ClassRegistry
from .learner import AnalyticContinualClassifier

EMBED_MAGIC = b"GEMB"
LABEL_MAGIC = b"GLBL"
CHECKPOINT_MAGIC = b"GACL"
EMBED_VERSION = 1
CHECKPOINT_VERSION = 1

_DTYPE_CODES = {0: np.dtype("<f4"), 1: np.dtype("<f8")}


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, n, what):
        if self.pos + n > len(self.data):
            raise TruncationError(f"file truncated while reading {what}")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt, what):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def write_embeddings(path, embeddings, labels, dtype="f8"):
    """Write an embedding matrix plus u32 labels; dtype 'f4' or 'f8'."""
    embeddings = np.asarray(embeddings, dtype=np.float64)
    labels = np.asarray(labels)
    if embeddings.ndim != 2:
        raise DimensionError(f"embeddings must be 2-D, got ndim={embeddings.ndim}")
    if labels.ndim != 1 or labels.shape[0] != embeddings.shape[0]:
        raise DimensionError("label count must equal embedding rows")
    code = 0 if dtype == "f4" else 1
    payload = np.ascontiguousarray(embeddings, dtype=_DTYPE_CODES[code])
    rows, cols = embeddings.shape
    with open(path, "wb") as f:
        f.write(EMBED_MAGIC)
        f.write(struct.pack("<IQQB", EMBED_VERSION, rows, cols, code))
        f.write(payload.tobytes())
        f.write(LABEL_MAGIC)
        f.write(struct.pack("<Q", rows))
        f.write(np.ascontiguousarray(labels, dtype="<u4").tobytes())


def read_embeddings(path):
    """Read an embedding file; f32 payloads are upcast to f64."""
    with open(path, "rb") as f:
        r = _Reader(f.read())
    if r.take(4, "magic") != EMBED_MAGIC:
        raise MagicError(f"{path}: not an embedding file")
    version, rows, cols, code = r.unpack("<IQQB", "header")
    if version != EMBED_VERSION:
        raise VersionError(f"{path}: unsupported embedding format version {version}")
    if code not in _DTYPE_CODES:
        raise DimensionError(f"{path}: unknown dtype code {code}")
    dt = _DTYPE_CODES[code]
    raw = r.take(rows * cols * dt.itemsize, "embedding payload")
    embeddings = np.frombuffer(raw, dtype=dt).reshape(rows, cols).astype(np.float64)
    if r.take(4, "label magic") != LABEL_MAGIC:
        raise MagicError(f"{path}: missing label block")
    (label_rows,) = r.unpack("<Q", "label header")
    if label_rows != rows:
        raise DimensionError(f"{path}: label rows {label_rows} != embedding rows {rows}")
    labels = np.frombuffer(r.take(4 * rows, "labels"), dtype="<u4").astype(np.int64)
    return embeddings, labels


def save_checkpoint(path, learner):
    """Serialize a trained classifier's full state."""
    d = learner.n_features_in_
    classes = learner.registry_.classes
    buf = bytearray()
    buf += CHECKPOINT_MAGIC
    buf += struct.pack(
        "<IdQQQ", CHECKPOINT_VERSION, learner.gamma, d, learner.n_tasks_, len(classes)
    )
    buf += np.asarray(classes, dtype="<u4").tobytes()
    buf += np.ascontiguousarray(learner.memory_, dtype="<f8").tobytes()
    buf += np.ascontiguousarray(learner.weights_, dtype="<f8").tobytes()
    buf += struct.pack("<I", zlib.crc32(bytes(buf)))
    with open(path, "wb") as f:
        f.write(bytes(buf))


def load_checkpoint(path):
    """Restore a classifier; subsequent updates are bit-identical to the
    original's (the state is the learner's entire knowledge)."""
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 4:
        raise TruncationError(f"{path}: shorter than the magic prefix")
    if data[-4:] != struct.pack("<I", zlib.crc32(data[:-4])):
        raise CorruptionError(f"{path}: CRC mismatch")
    r = _Reader(data[:-4])
    if r.take(4, "magic") != CHECKPOINT_MAGIC:
        raise MagicError(f"{path}: not a checkpoint file")
    version, gamma, d, k, n_classes = r.unpack("<IdQQQ", "header")
    if version != CHECKPOINT_VERSION:
        raise VersionError(f"{path}: unsupported checkpoint version {version}")
    classes = np.frombuffer(r.take(4 * n_classes, "registry"), dtype="<u4")
    memory = np.frombuffer(r.take(8 * d * d, "memory matrix"), dtype="<f8")
    weights = np.frombuffer(r.take(8 * d * n_classes, "weights"), dtype="<f8")
    if r.pos != len(r.data):
        raise DimensionError(f"{path}: {len(r.data) - r.pos} trailing bytes")
    learner = AnalyticContinualClassifier(gamma=gamma)
    learner.n_features_in_ = int(d)
    learner.memory_ = memory.reshape(d, d).copy()
    learner.weights_ = weights.reshape(d, n_classes).copy()
    learner.registry_ = ClassRegistry(tuple(int(c) for c in classes))
    learner.n_tasks_ = int(k)
    return learner
