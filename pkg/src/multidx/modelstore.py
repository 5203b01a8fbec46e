"""Versioned binary serialization of trained artifacts (.mdx files).

Layout (all integers little-endian, fixed width):

    offset  size  field
    0       8     magic "MDXMODEL"
    8       4     format_version (u32)
    12      4     header length H (u32)
    16      H     header: canonical encoding of {mode, payload_kind,
                  descriptor, preprocessing}
    16+H    8     payload length P (u64)
    24+H    P     payload: canonical encoding of the model state
    24+H+P  4     CRC-32 of the payload bytes (u32)

The value encoding is canonical (same structure => identical bytes), so
saving the same artifact twice produces byte-identical files.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Union

import numpy as np

from .cnn.network import CnnModel, model_from_state, model_state
from .stacking import StackedModel

MAGIC = b"MDXMODEL"
FORMAT_VERSION = 1

MODES = (
    "symptoms",
    "cough",
    "blood25",
    "blood5",
    "raman",
    "ecg",
    "mortality7",
    "mortality9",
)


class StoreError(ValueError):
    """Raised for unreadable, corrupt or incompatible model files."""


# ---------------------------------------------------------------------------
# Canonical value encoding
# ---------------------------------------------------------------------------

_TAG_NONE = b"N"
_TAG_TRUE = b"T"
_TAG_FALSE = b"F"
_TAG_INT = b"i"
_TAG_FLOAT = b"f"
_TAG_STR = b"s"
_TAG_BYTES = b"b"
_TAG_LIST = b"l"
_TAG_DICT = b"d"
_TAG_ARRAY_F8 = b"A"
_TAG_ARRAY_I8 = b"I"


def encode_value(value) -> bytes:
    """Canonical tagged binary encoding of a nested plain-value tree."""
    if value is None:
        return _TAG_NONE
    if isinstance(value, bool):
        return _TAG_TRUE if value else _TAG_FALSE
    if isinstance(value, (int, np.integer)):
        return _TAG_INT + struct.pack("<q", int(value))
    if isinstance(value, (float, np.floating)):
        return _TAG_FLOAT + struct.pack("<d", float(value))
    if isinstance(value, str):
        raw = value.encode("utf-8")
        return _TAG_STR + struct.pack("<I", len(raw)) + raw
    if isinstance(value, bytes):
        return _TAG_BYTES + struct.pack("<I", len(value)) + value
    if isinstance(value, np.ndarray):
        if value.dtype == np.float64:
            tag = _TAG_ARRAY_F8
        elif value.dtype == np.int64:
            tag = _TAG_ARRAY_I8
        else:
            raise StoreError(f"unsupported array dtype {value.dtype}")
        arr = np.ascontiguousarray(value)
        head = struct.pack("<B", arr.ndim) + struct.pack(f"<{arr.ndim}q", *arr.shape)
        return tag + head + arr.tobytes()
    if isinstance(value, (list, tuple)):
        parts = [encode_value(v) for v in value]
        return _TAG_LIST + struct.pack("<I", len(parts)) + b"".join(parts)
    if isinstance(value, dict):
        parts = []
        for k, v in value.items():
            if not isinstance(k, str):
                raise StoreError("dict keys must be strings")
            parts.append(encode_value(k) + encode_value(v))
        return _TAG_DICT + struct.pack("<I", len(parts)) + b"".join(parts)
    raise StoreError(f"cannot encode value of type {type(value).__name__}")


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise StoreError("malformed: truncated value stream")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def _decode(reader: _Reader):
    tag = reader.take(1)
    if tag == _TAG_NONE:
        return None
    if tag == _TAG_TRUE:
        return True
    if tag == _TAG_FALSE:
        return False
    if tag == _TAG_INT:
        return reader.unpack("<q")[0]
    if tag == _TAG_FLOAT:
        return reader.unpack("<d")[0]
    if tag == _TAG_STR:
        (n,) = reader.unpack("<I")
        return reader.take(n).decode("utf-8")
    if tag == _TAG_BYTES:
        (n,) = reader.unpack("<I")
        return reader.take(n)
    if tag in (_TAG_ARRAY_F8, _TAG_ARRAY_I8):
        (ndim,) = reader.unpack("<B")
        shape = reader.unpack(f"<{ndim}q") if ndim else ()
        dtype = np.float64 if tag == _TAG_ARRAY_F8 else np.int64
        count = 1
        for d in shape:
            count *= d
        raw = reader.take(count * 8)
        return np.frombuffer(raw, dtype=dtype).reshape(shape).copy()
    if tag == _TAG_LIST:
        (n,) = reader.unpack("<I")
        return [_decode(reader) for _ in range(n)]
    if tag == _TAG_DICT:
        (n,) = reader.unpack("<I")
        return {_decode(reader): _decode(reader) for _ in range(n)}
    raise StoreError(f"malformed: unknown tag {tag!r}")


def decode_value(data: bytes):
    reader = _Reader(data)
    value = _decode(reader)
    if reader.pos != len(data):
        raise StoreError("malformed: trailing bytes after value")
    return value


# ---------------------------------------------------------------------------
# Artifact
# ---------------------------------------------------------------------------

@dataclass
class ModelArtifact:
    """One deployable model: payload + input descriptor + preprocessing."""

    mode: str
    payload_kind: str  # "stacked" | "cnn"
    descriptor: Dict[str, object]
    payload_state: Dict[str, object]
    preprocessing: Dict[str, object] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION
    checksum: int = 0

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise StoreError(f"unknown mode {self.mode!r}; have {list(MODES)}")
        if self.payload_kind not in ("stacked", "cnn"):
            raise StoreError(f"unknown payload kind {self.payload_kind!r}")

    @property
    def version_label(self) -> str:
        return f"v{self.format_version}:{self.checksum:08x}"

    def build_model(self) -> Union[StackedModel, CnnModel]:
        if self.payload_kind == "stacked":
            return StackedModel.from_state(self.payload_state)
        return model_from_state(self.payload_state)

    @classmethod
    def for_stacked(cls, mode, model: StackedModel, descriptor, preprocessing=None):
        return cls(
            mode=mode,
            payload_kind="stacked",
            descriptor=descriptor,
            payload_state=model.to_state(),
            preprocessing=preprocessing or {},
        )

    @classmethod
    def for_cnn(cls, mode, model: CnnModel, descriptor, preprocessing=None):
        return cls(
            mode=mode,
            payload_kind="cnn",
            descriptor=descriptor,
            payload_state=model_state(model),
            preprocessing=preprocessing or {},
        )


def save(artifact: ModelArtifact, path: Union[str, Path]) -> None:
    """Write the artifact; the payload CRC is computed here."""
    header = encode_value(
        {
            "mode": artifact.mode,
            "payload_kind": artifact.payload_kind,
            "descriptor": artifact.descriptor,
            "preprocessing": artifact.preprocessing,
        }
    )
    payload = encode_value(artifact.payload_state)
    artifact.checksum = zlib.crc32(payload) & 0xFFFFFFFF
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", artifact.format_version))
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(struct.pack("<Q", len(payload)))
        fh.write(payload)
        fh.write(struct.pack("<I", artifact.checksum))


def load(path: Union[str, Path]) -> ModelArtifact:
    """Read and validate an artifact file."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(MAGIC) + 8:
        raise StoreError("malformed: file too short")
    if data[: len(MAGIC)] != MAGIC:
        raise StoreError("not a model file")
    pos = len(MAGIC)
    (version,) = struct.unpack_from("<I", data, pos)
    pos += 4
    if version > FORMAT_VERSION:
        raise StoreError(f"unsupported version {version} (reader supports <= {FORMAT_VERSION})")
    (header_len,) = struct.unpack_from("<I", data, pos)
    pos += 4
    if pos + header_len + 8 > len(data):
        raise StoreError("malformed: truncated header")
    header = decode_value(data[pos : pos + header_len])
    pos += header_len
    (payload_len,) = struct.unpack_from("<Q", data, pos)
    pos += 8
    if pos + payload_len + 4 > len(data):
        raise StoreError("malformed: truncated payload")
    payload_bytes = data[pos : pos + payload_len]
    pos += payload_len
    (stored_crc,) = struct.unpack_from("<I", data, pos)
    actual_crc = zlib.crc32(payload_bytes) & 0xFFFFFFFF
    if stored_crc != actual_crc:
        raise StoreError("checksum mismatch: payload corrupted")
    return ModelArtifact(
        mode=str(header["mode"]),
        payload_kind=str(header["payload_kind"]),
        descriptor=header["descriptor"],
        payload_state=decode_value(payload_bytes),
        preprocessing=header["preprocessing"],
        format_version=version,
        checksum=stored_crc,
    )
