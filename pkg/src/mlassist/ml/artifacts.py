"""Versioned binary blobs for fitted models.

Layout: magic bytes, a u16 format version, a length-prefixed JSON header
(algorithm name and parameter map) the store can index without touching the
body, then the pickled estimator.  Bodies round-trip: load(save(m)) predicts
identically to m.
"""

from __future__ import annotations

import io
import json
import pickle
import struct

MAGIC = b"MLSTM"
FORMAT_VERSION = 1


def save_model(estimator, algorithm: str, params: dict) -> bytes:
    header = json.dumps({"algorithm": algorithm, "params": params},
                        sort_keys=True).encode("utf-8")
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<H", FORMAT_VERSION))
    buf.write(struct.pack("<I", len(header)))
    buf.write(header)
    buf.write(pickle.dumps(estimator, protocol=4))
    return buf.getvalue()


def read_header(blob: bytes) -> dict:
    if blob[: len(MAGIC)] != MAGIC:
        raise ValueError("not a model blob: bad magic bytes")
    offset = len(MAGIC)
    (version,) = struct.unpack_from("<H", blob, offset)
    if version > FORMAT_VERSION:
        raise ValueError(f"model blob format v{version} is newer than supported v{FORMAT_VERSION}")
    offset += 2
    (header_len,) = struct.unpack_from("<I", blob, offset)
    offset += 4
    header = json.loads(blob[offset:offset + header_len].decode("utf-8"))
    header["_body_offset"] = offset + header_len
    return header


def load_model(blob: bytes):
    """Returns (estimator, header dict)."""
    header = read_header(blob)
    body = blob[header.pop("_body_offset"):]
    return pickle.loads(body), header
