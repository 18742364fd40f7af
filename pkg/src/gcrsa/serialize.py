"""Binary index container.

Layout (little-endian)::

    magic "GCRS" | u16 version | u8 tag length | tag (ASCII)
    | u64 payload length | payload | u32 CRC32(payload)

The payload is a typed walk of the structure's object graph.  Every value
starts with a one-byte type code; integers are little-endian, and numpy
arrays are written raw and padded to a multiple of 8 bytes, so bit arrays
(uint64 words) keep their 64-bit word layout.  Constant lookup tables
shared by all instances are written by name.  Only classes defined in this
package can be rebuilt, and loading never runs constructors.
"""

from __future__ import annotations

import importlib
import struct
import zlib
from pathlib import Path

import numpy as np

from . import bitvector
from .bitio import BitBuffer
from .structures import STRUCTURE_TAGS, structure_tag

__all__ = ["ContainerError", "MAGIC", "VERSION", "dumps", "loads", "save", "load", "read_tag"]

MAGIC = b"GCRS"
VERSION = 1
_PKG = __name__.rsplit(".", 1)[0]


# module-level tables shared by every instance: written by name, not by value
_SHARED = {name: getattr(bitvector, name) for name in
           ("_RRR_DEC_FLAT", "_RRR_CSTART", "_RRR_WIDTH_NP", "_RRR_OFFSET", "_RRR_POP")}
_SHARED_IDS = {id(v): k for k, v in _SHARED.items()}


class ContainerError(ValueError):
    """Malformed, corrupted or unsupported container."""


# -- encoding ---------------------------------------------------------------------


def _put_str(out: bytearray, s: str) -> None:
    b = s.encode()
    out += struct.pack("<I", len(b)) + b


def _encode(x, out: bytearray) -> None:
    if x is None:
        out += b"N"
    elif isinstance(x, (bool, np.bool_)):
        out += b"T" if x else b"F"
    elif isinstance(x, (int, np.integer)):
        v = int(x)
        if -(1 << 63) <= v < 1 << 63:
            out += b"i" + struct.pack("<q", v)
        else:
            raw = v.to_bytes((v.bit_length() + 8) // 8, "little", signed=True)
            out += b"I" + struct.pack("<I", len(raw)) + raw
    elif isinstance(x, (float, np.floating)):
        out += b"f" + struct.pack("<d", float(x))
    elif isinstance(x, str):
        out += b"s"
        _put_str(out, x)
    elif isinstance(x, bytes):
        out += b"b" + struct.pack("<I", len(x)) + x
    elif isinstance(x, np.ndarray) and id(x) in _SHARED_IDS:
        out += b"r"
        _put_str(out, _SHARED_IDS[id(x)])
    elif isinstance(x, np.ndarray):
        a = np.ascontiguousarray(x)
        a = a.astype(a.dtype.newbyteorder("<"), copy=False)
        out += b"a"
        _put_str(out, a.dtype.str)
        out += struct.pack("<B", a.ndim) + struct.pack(f"<{a.ndim}Q", *a.shape)
        raw = a.tobytes()
        out += struct.pack("<Q", len(raw)) + raw + bytes(-len(raw) % 8)
    elif isinstance(x, BitBuffer):
        out += b"B" + struct.pack("<Q", x.length)
        _encode(np.array(x.words, dtype=np.uint64), out)
    elif type(x) in (list, tuple):
        out += b"l" if type(x) is list else b"t"
        out += struct.pack("<Q", len(x))
        for v in x:
            _encode(v, out)
    elif type(x) is dict:
        out += b"d" + struct.pack("<Q", len(x))
        for k, v in x.items():
            _encode(k, out)
            _encode(v, out)
    elif type(x).__module__.startswith(_PKG + ".") and hasattr(x, "__dict__"):
        out += b"o"
        _put_str(out, type(x).__module__)
        _put_str(out, type(x).__qualname__)
        _encode(dict(vars(x)), out)
    else:
        raise TypeError(f"cannot serialize {type(x).__name__}")


class _Reader:
    def __init__(self, data: bytes):
        self.data = memoryview(data)
        self.pos = 0

    def take(self, k: int) -> bytes:
        if self.pos + k > len(self.data):
            raise ContainerError("truncated payload")
        b = self.data[self.pos:self.pos + k]
        self.pos += k
        return bytes(b)

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def str(self) -> str:
        (k,) = self.unpack("<I")
        return self.take(k).decode()


def _resolve_class(module: str, qualname: str):
    if not module.startswith(_PKG + "."):
        raise ContainerError(f"refusing class from module {module!r}")
    obj = importlib.import_module(module)
    for part in qualname.split("."):
        obj = getattr(obj, part, None)
    if not isinstance(obj, type):
        raise ContainerError(f"unknown class {module}.{qualname}")
    return obj


def _decode(r: _Reader):
    code = r.take(1)
    if code == b"N":
        return None
    if code in (b"T", b"F"):
        return code == b"T"
    if code == b"i":
        return r.unpack("<q")[0]
    if code == b"I":
        (k,) = r.unpack("<I")
        return int.from_bytes(r.take(k), "little", signed=True)
    if code == b"f":
        return r.unpack("<d")[0]
    if code == b"s":
        return r.str()
    if code == b"b":
        (k,) = r.unpack("<I")
        return r.take(k)
    if code == b"a":
        dtype = np.dtype(r.str())
        (ndim,) = r.unpack("<B")
        shape = r.unpack(f"<{ndim}Q")
        (k,) = r.unpack("<Q")
        raw = r.take(k)
        r.take(-k % 8)
        a = np.frombuffer(raw, dtype=dtype).reshape(shape)
        return a.astype(dtype.newbyteorder("="))  # native order, writable copy
    if code == b"r":
        name = r.str()
        if name not in _SHARED:
            raise ContainerError(f"unknown shared table {name!r}")
        return _SHARED[name]
    if code == b"B":
        (length,) = r.unpack("<Q")
        words = _decode(r)
        return BitBuffer([int(w) for w in words], length)
    if code in (b"l", b"t"):
        (k,) = r.unpack("<Q")
        items = [_decode(r) for _ in range(k)]
        return items if code == b"l" else tuple(items)
    if code == b"d":
        (k,) = r.unpack("<Q")
        out = {}
        for _ in range(k):
            key = _decode(r)
            out[key] = _decode(r)
        return out
    if code == b"o":
        cls = _resolve_class(r.str(), r.str())
        state = _decode(r)
        obj = cls.__new__(cls)
        obj.__dict__.update(state)
        return obj
    raise ContainerError(f"bad type code {code!r}")


# -- container --------------------------------------------------------------------


def dumps(obj) -> bytes:
    tag = structure_tag(obj)
    payload = bytearray()
    _encode(obj, payload)
    head = MAGIC + struct.pack("<HB", VERSION, len(tag)) + tag.encode("ascii")
    return head + struct.pack("<Q", len(payload)) + bytes(payload) + struct.pack("<I", zlib.crc32(payload))


def _header(data: bytes) -> tuple[str, int]:
    if len(data) < 7 or data[:4] != MAGIC:
        raise ContainerError("not a GCRS container")
    version, tl = struct.unpack("<HB", data[4:7])
    if version != VERSION:
        raise ContainerError(f"unsupported container version {version}")
    tag = data[7:7 + tl].decode("ascii", "replace")
    if tag not in STRUCTURE_TAGS:
        raise ContainerError(f"unknown structure tag {tag!r}")
    return tag, 7 + tl


def loads(data: bytes):
    tag, p = _header(data)
    if len(data) < p + 12:
        raise ContainerError("truncated container")
    (k,) = struct.unpack("<Q", data[p:p + 8])
    payload = data[p + 8:p + 8 + k]
    if len(payload) != k or len(data) != p + 12 + k:
        raise ContainerError("truncated container")
    (crc,) = struct.unpack("<I", data[p + 8 + k:])
    if zlib.crc32(payload) != crc:
        raise ContainerError("checksum mismatch")
    r = _Reader(payload)
    obj = _decode(r)
    if r.pos != k:
        raise ContainerError("trailing bytes in payload")
    if structure_tag(obj) != tag:
        raise ContainerError("payload does not match its tag")
    return obj


def save(obj, path) -> int:
    """Write ``obj`` to ``path``; returns the file size in bytes."""
    data = dumps(obj)
    Path(path).write_bytes(data)
    return len(data)


def load(path):
    return loads(Path(path).read_bytes())


def read_tag(path) -> str:
    with open(path, "rb") as f:
        return _header(f.read(263))[0]
