"""Bit buffers, fixed-width packing and the gamma / delta / VByte integer codes.

Codes are written most-significant bit first into a :class:`BitBuffer`.
Unary is ``k - 1`` zeros followed by a one, so ``gamma(1)`` is the single bit
``1``.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K

__all__ = [
    "BitBuffer",
    "CodeError",
    "bits_needed",
    "encode_gamma",
    "decode_gamma",
    "encode_delta",
    "decode_delta",
    "encode_vbyte",
    "decode_vbyte",
    "pack_ints",
    "unpack_ints",
    "packed_bits",
]


class CodeError(ValueError):
    """Raised for values a code cannot represent or truncated input."""


def bits_needed(x: int) -> int:
    """Width of a fixed-width field able to hold ``x`` (at least 1)."""
    return max(1, int(x).bit_length())


class BitBuffer:
    """Append-only bit sequence, MSB-first inside 64-bit words."""

    __slots__ = ("words", "length")

    def __init__(self, words=None, length=0):
        self.words = list(words) if words is not None else []
        self.length = length

    def __len__(self):
        return self.length

    def append(self, value: int, width: int) -> None:
        """Append the low ``width`` bits of ``value``, most significant first."""
        if width <= 0:
            return
        value &= (1 << width) - 1
        words = self.words
        while width:
            off = self.length & 63
            if off == 0:
                words.append(0)
            take = min(64 - off, width)
            chunk = value >> (width - take)
            words[-1] |= chunk << (64 - off - take)
            value &= (1 << (width - take)) - 1
            width -= take
            self.length += take

    def extend(self, bits: str) -> None:
        for ch in bits:
            self.append(1 if ch == "1" else 0, 1)

    def read(self, pos: int, width: int) -> int:
        if width == 0:
            return 0
        if pos < 0 or pos + width > self.length:
            raise CodeError(f"read of {width} bits at {pos} past end ({self.length})")
        words = self.words
        out = 0
        while width:
            idx, off = pos >> 6, pos & 63
            take = min(64 - off, width)
            chunk = (words[idx] >> (64 - off - take)) & ((1 << take) - 1)
            out = (out << take) | chunk
            pos += take
            width -= take
        return out

    def bit(self, pos: int) -> int:
        if not 0 <= pos < self.length:
            raise IndexError(pos)
        return (self.words[pos >> 6] >> (63 - (pos & 63))) & 1

    def count_zeros(self, pos: int) -> int:
        """Number of 0 bits from ``pos`` up to the next 1 bit."""
        words = self.words
        zeros = 0
        while True:
            if pos >= self.length:
                raise CodeError("unterminated unary code")
            idx, off = pos >> 6, pos & 63
            rest = words[idx] & ((1 << (64 - off)) - 1)
            if rest:
                z = (64 - off) - rest.bit_length()
                if pos + z >= self.length:
                    raise CodeError("unterminated unary code")
                return zeros + z
            zeros += 64 - off
            pos += 64 - off

    def write_gamma(self, x: int) -> None:
        if x < 1:
            raise CodeError(f"gamma code undefined for {x}")
        nb = x.bit_length()
        self.append(1, nb)  # nb-1 zeros then a one
        self.append(x, nb - 1)

    def write_delta(self, x: int) -> None:
        if x < 1:
            raise CodeError(f"delta code undefined for {x}")
        nb = x.bit_length()
        self.write_gamma(nb)
        self.append(x, nb - 1)

    def to_string(self) -> str:
        return "".join(str(self.bit(i)) for i in range(self.length))

    @classmethod
    def from_string(cls, bits: str) -> "BitBuffer":
        buf = cls()
        buf.extend(bits)
        return buf

    def to_array(self) -> np.ndarray:
        return np.array(self.words, dtype=np.uint64)

    @classmethod
    def from_array(cls, words, length) -> "BitBuffer":
        return cls([int(w) for w in words], int(length))


def encode_gamma(x: int) -> str:
    buf = BitBuffer()
    buf.write_gamma(x)
    return buf.to_string()


def encode_delta(x: int) -> str:
    buf = BitBuffer()
    buf.write_delta(x)
    return buf.to_string()


def decode_gamma(buf: BitBuffer, pos: int = 0) -> tuple[int, int]:
    z = buf.count_zeros(pos)
    pos += z
    x = buf.read(pos, z + 1)
    return x, pos + z + 1


def decode_delta(buf: BitBuffer, pos: int = 0) -> tuple[int, int]:
    nb, pos = decode_gamma(buf, pos)
    payload = buf.read(pos, nb - 1)
    return (1 << (nb - 1)) | payload, pos + nb - 1


def encode_vbyte(x: int) -> bytes:
    if x < 0:
        raise CodeError(f"VByte needs a non-negative value, got {x}")
    out = bytearray()
    while True:
        chunk = x & 0x7F
        x >>= 7
        if x:
            out.append(chunk | 0x80)
        else:
            out.append(chunk)
            return bytes(out)


def decode_vbyte(data, pos: int = 0) -> tuple[int, int]:
    x = 0
    shift = 0
    while True:
        if pos >= len(data):
            raise CodeError("truncated VByte sequence")
        byte = data[pos]
        pos += 1
        x |= (byte & 0x7F) << shift
        shift += 7
        if not byte & 0x80:
            return x, pos


def pack_ints(values, width: int | None = None) -> tuple[np.ndarray, int]:
    """Pack non-negative integers into ``width``-bit LSB-first fields.

    Returns ``(words, width)``; ``width`` defaults to the minimum able to hold
    the maximum value.
    """
    values = np.ascontiguousarray(values, dtype=np.uint64)
    if width is None:
        width = bits_needed(int(values.max())) if values.size else 1
    if width > 64:
        raise CodeError("fields are limited to 64 bits")
    return K.pack_fields(values, width), width


def unpack_ints(words: np.ndarray, width: int, n: int) -> np.ndarray:
    return K.unpack_fields(words, width, n).astype(np.int64)


def packed_bits(n: int, width: int) -> int:
    """Size in bits of ``n`` packed fields, padded to whole 64-bit words."""
    return ((n * width + 63) // 64) * 64
