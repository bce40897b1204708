"""Bit extraction and packed bit-file handling.

A detection in an even clock cycle encodes 1, in an odd cycle 0 (cycle 0 is
even).  Bits are packed MSB-first; trailing pad bits in the final byte are
zero and excluded from ``n_bits``.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .sim import EventStream, FileFormatError

BIT_MAGIC = b"QRNGBIT1"
_BIT_HEADER = struct.Struct("<8sQ")

_POPCOUNT = np.unpackbits(np.arange(256, dtype=np.uint8)[:, None], axis=1).sum(axis=1)


@dataclass(frozen=True)
class BitStream:
    """Packed binary sequence with an exact bit length."""

    data: np.ndarray  # uint8, MSB-first
    n_bits: int

    def __post_init__(self) -> None:
        if self.n_bits < 0:
            raise ValueError("n_bits must be >= 0")
        need = (self.n_bits + 7) // 8
        if self.data.size != need:
            raise ValueError(f"{self.data.size} bytes cannot hold exactly "
                             f"{self.n_bits} bits")
        if self.n_bits % 8:
            pad = self.data[-1] & ((1 << (8 - self.n_bits % 8)) - 1)
            if pad:
                raise ValueError("trailing pad bits must be zero")

    def __len__(self) -> int:
        return self.n_bits

    @classmethod
    def from_array(cls, bits01) -> "BitStream":
        arr = np.asarray(bits01, dtype=np.uint8)
        if arr.size and arr.max() > 1:
            raise ValueError("bit array entries must be 0 or 1")
        return cls(np.packbits(arr), int(arr.size))

    @classmethod
    def from_bytes(cls, payload: bytes, n_bits: int) -> "BitStream":
        data = np.frombuffer(payload, dtype=np.uint8).copy()
        need = (n_bits + 7) // 8
        if data.size < need:
            raise ValueError(f"payload too short for {n_bits} bits")
        data = data[:need]
        if n_bits % 8:
            data[-1] &= 0xFF << (8 - n_bits % 8) & 0xFF
        return cls(data, n_bits)

    def to_array(self) -> np.ndarray:
        """Unpacked 0/1 array (materializes n_bits bytes)."""
        return np.unpackbits(self.data)[: self.n_bits]

    def ones_count(self) -> int:
        # pad bits are zero by invariant, so a byte popcount is exact
        return int(_POPCOUNT[self.data].sum())

    def mean(self) -> float:
        if self.n_bits == 0:
            raise ValueError("mean of an empty bit stream")
        return self.ones_count() / self.n_bits

    def slice_bits(self, start: int, length: int) -> "BitStream":
        if start < 0 or length < 0 or start + length > self.n_bits:
            raise ValueError("slice out of range")
        if start % 8 == 0:
            first = start // 8
            data = self.data[first:first + (length + 7) // 8].copy()
            if length % 8:
                data[-1] &= 0xFF << (8 - length % 8) & 0xFF
            return BitStream(data, length)
        sub = np.unpackbits(self.data[start // 8:(start + length + 7) // 8])
        off = start % 8
        return BitStream.from_array(sub[off:off + length])

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitStream):
            return NotImplemented
        return self.n_bits == other.n_bits and np.array_equal(self.data, other.data)


class BitPacker:
    """Incremental MSB-first packer for chunked pipelines."""

    def __init__(self) -> None:
        self._full: list[np.ndarray] = []
        self._tail = np.empty(0, dtype=np.uint8)
        self._n_bits = 0

    def append(self, bits01: np.ndarray) -> None:
        arr = np.asarray(bits01, dtype=np.uint8)
        self._n_bits += arr.size
        combined = np.concatenate([self._tail, arr]) if self._tail.size else arr
        nfull = combined.size & ~7
        if nfull:
            self._full.append(np.packbits(combined[:nfull]))
        self._tail = combined[nfull:]

    def finish(self) -> BitStream:
        parts = list(self._full)
        if self._tail.size:
            parts.append(np.packbits(self._tail))
        data = np.concatenate(parts) if parts else np.empty(0, dtype=np.uint8)
        return BitStream(data, self._n_bits)


def extract_bits(stream: EventStream) -> BitStream:
    """One bit per detection event: cycle parity, even -> 1, odd -> 0."""
    parity = (1 - (stream.cycles & np.uint64(1))).astype(np.uint8)
    return BitStream.from_array(parity)


def cycle_parity_bits(cycles: np.ndarray) -> np.ndarray:
    """Chunk-level form of the extraction rule, for fused pipelines."""
    return (1 - (cycles & np.uint64(1))).astype(np.uint8)


def bit_rate(stream: EventStream) -> float:
    """Sustained extraction rate in bits per second."""
    if stream.n_cycles <= 0:
        raise ValueError("bit_rate needs a stream with at least one cycle")
    return len(stream) * stream.clock_freq / stream.n_cycles


def write_bits(bits: BitStream, path) -> None:
    """Bit file: 16-byte header (magic, u64 bit count) then the packed
    payload.  External consumers can skip the header and read raw bytes."""
    with open(path, "wb") as fh:
        fh.write(_BIT_HEADER.pack(BIT_MAGIC, bits.n_bits))
        fh.write(bits.data.tobytes())


def read_bits(path) -> BitStream:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _BIT_HEADER.size:
        raise FileFormatError(f"{path}: truncated bit file header")
    magic, n_bits = _BIT_HEADER.unpack_from(raw)
    if magic != BIT_MAGIC:
        raise FileFormatError(f"{path}: bad magic {magic!r}")
    payload = raw[_BIT_HEADER.size:]
    if len(payload) != (n_bits + 7) // 8:
        raise FileFormatError(
            f"{path}: expected {(n_bits + 7) // 8} payload bytes, found {len(payload)}")
    try:
        return BitStream.from_bytes(payload, n_bits)
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


def write_bits_raw(bits: BitStream, path) -> None:
    """Headerless packed payload, the format external battery tools consume."""
    with open(path, "wb") as fh:
        fh.write(bits.data.tobytes())


def read_bits_raw(path, n_bits: int) -> BitStream:
    with open(path, "rb") as fh:
        payload = fh.read()
    if len(payload) < (n_bits + 7) // 8:
        raise FileFormatError(f"{path}: raw file shorter than {n_bits} bits")
    return BitStream.from_bytes(payload, n_bits)


def write_bits_ascii(bits: BitStream, path) -> None:
    """One '0'/'1' character per bit, no separators."""
    arr = bits.to_array()
    with open(path, "wb") as fh:
        fh.write((arr + ord("0")).astype(np.uint8).tobytes())


def read_bits_ascii(path) -> BitStream:
    with open(path, "rb") as fh:
        raw = np.frombuffer(fh.read(), dtype=np.uint8)
    if raw.size and not np.all((raw == ord("0")) | (raw == ord("1"))):
        raise FileFormatError(f"{path}: ASCII bit file may only contain 0/1")
    return BitStream.from_array(raw - ord("0"))


def split_streams(bits: BitStream, n_streams: int, stream_bits: int) -> list[BitStream]:
    """Cut the first ``n_streams * stream_bits`` bits into disjoint
    consecutive substreams."""
    if n_streams < 1 or stream_bits < 1:
        raise ValueError("n_streams and stream_bits must be >= 1")
    if n_streams * stream_bits > bits.n_bits:
        raise ValueError(
            f"need {n_streams * stream_bits} bits, stream has {bits.n_bits}")
    return [bits.slice_bits(i * stream_bits, stream_bits) for i in range(n_streams)]
