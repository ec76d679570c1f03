"""Bit sources with exact budget accounting.

All randomness consumed anywhere in the library flows through a `BitSource`,
so "how many bits did this protocol really use" is a counted fact, not an
estimate.  Bits are strings of '0'/'1'; integers are decoded little-endian
(first bit drawn is the least significant).

Sources:

* `TapeSource` -- replays a fixed bit string; running off the end raises
  `TapeExhausted` naming the phase that overdrew and by how much.
* `SystemSource` -- OS entropy (os.urandom), unbounded.
* `CounterSource` -- deterministic SHA-256 counter stream derived from a
  master key and a stream index.  Used to give Monte-Carlo trial i its own
  reproducible tape: block j of stream (master, i) is
  SHA256(master || be64(i) || be64(j)).
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field


class TapeExhausted(RuntimeError):
    """A fixed tape ran out of bits mid-draw."""

    def __init__(self, phase: str, requested: int, available: int):
        self.phase = phase
        self.requested = requested
        self.available = available
        super().__init__(
            f"bit tape exhausted during phase {phase!r}: "
            f"requested {requested}, only {available} left"
        )


@dataclass
class BudgetReport:
    """Counted randomness consumption, total and per phase."""

    bits_drawn: int = 0
    per_phase: dict[str, int] = field(default_factory=dict)

    def add(self, phase: str, count: int) -> None:
        self.bits_drawn += count
        self.per_phase[phase] = self.per_phase.get(phase, 0) + count

    def to_json(self) -> dict:
        return {"bits_drawn": self.bits_drawn, "per_phase": dict(self.per_phase)}


class BitSource:
    """Base class: draw bits, keep the books."""

    def __init__(self):
        self.report = BudgetReport()

    def draw(self, count: int, phase: str = "default") -> str:
        if count < 0:
            raise ValueError("cannot draw a negative number of bits")
        bits = self._pull(count, phase)
        self.report.add(phase, count)
        return bits

    def _pull(self, count: int, phase: str) -> str:
        raise NotImplementedError


class TapeSource(BitSource):
    def __init__(self, bits: str):
        super().__init__()
        if bits.strip("01"):
            raise ValueError("tape must contain only '0' and '1'")
        self.bits = bits
        self.position = 0

    def _pull(self, count, phase):
        if self.position + count > len(self.bits):
            raise TapeExhausted(phase, count, len(self.bits) - self.position)
        out = self.bits[self.position : self.position + count]
        self.position += count
        return out

    @property
    def remaining(self) -> int:
        return len(self.bits) - self.position


class SystemSource(BitSource):
    def __init__(self):
        super().__init__()
        self._buffer = ""

    def _pull(self, count, phase):
        while len(self._buffer) < count:
            chunk = os.urandom(64)
            self._buffer += "".join(f"{byte:08b}"[::-1] for byte in chunk)
        out, self._buffer = self._buffer[:count], self._buffer[count:]
        return out


class CounterSource(BitSource):
    def __init__(self, master: bytes, index: int = 0):
        super().__init__()
        self.master = master
        self.index = index
        self._block = 0
        self._buffer = ""

    def _pull(self, count, phase):
        while len(self._buffer) < count:
            digest = hashlib.sha256(
                self.master + self.index.to_bytes(8, "big") + self._block.to_bytes(8, "big")
            ).digest()
            self._block += 1
            self._buffer += "".join(f"{byte:08b}"[::-1] for byte in digest)
        out, self._buffer = self._buffer[:count], self._buffer[count:]
        return out


def draw_bits(source: BitSource, count: int, phase: str = "default") -> str:
    """Free-function form of source.draw for callers passed a bare source."""
    return source.draw(count, phase)


def bits_to_int(bits: str) -> int:
    """Little-endian decode: bits[i] contributes 2**i."""
    value = 0
    for i, b in enumerate(bits):
        if b == "1":
            value |= 1 << i
    return value


def int_to_bits(value: int, width: int) -> str:
    if value < 0 or value >> width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return "".join("1" if value >> i & 1 else "0" for i in range(width))


def draw_uniform_power_of_two(source: BitSource, u: int, phase: str = "shift") -> int:
    """Uniform draw from {1, ..., u} for u a power of two.

    Consumes exactly log2(u) bits; the drawn bits decode little-endian and
    the result is decoded + 1.  u = 1 consumes nothing and returns 1.
    """
    if u < 1 or u & (u - 1):
        raise ValueError(f"u must be a power of two, got {u}")
    k = u.bit_length() - 1
    return bits_to_int(source.draw(k, phase)) + 1


def hex_to_bits(hex_string: str, nbits: int) -> str:
    """Decode a hex seed to exactly nbits bits (per-byte LSB first).

    The hex string must supply at least nbits bits; surplus bits in the
    final bytes are ignored.
    """
    data = bytes.fromhex(hex_string)
    if 8 * len(data) < nbits:
        raise ValueError(f"seed supplies {8 * len(data)} bits, need {nbits}")
    bits = "".join(f"{byte:08b}"[::-1] for byte in data)
    return bits[:nbits]


def bits_to_hex(bits: str) -> str:
    """Inverse of hex_to_bits, zero-padding the final byte."""
    padded = bits + "0" * (-len(bits) % 8)
    out = bytearray()
    for i in range(0, len(padded), 8):
        out.append(bits_to_int(padded[i : i + 8]))
    return out.hex()
