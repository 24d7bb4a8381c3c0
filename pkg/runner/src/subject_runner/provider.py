"""Fuzzed-data provider: turns one byte buffer into typed values.

Independent implementation of the shared provider contract; it must
reproduce the golden conformance vectors byte-exactly. Every consumer
reads from the front of the remaining buffer, missing trailing bytes
count as zero, and a fully exhausted buffer yields each primitive's
minimum (lo, False, 0.0, "", []).

Camel-case aliases (ConsumeIntInRange, ...) are provided because
binding programs are commonly written against that fuzzer-style API.
"""

from __future__ import annotations


class ProviderRangeError(ValueError):
    pass


class FuzzedDataProvider:
    def __init__(self, data: bytes):
        self._data = bytes(data)
        self._pos = 0

    def remaining(self) -> bytes:
        return self._data[self._pos:]

    def _take(self, count: int) -> bytes:
        chunk = self._data[self._pos : self._pos + count]
        self._pos += len(chunk)
        return chunk

    def consume_int_in_range(self, lo: int, hi: int) -> int:
        if lo > hi:
            raise ProviderRangeError(f"lo={lo} > hi={hi}")
        span = hi - lo + 1
        width = 0
        cover = 1
        while cover < span:
            cover <<= 8
            width += 1
        chunk = self._take(width)
        unsigned = int.from_bytes(chunk, "big") << (8 * (width - len(chunk)))
        return lo + (unsigned % span)

    def consume_bool(self) -> bool:
        chunk = self._take(1)
        return bool(chunk[0] & 1) if chunk else False

    def consume_probability(self) -> float:
        chunk = self._take(4)
        unsigned = int.from_bytes(chunk, "big") << (8 * (4 - len(chunk)))
        return unsigned / 2**32

    def consume_ascii_string(self, max_len: int) -> str:
        if max_len < 0:
            raise ProviderRangeError(f"max_len={max_len} < 0")
        head = self._take(1)
        if not head:
            return ""
        wanted = head[0] % (max_len + 1)
        chunk = self._take(wanted)
        return "".join(chr(0x20 + b % 95) for b in chunk)

    def consume_int_list(self, count: int, lo: int, hi: int) -> list[int]:
        if lo > hi:
            raise ProviderRangeError(f"lo={lo} > hi={hi}")
        if count < 0:
            raise ProviderRangeError(f"count={count} < 0")
        if self._pos >= len(self._data):
            return []
        return [self.consume_int_in_range(lo, hi) for _ in range(count)]

    # fuzzer-style aliases used by binding programs
    ConsumeIntInRange = consume_int_in_range
    ConsumeBool = consume_bool
    ConsumeProbability = consume_probability
    ConsumeAsciiString = consume_ascii_string
    ConsumeIntList = consume_int_list
