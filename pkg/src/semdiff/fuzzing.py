"""Byte-buffer generation and the reference data-provider semantics.

The provider primitives are frozen here bit-exactly so scores are
reproducible: each primitive is a pure function of (buffer, args) ->
(value, remaining buffer), and an exhausted buffer yields the primitive's
minimum. The live runner reimplements the same rules independently; both
sides are checked against the golden vector file in ``data/``.

Vector file line format:
    <hex buffer> <primitive> <args...> -> <json value> <hex rest>
where an empty buffer is written as ``-`` and args are space-separated
decimal integers.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from semdiff.errors import InvalidRange, SchemaError

MASK64 = (1 << 64) - 1

DEFAULT_MIN_LEN = 16
DEFAULT_MAX_LEN = 4096
N_INPUTS_FUNCTION = 2000
N_INPUTS_PROGRAM = 1000


def splitmix64(x: int) -> int:
    """One splitmix64 step; the toolkit's only seed-derivation primitive."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def derive_seed(seed: int, *parts: int | str) -> int:
    """Derive an independent child seed from a run seed and mix-in parts.

    Strings are folded through their UTF-8 bytes so the derivation is
    stable across platforms and interpreter runs.
    """
    state = splitmix64(seed & MASK64)
    for part in parts:
        if isinstance(part, str):
            folded = 0
            for chunk in part.encode("utf-8"):
                folded = splitmix64(folded ^ chunk)
            part = folded
        state = splitmix64(state ^ (part & MASK64))
    return state


@dataclass(frozen=True)
class FuzzPlan:
    """How many buffers to generate and how."""

    seed: int
    n_inputs: int = N_INPUTS_FUNCTION
    min_len: int = DEFAULT_MIN_LEN
    max_len: int = DEFAULT_MAX_LEN
    corpus_fraction: float = 0.5

    def __post_init__(self):
        if self.n_inputs < 1:
            raise ValueError("n_inputs must be >= 1")
        if not 0 <= self.min_len <= self.max_len:
            raise ValueError("need 0 <= min_len <= max_len")
        if not 0.0 <= self.corpus_fraction <= 1.0:
            raise ValueError("corpus_fraction must be in [0,1]")


def mutate_buffer(
    buf: bytes, rng: random.Random, min_len: int = DEFAULT_MIN_LEN, max_len: int = DEFAULT_MAX_LEN
) -> bytes:
    """Apply 1-4 standard byte-level mutations, clamped to [min,max] length."""
    out = bytearray(buf)
    for _ in range(rng.randint(1, 4)):
        op = rng.randrange(6)
        if op == 0 and out:  # bit flip
            i = rng.randrange(len(out))
            out[i] ^= 1 << rng.randrange(8)
        elif op == 1 and out:  # byte overwrite
            out[rng.randrange(len(out))] = rng.randrange(256)
        elif op == 2:  # block insert
            i = rng.randint(0, len(out))
            block = rng.randbytes(rng.randint(1, 8))
            out[i:i] = block
        elif op == 3 and out:  # block delete
            i = rng.randrange(len(out))
            j = min(len(out), i + rng.randint(1, 8))
            del out[i:j]
        elif op == 4 and out:  # block duplicate
            i = rng.randrange(len(out))
            j = min(len(out), i + rng.randint(1, 8))
            out[j:j] = out[i:j]
        elif op == 5:  # truncate or extend
            target = rng.randint(min_len, max_len)
            if target < len(out):
                del out[target:]
            else:
                out.extend(rng.randbytes(target - len(out)))
    if not out:
        out.extend(rng.randbytes(max(1, min_len)))
    if len(out) > max_len:
        del out[max_len:]
    if len(out) < min_len:
        out.extend(rng.randbytes(min_len - len(out)))
    return bytes(out)


def generate_buffers(plan: FuzzPlan) -> list[bytes]:
    """Deterministic buffer list; a corpus_fraction share mutates earlier
    buffers in the same run, the rest are drawn fresh from the seeded rng."""
    rng = random.Random(plan.seed)
    buffers: list[bytes] = []
    for j in range(plan.n_inputs):
        if j > 0 and rng.random() < plan.corpus_fraction:
            parent = buffers[rng.randrange(j)]
            buffers.append(mutate_buffer(parent, rng, plan.min_len, plan.max_len))
        else:
            length = rng.randint(plan.min_len, plan.max_len)
            buffers.append(rng.randbytes(length))
    return buffers


# --- reference provider primitives ----------------------------------------

def consume_int_in_range(buf: bytes, lo: int, hi: int) -> tuple[int, bytes]:
    """Read the fewest bytes whose unsigned big-endian span covers the range.

    Missing trailing bytes count as zero; an exhausted buffer yields lo.
    """
    if lo > hi:
        raise InvalidRange(f"lo={lo} > hi={hi}")
    span = hi - lo + 1
    k = 0
    cover = 1
    while cover < span:
        cover <<= 8
        k += 1
    raw = buf[:k]
    u = int.from_bytes(raw + b"\x00" * (k - len(raw)), "big")
    return lo + (u % span), buf[len(raw):]


def consume_bool(buf: bytes) -> tuple[bool, bytes]:
    """Low bit of one byte; exhausted buffer yields False."""
    if not buf:
        return False, buf
    return bool(buf[0] & 1), buf[1:]


def consume_probability(buf: bytes) -> tuple[float, bytes]:
    """Four bytes big-endian / 2**32; missing trailing bytes count as zero."""
    raw = buf[:4]
    u = int.from_bytes(raw + b"\x00" * (4 - len(raw)), "big")
    return u / 2**32, buf[len(raw):]


def consume_ascii_string(buf: bytes, max_len: int) -> tuple[str, bytes]:
    """One length byte mod (max_len+1), then that many bytes masked to
    printable ASCII 0x20-0x7E; a short buffer yields a shorter string."""
    if max_len < 0:
        raise InvalidRange(f"max_len={max_len} < 0")
    if not buf:
        return "", buf
    n = buf[0] % (max_len + 1)
    raw = buf[1 : 1 + n]
    value = "".join(chr(0x20 + b % 95) for b in raw)
    return value, buf[1 + len(raw):]


def consume_int_list(buf: bytes, count: int, lo: int, hi: int) -> tuple[list[int], bytes]:
    """``count`` sequential consume_int_in_range reads; an exhausted buffer
    at entry yields the empty list."""
    if lo > hi:
        raise InvalidRange(f"lo={lo} > hi={hi}")
    if count < 0:
        raise InvalidRange(f"count={count} < 0")
    if not buf:
        return [], buf
    values = []
    for _ in range(count):
        value, buf = consume_int_in_range(buf, lo, hi)
        values.append(value)
    return values, buf


REFERENCE_PRIMITIVES = {
    "int_in_range": consume_int_in_range,
    "bool": consume_bool,
    "probability": consume_probability,
    "ascii_string": consume_ascii_string,
    "int_list": consume_int_list,
}


# --- conformance vectors ---------------------------------------------------

def _hex(buf: bytes) -> str:
    return buf.hex() if buf else "-"


def _unhex(text: str) -> bytes:
    return b"" if text == "-" else bytes.fromhex(text)


def format_vector(buf: bytes, primitive: str, args: tuple, value, rest: bytes) -> str:
    arg_text = " ".join(str(a) for a in args)
    head = f"{_hex(buf)} {primitive}" + (f" {arg_text}" if arg_text else "")
    return f"{head} -> {json.dumps(value)} {_hex(rest)}"


def parse_vector(line: str) -> tuple[bytes, str, tuple[int, ...], object, bytes]:
    left, _, right = line.partition(" -> ")
    if not right:
        raise SchemaError(f"vector line missing '->': {line!r}")
    parts = left.split()
    buf = _unhex(parts[0])
    primitive = parts[1]
    args = tuple(int(a) for a in parts[2:])
    value_text, _, rest_text = right.rpartition(" ")
    return buf, primitive, args, json.loads(value_text), _unhex(rest_text)


def load_vectors(path: str | Path) -> list[tuple[bytes, str, tuple[int, ...], object, bytes]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [parse_vector(line) for line in lines if line.strip() and not line.startswith("#")]


def check_vectors(
    vectors: Iterable[tuple[bytes, str, tuple[int, ...], object, bytes]],
    primitives: dict | None = None,
) -> list[str]:
    """Run each vector through the given primitive table; returns a list of
    mismatch descriptions (empty means byte-exact conformance)."""
    table = REFERENCE_PRIMITIVES if primitives is None else primitives
    failures = []
    for buf, name, args, want_value, want_rest in vectors:
        got_value, got_rest = table[name](buf, *args)
        if json.dumps(got_value) != json.dumps(want_value) or got_rest != want_rest:
            failures.append(
                f"{name}{args} on {_hex(buf)}: got ({got_value!r}, {_hex(got_rest)}), "
                f"want ({want_value!r}, {_hex(want_rest)})"
            )
    return failures


def default_vectors_path() -> Path:
    return Path(__file__).parent / "data" / "provider_vectors.txt"
