"""Regenerate the provider conformance golden file.

The file freezes the byte-level provider contract shared by the fuzz
engine and the live runner; regenerate only when the contract itself is
deliberately revised, and review the diff line by line.
"""

import random
import sys
from pathlib import Path

from semdiff import fuzzing


def vectors():
    out = []

    def add(buf: bytes, primitive: str, *args):
        value, rest = fuzzing.REFERENCE_PRIMITIVES[primitive](buf, *args)
        out.append(fuzzing.format_vector(buf, primitive, args, value, rest))

    # int_in_range: documented examples, exhaustion, zero-width, partial reads
    add(b"\x00", "int_in_range", 1, 6)
    add(b"\x07", "int_in_range", 1, 6)
    add(b"", "int_in_range", 5, 9)
    add(b"\xff", "int_in_range", 0, 255)
    add(b"\xff\x01", "int_in_range", 0, 255)
    add(b"\x01\x00", "int_in_range", 0, 65535)
    add(b"\xff", "int_in_range", 0, 65535)  # partial read pads trailing zeros
    add(b"", "int_in_range", 0, 0)
    add(b"\xaa\xbb", "int_in_range", 7, 7)  # zero-width range consumes nothing
    add(b"\x15", "int_in_range", -10, 10)
    add(b"\x0f\x42\x40", "int_in_range", 1, 10**6)
    add(b"\x00\x00\x00", "int_in_range", 1, 10**6)

    # bool
    add(b"", "bool")
    add(b"\x00", "bool")
    add(b"\x01", "bool")
    add(b"\xfe\x99", "bool")
    add(b"\xff\x99", "bool")

    # probability
    add(b"", "probability")
    add(b"\x80\x00\x00\x00", "probability")
    add(b"\xff\xff\xff\xff", "probability")
    add(b"\x80", "probability")  # partial read pads trailing zeros
    add(b"\x01\x02\x03\x04\x05", "probability")

    # ascii_string
    add(b"", "ascii_string", 5)
    add(b"\x00\x41", "ascii_string", 5)
    add(b"\x03abcxyz", "ascii_string", 10)
    add(b"\x0a1234", "ascii_string", 20)  # truncated by exhaustion
    add(b"\x41\x42", "ascii_string", 0)
    add(b"\xff" + bytes(range(8)), "ascii_string", 4)

    # int_list
    add(b"", "int_list", 3, 0, 255)
    add(b"\x01", "int_list", 3, 0, 255)  # exhaustion mid-list yields lo
    add(b"\x05\x06\x07", "int_list", 3, 0, 255)
    add(b"\x99\x98", "int_list", 0, 1, 9)
    add(b"\x10\x20\x30\x40", "int_list", 2, -5, 5)

    # randomized coverage, fixed seed
    rng = random.Random(0xC0FFEE)
    for _ in range(12):
        buf = rng.randbytes(rng.randint(0, 10))
        lo = rng.randint(-50, 50)
        hi = lo + rng.randint(0, 5000)
        add(buf, "int_in_range", lo, hi)
    for _ in range(6):
        add(rng.randbytes(rng.randint(0, 6)), "probability")
    for _ in range(8):
        add(rng.randbytes(rng.randint(0, 12)), "ascii_string", rng.randint(0, 12))
    for _ in range(6):
        lo = rng.randint(-9, 9)
        add(rng.randbytes(rng.randint(0, 8)), "int_list", rng.randint(0, 4), lo, lo + rng.randint(0, 99))
    for _ in range(4):
        add(rng.randbytes(rng.randint(0, 2)), "bool")

    return out


def main() -> int:
    path = Path(sys.argv[1]) if len(sys.argv) > 1 else fuzzing.default_vectors_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = vectors()
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} vectors to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
