"""Deterministic output encoding so cross-side equality is well-defined.

The encoding is an equality token, not a parseable format: strings go in
raw, sequences render as "[a, b]", mappings sort by canonicalized key.
Floats use the shortest round-trip repr, so integer-valued floats keep
their ".0" and stay distinct from ints.
"""

from __future__ import annotations


class UncanonicalizableValue(TypeError):
    pass


def canonicalize(value) -> str:
    if value is None:
        return "None"
    if value is True:
        return "True"
    if value is False:
        return "False"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return value
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(canonicalize(v) for v in value) + "]"
    if isinstance(value, dict):
        entries = sorted(
            ((canonicalize(k), canonicalize(v)) for k, v in value.items()),
            key=lambda kv: kv[0],
        )
        return "{" + ", ".join(f"{k}: {v}" for k, v in entries) + "}"
    raise UncanonicalizableValue(f"cannot canonicalize {type(value).__name__}")


def canonicalize_stdout(raw: str) -> str:
    """Program-mode text: strip each line's trailing whitespace, drop the
    final newline."""
    joined = "\n".join(line.rstrip() for line in raw.split("\n"))
    if joined.endswith("\n"):
        return joined[:-1]
    return joined
