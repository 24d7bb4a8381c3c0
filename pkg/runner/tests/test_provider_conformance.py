"""The live provider must reproduce the shared golden vectors byte-exactly.

The vector file is parsed here independently (format: ``<hex buffer>
<primitive> <args...> -> <json value> <hex rest>``; ``-`` is the empty
buffer) so this package never leans on the other side's parser.
"""

import json

import pytest

from subject_runner.provider import FuzzedDataProvider, ProviderRangeError


def parse_line(line):
    left, sep, right = line.partition(" -> ")
    assert sep, f"bad vector line: {line!r}"
    fields = left.split()
    buf = b"" if fields[0] == "-" else bytes.fromhex(fields[0])
    primitive = fields[1]
    args = tuple(int(a) for a in fields[2:])
    value_json, _, rest_hex = right.rpartition(" ")
    rest = b"" if rest_hex == "-" else bytes.fromhex(rest_hex)
    return buf, primitive, args, value_json, rest


def run_primitive(provider, primitive, args):
    method = {
        "int_in_range": provider.consume_int_in_range,
        "bool": provider.consume_bool,
        "probability": provider.consume_probability,
        "ascii_string": provider.consume_ascii_string,
        "int_list": provider.consume_int_list,
    }[primitive]
    return method(*args)


def test_golden_vectors_byte_exact(vectors_path):
    lines = [
        line
        for line in vectors_path.read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    ]
    assert len(lines) >= 50
    for line in lines:
        buf, primitive, args, value_json, rest = parse_line(line)
        provider = FuzzedDataProvider(buf)
        value = run_primitive(provider, primitive, args)
        assert json.dumps(value) == value_json, line
        assert provider.remaining() == rest, line


def test_minimums_on_exhausted_buffer():
    provider = FuzzedDataProvider(b"")
    assert provider.consume_int_in_range(5, 9) == 5
    assert provider.consume_bool() is False
    assert provider.consume_probability() == 0.0
    assert provider.consume_ascii_string(8) == ""
    assert provider.consume_int_list(3, 1, 4) == []


def test_camelcase_aliases_match():
    assert FuzzedDataProvider(b"\x07").ConsumeIntInRange(1, 6) == 2
    assert FuzzedDataProvider(b"\x07").consume_int_in_range(1, 6) == 2
    assert FuzzedDataProvider(b"\x01").ConsumeBool() is True


def test_invalid_ranges():
    with pytest.raises(ProviderRangeError):
        FuzzedDataProvider(b"\x00").consume_int_in_range(2, 1)
    with pytest.raises(ProviderRangeError):
        FuzzedDataProvider(b"\x00").consume_ascii_string(-1)
    with pytest.raises(ProviderRangeError):
        FuzzedDataProvider(b"\x00").consume_int_list(-1, 0, 1)


def test_sequential_reads_advance_cursor():
    provider = FuzzedDataProvider(bytes([0x00, 0x07, 0x01]))
    assert provider.consume_int_in_range(1, 6) == 1
    assert provider.consume_int_in_range(1, 6) == 2
    assert provider.consume_bool() is True
    assert provider.remaining() == b""
