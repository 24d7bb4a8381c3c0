import ast

import pytest

from semdiff.errors import ParseError, StaleSiteError
from semdiff.mutation import apply_mutation, enumerate_sites, generate_mutants

FIG1_A = (
    "def is_palindrome(text: str) -> bool:\n"
    "    for i in range(len(text)):\n"
    "        if text[i] != text[len(text) - 1 - i]:\n"
    "            return False\n"
    "    return True\n"
)
FIG1_B = FIG1_A.replace("!=", "==")


def fragments(code, operator=None):
    sites = enumerate_sites(code)
    if operator:
        sites = [s for s in sites if s.operator == operator]
    return [(s.operator, s.original_fragment, s.replacement_fragment) for s in sites]


def test_binop_site_enumeration():
    got = fragments("a + b")
    assert ("AOR", "+", "-") in got
    assert ("AOR", "+", "*") in got
    assert ("AOD", "a + b", "a") in got


def test_no_sites_on_plain_name():
    assert enumerate_sites("value\n", operators={"AOR", "ROR", "LOR", "ZIL", "CRP", "BCR", "SIR"}) == []


def test_ror_site_produces_fig1_mutant():
    sites = [
        s
        for s in enumerate_sites(FIG1_A)
        if s.operator == "ROR" and s.original_fragment == "!="
    ]
    assert len(sites) == 1
    assert apply_mutation(FIG1_A, sites[0]) == FIG1_B


def test_aod_unary_deletion():
    code = "def f(x):\n    return -x\n"
    sites = [s for s in enumerate_sites(code) if s.operator == "AOD"]
    assert len(sites) == 1
    assert apply_mutation(code, sites[0]) == "def f(x):\n    return x\n"


def test_zil_loop_never_iterates():
    code = "def f(xs):\n    hits = []\n    for x in xs:\n        hits.append(x)\n    return hits\n"
    sites = [s for s in enumerate_sites(code) if s.operator == "ZIL"]
    assert len(sites) == 1
    mutated = apply_mutation(code, sites[0])
    namespace = {}
    exec(mutated, namespace)  # noqa: S102
    assert namespace["f"]([1, 2, 3]) == []
    original = {}
    exec(code, original)  # noqa: S102
    assert original["f"]([1, 2, 3]) == [1, 2, 3]


def test_crp_constant_rules():
    records = generate_mutants("x = 1\n", 10, operators={"CRP"})
    assert [v.variant_code for v in records] == ["x = 2\n"]
    records = generate_mutants('name = "bob"\n', 10, operators={"CRP"})
    assert [v.variant_code for v in records] == ['name = ""\n']
    records = generate_mutants("flag = True\n", 10, operators={"CRP"})
    assert [v.variant_code for v in records] == ["flag = False\n"]


def test_crp_skips_fstring_internals():
    code = 's = f"v={x!r} end"\n'
    sites = [s for s in enumerate_sites(code) if s.operator == "CRP"]
    assert sites == []


def test_bcr_swap():
    code = "for i in xs:\n    if i:\n        break\n"
    sites = [s for s in enumerate_sites(code) if s.operator == "BCR"]
    assert len(sites) == 1
    assert "continue" in apply_mutation(code, sites[0])


def test_exs_skips_lone_return():
    code = "def f(x):\n    return x\n"
    assert [s for s in enumerate_sites(code) if s.operator == "EXS"] == []
    code = "def f(x):\n    y = x + 1\n    return y\n"
    cases = [s for s in enumerate_sites(code) if s.operator == "EXS"]
    assert {s.original_fragment for s in cases} == {"y = x + 1", "return y"}


def test_sir_variants():
    code = "def f(a, n):\n    return a[1:n]\n"
    sites = [s for s in enumerate_sites(code) if s.operator == "SIR"]
    texts = sorted(apply_mutation(code, s) for s in sites)
    assert texts == [
        "def f(a, n):\n    return a[1:]\n",
        "def f(a, n):\n    return a[:n]\n",
    ]


def test_lor_swap():
    code = "ok = a and b\n"
    sites = [s for s in enumerate_sites(code) if s.operator == "LOR"]
    assert len(sites) == 1
    assert apply_mutation(code, sites[0]) == "ok = a or b\n"


def test_cod_not_deletion():
    code = "ok = not flag\n"
    sites = [s for s in enumerate_sites(code) if s.operator == "COD"]
    assert apply_mutation(code, sites[0]) == "ok = flag\n"


def test_enumeration_deterministic_order():
    first = enumerate_sites(FIG1_A)
    second = enumerate_sites(FIG1_A)
    assert first == second
    starts = [s.start for s in first]
    assert starts == sorted(starts)


def test_parse_error_on_bad_code():
    with pytest.raises(ParseError):
        enumerate_sites("def f(:")


def test_stale_site_detected():
    sites = enumerate_sites("a + b")
    with pytest.raises(StaleSiteError):
        apply_mutation("c * d", sites[0])


def test_generate_mutants_contract():
    mutants = generate_mutants(FIG1_A, 100)
    assert mutants, "expected at least one mutant"
    texts = [v.variant_code for v in mutants]
    assert len(set(texts)) == len(texts)
    for v in mutants:
        assert v.parses_ok
        assert v.variant_code != FIG1_A
        ast.parse(v.variant_code)
        assert v.provenance["operator"] in {
            "AOR", "AOD", "ROR", "COD", "LOR", "ZIL", "CRP", "BCR", "EXS", "SIR"
        }
    assert FIG1_B in texts
    ror = [v for v in mutants if v.variant_code == FIG1_B]
    assert ror[0].provenance["operator"] == "ROR"


def test_generate_mutants_truncation_and_determinism():
    assert len(generate_mutants(FIG1_A, 1)) == 1
    assert generate_mutants(FIG1_A, 50) == generate_mutants(FIG1_A, 50)


def test_mutants_differ_at_single_site():
    import difflib

    for v in generate_mutants(FIG1_A, 100):
        blocks = [
            b
            for b in difflib.SequenceMatcher(
                None, FIG1_A, v.variant_code
            ).get_opcodes()
            if b[0] != "equal"
        ]
        assert len(blocks) == 1


def test_operator_subset_respected():
    for v in generate_mutants(FIG1_A, 100, operators={"ROR"}):
        assert v.provenance["operator"] == "ROR"
    with pytest.raises(ValueError):
        generate_mutants(FIG1_A, 5, operators={"XXX"})
