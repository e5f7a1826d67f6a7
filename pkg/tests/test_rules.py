import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from progen import collapse_program, flatten_program

from rewrite_rl.codemodel import VarDecl, interpret, node_at, parse, print_unit
from rewrite_rl.errors import RegistrationError, SiteMismatch, UnknownRule
from rewrite_rl.rules import (
    FLATTEN_ARRAY,
    Rule,
    RuleRegistry,
    apply_rule,
    default_registry,
    find_sites,
    format_site,
    parse_site,
    registry,
)

FILL_2D = """
void g(int out[32])
{
    int a[4][8];
    int i;
    int j;
    for (i = 0; i < 4; i++)
        for (j = 0; j < 8; j++)
            a[i][j] = 0;
    for (i = 0; i < 4; i++)
        for (j = 0; j < 8; j++)
            out[i * 8 + j] = a[i][j] + i * j;
}
"""

NEST_2x3 = """
void g(int c[6])
{
    int i;
    int j;
    for (i = 0; i < 2; i++)
        for (j = 0; j < 3; j++)
            c[i * 3 + j] = i + j;
}
"""


def test_registry_names_and_ids():
    assert [r.name for r in registry()] == ["flatten_array", "collapse_loops"]
    assert [r.id for r in registry()] == [0, 1]
    assert registry() == registry()


def test_duplicate_registration():
    reg = default_registry()
    with pytest.raises(RegistrationError):
        reg.register(Rule(0, "again", FLATTEN_ARRAY.matcher, FLATTEN_ARRAY.rewriter))


def test_registry_is_extensible_and_id_sorted():
    reg = RuleRegistry()
    reg.register(Rule(5, "noop", lambda u, s: False, lambda u, s: u))
    reg.register(FLATTEN_ARRAY)
    assert reg.ids() == [0, 5]
    with pytest.raises(UnknownRule):
        reg.get(1)


def test_unknown_rule():
    with pytest.raises(UnknownRule):
        find_sites(parse("void f() {}"), 7)


def test_flatten_sites_on_convolution(conv_unit):
    sites = find_sites(conv_unit, 0)
    assert len(sites) == 3
    names = [node_at(conv_unit, s).name for s in sites]
    assert names == ["input_image", "kernel", "output_image"]
    assert sites == sorted(sites)


def test_flatten_no_sites_on_1d():
    assert find_sites(parse("void f(int v[8]) { int w[3]; w[0] = v[1]; }"), 0) == []


def test_flatten_blocked_by_whole_array_call():
    unit = parse("void f(int m[2][2]) { m[0][0] = 1; update(m); }")
    assert find_sites(unit, 0) == []


def test_collapse_single_site():
    unit = parse(NEST_2x3)
    assert len(find_sites(unit, 1)) == 1


@pytest.mark.parametrize(
    "src",
    [
        # not perfect
        "void g(int c[6]) { int i; int j; for (i = 0; i < 2; i++) { c[i] = 0; for (j = 0; j < 3; j++) c[j] = 1; } }",
        # non-unit step
        "void g(int c[6]) { int i; int j; for (i = 0; i < 2; i++) for (j = 0; j < 3; j += 2) c[j] = 1; }",
        # dynamic limit
        "void g(int c[6], int n) { int i; int j; for (i = 0; i < n; i++) for (j = 0; j < 3; j++) c[j] = 1; }",
        # break in the nest
        "void g(int c[6]) { int i; int j; for (i = 0; i < 2; i++) for (j = 0; j < 3; j++) { if (j) break; c[j] = 1; } }",
        # inner variable read after the nest
        "void g(int c[6]) { int i; int j; for (i = 0; i < 2; i++) for (j = 0; j < 3; j++) c[j] = 1; c[0] = j; }",
    ],
)
def test_collapse_preconditions(src):
    assert find_sites(parse(src), 1) == []


def test_flatten_example_text_and_equivalence():
    unit = parse(FILL_2D)
    res = apply_rule(unit, 0, find_sites(unit, 0)[0])
    text = print_unit(res.unit)
    assert "int a[32];" in text
    assert "a[i * 8 + j] = 0;" in text
    decl = node_at(res.unit, res.site)
    assert isinstance(decl, VarDecl) and len(decl.dims) == 1
    inputs = {"out": [0] * 32}
    assert interpret(unit, "g", inputs) == interpret(res.unit, "g", inputs)


def test_collapse_example():
    unit = parse(NEST_2x3)
    new = apply_rule(unit, 1, find_sites(unit, 1)[0]).unit
    text = print_unit(new)
    assert "for (__k0 = 0; __k0 < 6; __k0++)" in text
    assert "int i = __k0 / 3;" in text and "int j = __k0 % 3;" in text
    assert text.count("for (") == 1
    assert interpret(new, "g", {"c": [0] * 6}) == {"c": [0, 1, 2, 1, 2, 3]}


def test_fresh_name_avoids_collisions():
    src = NEST_2x3.replace("int j;", "int j;\n    int __k0;")
    unit = parse(src)
    text = print_unit(apply_rule(unit, 1, find_sites(unit, 1)[0]).unit)
    assert "__k1" in text


def test_consumed_match(conv_unit):
    res = apply_rule(conv_unit, 0, find_sites(conv_unit, 0)[0])
    assert len(find_sites(res.unit, 0)) == 2
    assert res.unit != conv_unit


def test_site_mismatch(conv_unit):
    site = find_sites(conv_unit, 0)[0]
    after = apply_rule(conv_unit, 0, site).unit
    with pytest.raises(SiteMismatch):
        apply_rule(after, 0, site)
    with pytest.raises(SiteMismatch):
        apply_rule(conv_unit, 1, site)


def test_site_format_round_trip():
    assert format_site((5, 3, 4)) == "5.3.4"
    assert parse_site("5.3.4") == (5, 3, 4)
    with pytest.raises(ValueError):
        parse_site("5..3")


def test_convolution_rewrite_chain_is_sound(conv_unit):
    rng = random.Random(3)
    inputs = {
        "input_image": [rng.randint(-50, 50) for _ in range(256)],
        "kernel": [rng.randint(-4, 4) for _ in range(9)],
        "output_image": [0] * 196,
    }
    expected = interpret(conv_unit, "convolution", inputs)
    unit = conv_unit
    for rid in (0, 0, 0, 1):
        unit = apply_rule(unit, rid, find_sites(unit, rid)[0]).unit
        assert interpret(unit, "convolution", inputs) == expected


def _all_sites_sound(src, inputs, rule):
    unit = parse(src)
    sites = find_sites(unit, rule)
    assert sites
    expected = interpret(unit, "kernel", inputs)
    for site in sites:
        assert interpret(apply_rule(unit, rule, site).unit, "kernel", inputs) == expected


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**9))
def test_flatten_soundness_property(seed):
    _all_sites_sound(*flatten_program(seed), 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**9))
def test_collapse_soundness_property(seed):
    _all_sites_sound(*collapse_program(seed), 1)
