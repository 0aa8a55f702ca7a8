"""The compiled and pure expansion kernels must agree call for call, and both
must agree with the reference one-step semantics."""

import random

import pytest

import igkit._expand_py as pure
from igkit import fixture_text, kernel
from igkit.engine import Budget, CompiledGrammar, enumerate_language
from igkit.grammar import parse_grammar, successors

try:
    import igkit._speedups as compiled
except ImportError:
    compiled = None


def build(name="twin.ig"):
    g = parse_grammar(fixture_text(name))
    return g, CompiledGrammar(g)


def random_forms(g, c, rng, count=60):
    forms = [c.start()]
    pool = [c.start()]
    for _ in range(count):
        base = rng.choice(pool)
        succ = c.expand(base, Budget(max_steps=1), max_terms=30)
        if succ:
            nxt = rng.choice(succ)[2]
            pool.append(nxt)
            forms.append(nxt)
    return forms


def call(impl, c, form, **kw):
    args = dict(max_width=-1, max_stack=-1, max_terms=-1, drop_terminals=0)
    args.update(kw)
    return impl.expand(
        form, c.by_var, c.prods, c.nv,
        c.pool_top, c.pool_rest, c.pool_depth, c.intern,
        args["max_width"], args["max_stack"], args["max_terms"],
        args["drop_terminals"],
    )


@pytest.mark.skipif(compiled is None, reason="compiled kernel not built")
@pytest.mark.parametrize("fixture", ["twin.ig", "ramp.ig", "anbncn.ig"])
def test_kernels_agree_on_random_forms(fixture):
    g, c = build(fixture)
    rng = random.Random(7)
    for form in random_forms(g, c, rng):
        for kw in (
            {},
            {"max_width": 3},
            {"max_stack": 2},
            {"max_terms": 4},
            {"drop_terminals": 1},
        ):
            assert call(pure, c, form, **kw) == call(compiled, c, form, **kw)


def test_kernel_matches_reference_semantics():
    g, c = build("ramp.ig")
    rng = random.Random(3)
    for form in random_forms(g, c, rng, count=30):
        got = [
            (pos, pid, c.decode_form(f2))
            for pos, pid, f2 in call(kernel, c, form)
        ]
        decoded = c.decode_form(form)
        want = [
            (pos, g.productions.index(p), out) for pos, p, out in successors(g, decoded)
        ]
        assert got == want


@pytest.mark.skipif(compiled is None, reason="compiled kernel not built")
def test_enumeration_identical_across_kernels(monkeypatch):
    g = parse_grammar(fixture_text("twin.ig"))
    budget = Budget(max_steps=60, max_stack=3)
    monkeypatch.setattr(kernel, "expand", pure.expand)
    a = enumerate_language(g, 14, budget)
    monkeypatch.setattr(kernel, "expand", compiled.expand)
    b = enumerate_language(g, 14, budget)
    assert a.words == b.words
    assert a.forms_seen == b.forms_seen
