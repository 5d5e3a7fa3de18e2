import random

import pytest
from hypothesis import given, settings, strategies as st

from cobweave import oracles
from cobweave.automata import (Fsa, InputError, MonoidHom, accepts, empty_fsa, enumerate_language,
                               fsa_accepts, image, preimage, product, psa_accepts, trim,
                               universal_fsa)
from cobweave.fixtures import dyck_psa, even_length, random_fsa


def lang(m, n=8):
    return set(enumerate_language(m, n))


def test_fixture_acceptance(ab):
    assert fsa_accepts(ab, "ABAB") is True
    assert fsa_accepts(ab, "") is True
    assert fsa_accepts(ab, "ABA") is False
    for w in ("ABAB", "", "ABA", "BA", "AABB"):
        assert fsa_accepts(ab, w) == oracles.nfa_accepts(ab, w)


def test_unknown_letter_rejected(ab):
    with pytest.raises(InputError):
        fsa_accepts(ab, "AC")


def test_dyck_psa():
    m = dyck_psa()
    assert psa_accepts(m, "(())") is True
    assert psa_accepts(m, "") is True
    assert psa_accepts(m, "())(") is False
    for w in ("()()", "(()", "((()))", ")("):
        assert psa_accepts(m, w) == oracles.balanced(w)


def test_product_laws(ab):
    rng = random.Random(3)
    for _ in range(10):
        m = random_fsa(rng, 4, ("A", "B"))
        assert lang(product(m, universal_fsa(("A", "B")))) == lang(m)
        assert lang(product(m, empty_fsa(("A", "B")))) == set()
    both = product(ab, even_length())
    want = oracles.nfa_language(ab, 8) & oracles.nfa_language(even_length(), 8)
    assert lang(both) == want == oracles.nfa_language(ab, 8)


def test_preimage(ab):
    assert lang(preimage(MonoidHom.identity(("A", "B")), ab)) == lang(ab)
    c_ab = preimage(MonoidHom(("C",), ("A", "B"), {"C": ("A", "B")}), ab)
    assert lang(c_ab) == {("C",) * n for n in range(9)}
    erase = MonoidHom(("C",), ("A", "B"), {"C": ()})
    assert lang(preimage(erase, ab)) == {("C",) * n for n in range(9)}
    no_eps = Fsa(("p", "q"), ("A", "B"), {("p", "A", "q")}, "p", ("q",))
    assert lang(preimage(erase, no_eps)) == set()


def test_image(ab):
    assert lang(image(MonoidHom.identity(("A", "B")), ab)) == lang(ab)
    xyz = image(MonoidHom(("A", "B"), ("x", "y", "z"), {"A": ("x", "y"), "B": ("z",)}), ab)
    assert lang(xyz, 9) == {("x", "y", "z") * n for n in range(4)}
    bs = image(MonoidHom(("A", "B"), ("B",), {"A": (), "B": ("B",)}), ab)
    assert lang(bs) == {("B",) * n for n in range(9)}


def test_trim(ab):
    t = trim(ab)
    assert set(t.states) == set(ab.states) and t.transitions == ab.transitions
    extra = Fsa(("q0", "q1", "s"), ("A", "B"), ab.transitions, "q0", ("q0",))
    assert "s" not in trim(extra).states
    rng = random.Random(5)
    for _ in range(20):
        m = random_fsa(rng, 6, ("A", "B"), trimmed=False)
        assert lang(trim(m)) == oracles.nfa_language(m, 8)


def test_enumerate(ab):
    assert enumerate_language(ab, 4) == [(), ("A", "B"), ("A", "B", "A", "B")]
    assert enumerate_language(empty_fsa(("A",)), 4) == []
    assert enumerate_language(dyck_psa(), 4) == [(), ("(", ")"), ("(", "(", ")", ")"),
                                                  ("(", ")", "(", ")")]


def test_accepts_dispatch(ab):
    assert accepts(ab, "AB") and accepts(dyck_psa(), "()")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_machines_match_oracle(seed):
    rng = random.Random(seed)
    m = random_fsa(rng, 5, ("A", "B"), trimmed=False)
    assert lang(m, 6) == oracles.nfa_language(m, 6)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_preimage_and_image_match_definitions(seed):
    rng = random.Random(seed)
    m = random_fsa(rng, 4, ("A", "B"))
    h = MonoidHom(("C", "D"), ("A", "B"),
                  {c: tuple(rng.choice("AB") for _ in range(rng.randint(0, 2))) for c in "CD"})
    target = oracles.nfa_language(m, 8)
    pre = {u for u in oracles.nfa_language(universal_fsa(("C", "D")), 4)
           if tuple(x for c in u for x in h.images[c]) in target}
    assert lang(preimage(h, m), 4) == pre
    # g never erases, so image words of length <= 6 come from sources of length <= 6
    g = MonoidHom(("A", "B"), ("C", "D"), {"A": ("C",), "B": ("D", "C")})
    im = {tuple(x for c in u for x in g.images[c]) for u in oracles.nfa_language(m, 6)}
    assert {w for w in lang(image(g, m), 6)} == {w for w in im if len(w) <= 6}
