import random

from cobweave import oracles
from cobweave.automata import MonoidHom, empty_fsa, enumerate_language, universal_fsa
from cobweave.fixtures import c_to_ab, dyck_psa, even_length, random_fsa, random_transducer
from cobweave.transducers import Transducer, apply, compose, transduce_word


def lang(m, n=8):
    return set(enumerate_language(m, n))


def test_transduce_word():
    assert transduce_word(Transducer.identity(("A", "B")), "AB", 4) == {("A", "B")}
    assert transduce_word(c_to_ab(), "ABAB", 4) == {("x", "x")}
    t = c_to_ab()
    dead = Transducer(t.alpha, t.beta, empty_fsa(("C",)))
    assert transduce_word(dead, "ABAB", 4) == set()


def test_apply_fixture(ab):
    assert lang(apply(Transducer.identity(("A", "B")), ab)) == lang(ab)
    assert lang(apply(c_to_ab(), ab)) == {("x",) * n for n in range(9)}
    assert lang(apply(c_to_ab(), ab)) == oracles.transduction(c_to_ab(), ab, 8)
    assert lang(apply(c_to_ab(), empty_fsa(("A", "B")))) == set()


def test_apply_to_pushdown():
    # ( -> [ and ) -> ] keeps balance
    alpha = MonoidHom(("[", "]"), ("(", ")"), {"[": ("(",), "]": (")",)})
    t = Transducer(alpha, MonoidHom.identity(("[", "]")), universal_fsa(("[", "]")))
    got = lang(apply(t, dyck_psa()), 6)
    assert got == oracles.balanced_words(6, "[", "]")


def test_compose_identity(ab):
    ident = Transducer.identity(("A", "B"))
    for m in (ab, even_length(), universal_fsa(("A", "B"))):
        assert lang(apply(compose(ident, ident), m)) == lang(m)


def test_compose_matches_sequential():
    rng = random.Random(11)
    for _ in range(10):
        m = random_fsa(rng, 3, ("A", "B"))
        t1 = random_transducer(rng, ("A", "B"), ("x", "y"))
        t2 = random_transducer(rng, ("x", "y"), ("A", "B"))
        t3 = random_transducer(rng, ("A", "B"), ("u",))
        assert lang(apply(compose(t2, t1), m), 6) == lang(apply(t2, apply(t1, m)), 6)
        assert (lang(apply(compose(compose(t3, t2), t1), m), 6)
                == lang(apply(compose(t3, compose(t2, t1)), m), 6))


def test_apply_random_against_word_oracle():
    rng = random.Random(2)
    for _ in range(15):
        m = random_fsa(rng, 4, ("A", "B"))
        t = random_transducer(rng, ("A", "B"), ("x", "y"))
        assert lang(apply(t, m), 7) == oracles.transduction(t, m, 7)
