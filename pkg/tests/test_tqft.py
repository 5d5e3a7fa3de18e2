import itertools
import random

import numpy as np
from hypothesis import given, settings, strategies as st

from cobweave import oracles
from cobweave.automata import Fsa, MonoidHom, fsa_accepts, universal_fsa
from cobweave.boolsemi import BoolMat, bmat_mul
from cobweave.cobordism import (MINUS, PLUS, Cap, Cup, Defect, HalfEnd, HalfStart, compose,
                                floating_line, snake, tensor)
from cobweave.fixtures import ab_fixture, c_to_ab, even_length, random_fsa
from cobweave.tqft import (SemiSpan, TqftFunctor, check_naturality, defect_operator,
                           modified_pullback, span_compose, span_identity, span_of_map,
                           spans_equivalent)
from cobweave.transducers import Transducer


def reach(m, w):
    """|w|-step reachability as a column-source matrix, by path enumeration."""
    idx = {q: i for i, q in enumerate(m.states)}
    out = np.zeros((len(m.states), len(m.states)), dtype=bool)
    for q in m.states:
        for p in m.states:
            mm = Fsa(m.states, m.alphabet, m.transitions, q, (p,))
            out[idx[p], idx[q]] = oracles.nfa_accepts(mm, w)
    return BoolMat(out)


def test_letter_operator(ab):
    f = TqftFunctor(ab)
    assert f.letter_operator("A").tolist() == [[0, 0], [1, 0]]
    lonely = Fsa(("q",), ("A", "B"), {("q", "A", "q")}, "q", ("q",))
    assert TqftFunctor(lonely).letter_operator("B").is_zero()
    assert defect_operator(f, "B") == f.letter_operator("B")


def test_word_operators_match_reachability():
    rng = random.Random(4)
    for m in [ab_fixture(), even_length()] + [random_fsa(rng, 4, ("A", "B")) for _ in range(5)]:
        f = TqftFunctor(m)
        for n in range(7):
            for w in itertools.product(m.alphabet, repeat=n):
                assert f.word_operator(w) == reach(m, w)


def test_eval_fixture(ab):
    f = TqftFunctor(ab)
    assert f.eval(floating_line("ABAB")).tolist() == [[1]]
    assert f.eval(floating_line("ABA")).tolist() == [[0]]
    assert f.eval(snake(PLUS)) == BoolMat.identity(2)
    assert f.eval(snake(MINUS)) == BoolMat.identity(2)


def test_circle_counts_nothing_but_truth(ab):
    # a closed loop over a nonzero space evaluates to 1 in the Boolean semiring
    f = TqftFunctor(ab)
    assert f.eval(compose(Cup(), Cap())).tolist() == [[1]]


def test_tensor_evaluates_to_kron(ab):
    f = TqftFunctor(ab)
    d = tensor(Defect(PLUS, "A"), Defect(PLUS, "B"))
    want = np.kron(f.letter_operator("A").array, f.letter_operator("B").array)
    assert f.eval(d) == BoolMat(want)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.lists(st.sampled_from("AB"), max_size=8))
def test_path_integral_law(seed, w):
    m = random_fsa(random.Random(seed), 5, ("A", "B"))
    got = bool(TqftFunctor(m).eval(floating_line(w))[0, 0])
    assert got == fsa_accepts(m, w) == oracles.nfa_accepts(m, w)


def test_pullback_identity(ab):
    p = modified_pullback(TqftFunctor(ab), MonoidHom.identity(("A", "B")))
    touching = {q for t in ab.transitions for q in (t[0], t[2])}
    assert set(p.kept_states) == touching


def test_pullback_c_to_ab(ab):
    f = TqftFunctor(ab)
    p = modified_pullback(f, MonoidHom(("C",), ("A", "B"), {"C": ("A", "B")}))
    assert p.kept_states == ("q0",)
    assert p.letter_operator("C") == BoolMat.identity(1)
    dead = modified_pullback(f, MonoidHom(("C",), ("A", "B"), {"C": ("A", "A")}))
    assert dead.letter_operator("C").is_zero()


def test_span_identity_and_maps():
    i3 = span_identity(3)
    assert spans_equivalent(span_compose(i3, i3), i3)
    f = BoolMat([[1, 0, 0], [0, 1, 1]])
    g = BoolMat([[1, 1], [0, 1], [1, 0]])
    assert spans_equivalent(span_compose(span_of_map(g), span_of_map(f)), span_of_map(bmat_mul(g, f)))


def random_span(rng, n):
    apex = rng.randint(0, 3)
    legs = [BoolMat(np.array([[rng.random() < 0.4 for _ in range(apex)] for _ in range(n)],
                             dtype=bool).reshape(n, apex)) for _ in range(2)]
    return SemiSpan(apex, *legs)


def test_span_composition_associative():
    rng = random.Random(9)
    for _ in range(200):
        a, b, c = (random_span(rng, 3) for _ in range(3))
        left = span_compose(c, span_compose(b, a))
        right = span_compose(span_compose(c, b), a)
        assert spans_equivalent(left, right)


def test_naturality_identity_and_fixture(ab):
    for m in (ab, even_length(), universal_fsa(("A", "B"))):
        assert check_naturality(Transducer.identity(("A", "B")), m).ok
    probes = [Defect(PLUS, "C"), Cup(), Cap(), HalfStart(), HalfEnd()]
    assert check_naturality(c_to_ab(), ab, probes=probes).ok


def test_naturality_negative_control(ab):
    report = check_naturality(Transducer.identity(("A", "B")), ab, drop_pair=("u", "q1"))
    assert not report.ok
    assert any("defect" in s["probe"] for s in report.failing())
    assert all("witness" in s for s in report.failing())
