import itertools

import pytest

from cobweave import oracles
from cobweave.automata import enumerate_language
from cobweave.boolsemi import BoolMat
from cobweave.catauto import (CatFunctor, CatTransducer, FreeCat, encode_fsa, identity_path,
                              single_object_cat, t_phi)
from cobweave.cobordism import PLUS, Defect, HalfEnd, HalfStart, Hole, compose, floating_line
from cobweave.fixtures import ab_fixture, ab_grammar, dyck_grammar
from cobweave.operad import (CfGrammar, Leaf, Node, OperadTypeError, Species, Vertex,
                             apply_grammar, constant, contour, cs_factorize, grammar_from_json,
                             grammar_naturality_check, grammar_transduce, grammar_tqft_operator,
                             graft, identity_seq, language_of_arrows, map_seq, operadic_eval,
                             seq_from_labels, splice_compose, spliced_defect_operator, tree_leaves,
                             trees_by_depth, trees_by_size, treecont)
from cobweave.tqft import TqftFunctor

STAR = ("*", "*")


def text(paths):
    return {"".join(p.labels) for p in paths}


def seq(cat, *parts):
    return seq_from_labels(cat, [list(p) for p in parts], [STAR] * (len(parts) - 1), STAR)


def letters_cat():
    return single_object_cat(tuple("abcdefgh"))


def bracket_relabel(g):
    states = single_object_cat(("[", "]"), "t")
    left = CatFunctor(states, g.base_cat, {"t": "*"}, {"[": ("(",), "]": (")",)})
    right = CatFunctor(states, single_object_cat(("[", "]")), {"t": "*"}, {"[": ("[",), "]": ("]",)})
    return CatTransducer(states, left, right)


def two_object_grammar():
    cat = FreeCat(["X", "Y"], [("X", "a", "Y"), ("Y", "b", "X")])
    species = Species(["S", "T"], [Vertex("s", ["T"], "S"), Vertex("t", [], "T")])
    rules = {"s": seq_from_labels(cat, [["a"], ["b"]], [("Y", "Y")], ("X", "X")),
             "t": seq_from_labels(cat, [[]], [], ("Y", "Y"))}
    return CfGrammar(species, cat, {"S": ("X", "X"), "T": ("Y", "Y")}, "S", rules)


# spliced sequences

def test_identity_law():
    cat = letters_cat()
    f = seq(cat, "a", "bc", "", "d")
    for i in range(f.n_gaps):
        assert splice_compose(f, i, identity_seq(*STAR)) == f
    assert splice_compose(identity_seq(*STAR), 0, f) == f


def test_splice_into_first_gap():
    cat = letters_cat()
    f = seq(cat, "a", "b", "c", "d")
    g = seq(cat, "e", "f", "g")
    assert splice_compose(f, 0, g) == seq(cat, "ae", "f", "gb", "c", "d")
    assert splice_compose(f, 1, constant(cat.path_of(("h",)))) == seq(cat, "a", "bhc", "d")


def test_splice_type_errors():
    cat = FreeCat(["X", "Y"], [("X", "a", "Y")])
    f = seq_from_labels(cat, [["a"], []], [("Y", "Y")], ("X", "Y"))
    with pytest.raises(OperadTypeError):
        splice_compose(f, 0, identity_seq("X", "X"))
    with pytest.raises(OperadTypeError):
        splice_compose(f, 1, identity_seq("Y", "Y"))


def test_parallel_splices_commute():
    cat = single_object_cat(("a", "b"))
    words = ["", "a", "b", "ab"]
    for f_parts in itertools.product(words, repeat=3):
        f = seq(cat, *f_parts)
        for g_parts, h_parts in itertools.product(itertools.product(words, repeat=2), repeat=2):
            g, h = seq(cat, *g_parts), seq(cat, *h_parts)
            first = splice_compose(splice_compose(f, 0, g), 1 + g.n_gaps - 1, h)
            second = splice_compose(splice_compose(f, 1, h), 0, g)
            assert first == second


# trees

def binary_species():
    return Species(["S"], [Vertex("p", ["S", "S"], "S"), Vertex("e", [], "S")])


def test_graft_identity_like():
    s = binary_species()
    p = s.vertex("p")
    t = Node(p, [Leaf("S"), Leaf("S")])
    assert graft(Leaf("S"), 0, t) == t
    assert graft(t, 1, Leaf("S")) == t


def test_graft_binary_nodes_gives_left_comb():
    p = binary_species().vertex("p")
    t = Node(p, [Leaf("S"), Leaf("S")])
    comb = graft(t, 0, t)
    assert comb == Node(p, [Node(p, [Leaf("S"), Leaf("S")]), Leaf("S")])
    assert len(tree_leaves(comb)) == 3


def test_graft_color_mismatch():
    s = Species(["S", "T"], [Vertex("u", ["T"], "S")])
    with pytest.raises(OperadTypeError):
        graft(Node(s.vertex("u"), [Leaf("T")]), 0, Node(s.vertex("u"), [Leaf("T")]))


def test_graft_associativity():
    s = binary_species()
    trees = trees_by_depth(s, "S", 2)
    small = trees_by_depth(s, "S", 1)
    for t1 in trees:
        n = len(tree_leaves(t1))
        for t2, t3 in itertools.product(small, repeat=2):
            k2 = len(tree_leaves(t2))
            for i, j in itertools.combinations(range(n), 2):
                # independent leaves
                assert graft(graft(t1, i, t2), j + k2 - 1, t3) == graft(graft(t1, j, t3), i, t2)
            for i in range(n):
                for j in range(k2):
                    # nested
                    assert graft(graft(t1, i, t2), i + j, t3) == graft(t1, i, graft(t2, j, t3))


def test_trees_by_size_counts():
    s = binary_species()
    # a leaf, e, or p over two trees whose sizes sum to n - 1
    counts = [1]
    for n in range(1, 6):
        counts.append((n == 1) + sum(counts[a] * counts[n - 1 - a] for a in range(n)))
    assert [len(trees_by_size(s, "S", n)) for n in range(6)] == counts


# grammars

def test_apply_single_node():
    g = dyck_grammar()
    p = g.species.vertex("p")
    assert apply_grammar(g, Node(p, [Leaf("S"), Leaf("S")])) == g.rules["p"]


def test_dyck_depth_two_trees():
    g = dyck_grammar()
    p, e = g.species.vertex("p"), g.species.vertex("e")
    pe = Node(p, [Node(e, []), Node(e, [])])
    nested = Node(p, [pe, Node(e, [])])
    chained = Node(p, [Node(e, []), pe])
    assert "".join(apply_grammar(g, nested).parts[0].labels) == "(())"
    assert "".join(apply_grammar(g, chained).parts[0].labels) == "()()"


def test_homomorphism_to_depth_three():
    for g in (dyck_grammar(), ab_grammar()):
        for c in g.species.colors:
            for t1 in trees_by_depth(g.species, c, 3):
                for i, lc in enumerate(tree_leaves(t1)):
                    for t2 in trees_by_depth(g.species, lc, 2):
                        assert (apply_grammar(g, graft(t1, i, t2))
                                == splice_compose(apply_grammar(g, t1), i, apply_grammar(g, t2)))


def test_language_of_arrows():
    assert text(language_of_arrows(dyck_grammar(), 4)) == {"", "()", "(())", "()()"}
    for n in (6, 8):
        assert text(language_of_arrows(dyck_grammar(), n)) == {"".join(w) for w in oracles.balanced_words(n)}
    assert ({p.labels for p in language_of_arrows(ab_grammar(), 8)}
            == set(enumerate_language(ab_fixture(), 8)))


def test_language_without_constants_is_empty():
    cat = single_object_cat(("a",))
    s = Species(["S"], [Vertex("u", ["S"], "S")])
    g = CfGrammar(s, cat, {"S": STAR}, "S", {"u": seq(cat, "a", "")})
    assert language_of_arrows(g, 6) == set()


def test_language_with_silent_cycle():
    cat = single_object_cat(("a",))
    s = Species(["S", "T"], [Vertex("u", ["T"], "S"), Vertex("v", ["S"], "T"), Vertex("k", [], "T")])
    rules = {"u": seq(cat, "", ""), "v": seq(cat, "", ""), "k": seq(cat, "a")}
    g = CfGrammar(s, cat, {"S": STAR, "T": STAR}, "S", rules)
    assert text(language_of_arrows(g, 3)) == {"a"}


# contour

def test_contour_binary():
    cat = contour(Species(["S"], [Vertex("p", ["S", "S"], "S")]))
    assert set(cat.objects) == {("S", "d"), ("S", "u")}
    assert set(cat.generators) == {(("S", "d"), ("p", 0), ("S", "d")),
                                   (("S", "u"), ("p", 1), ("S", "d")),
                                   (("S", "u"), ("p", 2), ("S", "u"))}


def test_contour_edge_cases():
    cat = contour(Species(["S"], []))
    assert set(cat.objects) == {("S", "d"), ("S", "u")} and not cat.generators
    cat = contour(Species(["S", "T"], [Vertex("u", ["T"], "S")]))
    assert {lab for _, lab, _ in cat.generators} == {("u", 0), ("u", 1)}


def contour_word(t):
    """Depth-first walk: (x,0), child 1, (x,1), ..., child n, (x,n)."""
    if isinstance(t, Leaf):
        return ()
    out = ((t.vertex.name, 0),)
    for k, c in enumerate(t.children):
        out += contour_word(c) + ((t.vertex.name, k + 1),)
    return out


def test_treecont_language_is_contours():
    s = binary_species()
    g = treecont(s, "S")
    trees = [t for n in range(4) for t in trees_by_size(s, "S", n) if not tree_leaves(t)]
    want = {contour_word(t) for t in trees}
    got = {p.labels for p in language_of_arrows(g, 7)}
    assert got == {w for w in want if len(w) <= 7}
    single = treecont(Species(["S"], [Vertex("e", [], "S")]), "S")
    assert {p.labels for p in language_of_arrows(single, 5)} == {(("e", 0),)}


def test_contours_biject_with_balanced_strings():
    s = binary_species()
    g = treecont(s, "S")
    spell = {("p", 0): "(", ("p", 1): ")", ("p", 2): "", ("e", 0): ""}
    # p has 3 slots and e one: n binary nodes give 3n + n + 1 letters
    words = [p.labels for p in language_of_arrows(g, 4 * 5 + 1)]
    spelled = ["".join(spell[x] for x in w) for w in words]
    assert len(spelled) == len(set(spelled))
    assert set(spelled) == {"".join(w) for w in oracles.balanced_words(10)}


# factorization through the tree-contour grammar

def test_cs_factorize_chromatic_relabel_is_identity():
    cs = cs_factorize(dyck_grammar())
    again = cs_factorize(cs.chromatic)
    assert again.relabel == {c: c for c in cs.chromatic.species.colors}


def test_cs_factorize_triangles():
    for g in (dyck_grammar(), ab_grammar()):
        cs = cs_factorize(g, 3)
        assert cs.trees_checked > 0
        for c in g.species.colors:
            for t in trees_by_depth(g.species, c, 3):
                assert apply_grammar(g, t) == map_seq(cs.functor, apply_grammar(cs.contour_grammar, t))
        back = grammar_transduce(cs.transducer, cs.contour_grammar)
        assert text(language_of_arrows(back, 8)) == text(language_of_arrows(g, 8))


# transduction of grammars

def test_grammar_transduce():
    g = dyck_grammar()
    same = grammar_transduce(CatTransducer.identity(g.base_cat), g)
    assert text(language_of_arrows(same, 8)) == text(language_of_arrows(g, 8))
    square = grammar_transduce(bracket_relabel(g), g)
    assert text(language_of_arrows(square, 8)) == {"".join(w) for w in oracles.balanced_words(8, "[", "]")}
    empty = FreeCat([], [])
    dead = CatTransducer(empty, CatFunctor(empty, g.base_cat, {}, {}),
                         CatFunctor(empty, g.base_cat, {}, {}))
    assert language_of_arrows(grammar_transduce(dead, g), 8) == set()


# operators

def test_grammar_operator():
    g = dyck_grammar()
    res = grammar_tqft_operator(g, identity_seq(*STAR))
    assert res.matrix == BoolMat.identity(1)
    res = grammar_tqft_operator(g, seq(g.base_cat, "(", ")"))
    assert res.matrix.tolist() == [[1]] and res.complete
    assert grammar_tqft_operator(g, seq(g.base_cat, ")", "(")).matrix.is_zero()
    g2 = two_object_grammar()
    assert grammar_tqft_operator(g2, identity_seq("X", "X")).matrix.tolist() == [[1, 0], [0, 0]]
    assert grammar_tqft_operator(g2, identity_seq("Y", "Y")).matrix.tolist() == [[0, 0], [0, 1]]


def test_spliced_defect_operator():
    m = encode_fsa(ab_fixture())
    for w in ("", "A", "AB", "BA", "AA", "ABAB"):
        p = m.base_cat.path_of(tuple(w)) if w else identity_path("*")
        assert spliced_defect_operator(m, constant(p)).matrix == t_phi(m, p)
    two = seq(m.base_cat, "A", "B")
    assert spliced_defect_operator(m, two).matrix.tolist() == [[1, 0], [0, 0]]
    assert spliced_defect_operator(m, seq(m.base_cat, "AA", "B")).matrix.is_zero()


def test_operadic_eval():
    m = ab_fixture()
    assert operadic_eval(m, floating_line("AB")) == TqftFunctor(m).eval(floating_line("AB"))
    holed = compose(HalfStart(), Hole("h", (PLUS,), (PLUS,)), HalfEnd())
    assert operadic_eval(m, holed, {"h": Defect(PLUS, "AB")}).tolist() == [[1]]
    assert operadic_eval(m, holed, [Defect(PLUS, "AB")]).tolist() == [[1]]
    assert operadic_eval(m, holed) == holed


def test_plugging_commutes_with_evaluation():
    holed = compose(HalfStart(), Hole("h", (PLUS,), (PLUS,)), HalfEnd())
    sources = [ab_fixture(), encode_fsa(ab_fixture())]
    for src in sources:
        f = TqftFunctor(src) if src is sources[0] else None
        for n in range(5):
            for w in itertools.product("AB", repeat=n):
                plugged = operadic_eval(src, holed, {"h": Defect(PLUS, w)})
                if f is not None:
                    # evaluate the pieces separately and compose the matrices
                    want = f.end_covector() @ f.word_operator(w) @ f.start_vector()
                else:
                    op = t_phi(src, src.base_cat.path_of(w)) if w else BoolMat.identity(2)
                    start = BoolMat.unit(2, 0)
                    want = BoolMat([[1, 0]]) @ op @ start
                assert plugged == want
    g = dyck_grammar()
    for w in ("", "()", "(())", "(()", ")("):
        got = operadic_eval(g, holed, {"h": Defect(PLUS, w)})
        assert got.tolist() == [[int(oracles.balanced(w))]]


# naturality

def test_grammar_naturality():
    g = dyck_grammar()
    assert grammar_naturality_check(CatTransducer.identity(g.base_cat), g).ok
    assert grammar_naturality_check(bracket_relabel(g), g).ok
    g2 = two_object_grammar()
    ident = CatTransducer.identity(g2.base_cat)
    assert grammar_naturality_check(ident, g2).ok
    bad = grammar_naturality_check(ident, g2, corrupt=lambda y, x: {"X": "Y", "Y": "X"}[x])
    assert not bad.ok
    assert all(s["witness"]["color"] in ("X", "Y") for s in bad.failing())


def test_grammar_json_round_trip():
    from cobweave.operad import species_to_json
    g = dyck_grammar()
    back = grammar_from_json(g.to_json())
    assert text(language_of_arrows(back, 6)) == text(language_of_arrows(g, 6))
    assert species_to_json(back.species) == species_to_json(g.species)
