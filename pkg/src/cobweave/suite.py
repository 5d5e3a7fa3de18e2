"""Property checks over random and fixture instances, one function per criterion.

Every check returns a CriterionResult; `exact` records whether the
property held on every instance, `passed` additionally requires the run to
finish inside its time budget.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

from . import oracles
from .automata import MonoidHom, enumerate_language, fsa_accepts, universal_fsa
from .catauto import (CatFunctor, CatTransducer, FreeCat, cat_apply, cat_naturality_check,
                      encode_fsa, encode_transducer, identity_path, single_object_cat, t_phi)
from .cobordism import floating_line
from .fixtures import (ab_fixture, ab_grammar, c_to_ab, dyck_grammar, even_length, random_catfsa,
                       random_fsa, random_natural_transducer, random_transducer)
from .operad import (CfGrammar, Species, Vertex, apply_grammar, constant, cs_factorize,
                     grammar_naturality_check, grammar_transduce, graft, identity_seq,
                     language_of_arrows, seq_from_labels, splice_compose,
                     spliced_defect_operator, tree_leaves, trees_by_depth)
from .subregular import k_factors
from .tqft import TqftFunctor, check_naturality
from .transducers import Transducer, apply, compose


@dataclass
class CriterionResult:
    number: int
    title: str
    exact: bool
    seconds: float
    budget: float
    details: dict = field(default_factory=dict)

    @property
    def within_budget(self) -> bool:
        return self.seconds <= self.budget

    @property
    def passed(self) -> bool:
        return self.exact and self.within_budget

    def to_json(self, timings: bool = False) -> dict:
        out = {"criterion": self.number, "title": self.title, "passed": self.passed,
               "exact": self.exact, "budget_s": self.budget, "details": self.details}
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


def _rng(seed: int, number: int) -> random.Random:
    return random.Random(seed * 1009 + number)


def _words(alphabet, maxlen: int):
    for n in range(maxlen + 1):
        yield from itertools.product(alphabet, repeat=n)


def _lang(m, maxlen: int) -> set:
    return set(enumerate_language(m, maxlen))


def _live_fsa(rng: random.Random, max_states: int, alphabet) -> object:
    """A random trimmed machine with a nonempty language."""
    while True:
        m = random_fsa(rng, max_states, alphabet, density=0.35)
        if m.finals:
            return m


def path_integral_law(seed: int = 0, machines: int = 200, maxlen: int = 8) -> CriterionResult:
    rng = _rng(seed, 1)
    start = time.perf_counter()
    checked, mismatches = 0, []
    for i in range(machines):
        letters = ("A", "B", "C")[:rng.randint(1, 3)]
        m = _live_fsa(rng, 6, letters)
        phi = TqftFunctor(m)
        for w in _words(m.alphabet, maxlen):
            checked += 1
            if bool(phi.eval(floating_line(w))[0, 0]) != fsa_accepts(m, w):
                mismatches.append({"machine": i, "word": "".join(w)})
    return CriterionResult(1, "path-integral acceptance law", not mismatches,
                           time.perf_counter() - start, 10.0,
                           {"machines": machines, "words_checked": checked,
                            "mismatches": mismatches[:5]})


def transducer_semantics(seed: int = 0, pairs: int = 50, maxlen: int = 8) -> CriterionResult:
    rng = _rng(seed, 2)
    start = time.perf_counter()
    bad = []
    for i in range(pairs):
        m = _live_fsa(rng, 4, ("A", "B"))
        # prefer pairs whose transduction is nonempty; give up after a few draws
        for _ in range(10):
            t = random_transducer(rng, m.alphabet, ("x", "y"), mid_size=rng.randint(1, 3))
            if oracles.transduction(t, m, maxlen):
                break
        got = _lang(apply(t, m), maxlen)
        want = oracles.transduction(t, m, maxlen)
        if got != want:
            bad.append({"pair": i, "extra": sorted("".join(w) for w in got - want)[:3],
                        "missing": sorted("".join(w) for w in want - got)[:3]})
    return CriterionResult(2, "transducer semantics against the word oracle", not bad,
                           time.perf_counter() - start, 30.0, {"pairs": pairs, "failures": bad})


def category_laws(seed: int = 0, triples: int = 25, maxlen: int = 6) -> CriterionResult:
    rng = _rng(seed, 3)
    start = time.perf_counter()
    bad, nonempty = [], 0
    for i in range(triples):
        m = _live_fsa(rng, 3, ("A", "B"))
        chain = [("A", "B"), ("x", "y"), ("u", "v"), ("A", "B")]
        ts, cur = [], m
        for k in range(3):
            # draw until the running image stays nonempty, so the laws are not vacuous
            for _ in range(20):
                t = random_transducer(rng, chain[k], chain[k + 1], mid_size=2, max_core=2)
                if enumerate_language(apply(t, cur), maxlen):
                    break
            ts.append(t)
            cur = apply(t, cur)
        t1, t2, t3 = ts
        nonempty += bool(enumerate_language(cur, maxlen))
        stepwise = _lang(apply(t2, apply(t1, m)), maxlen)
        fused = _lang(apply(compose(t2, t1), m), maxlen)
        left = _lang(apply(compose(compose(t3, t2), t1), m), maxlen)
        right = _lang(apply(compose(t3, compose(t2, t1)), m), maxlen)
        if stepwise != fused or left != right:
            bad.append({"triple": i, "composition": stepwise == fused, "associativity": left == right})
    return CriterionResult(3, "transducer composition and associativity", not bad,
                           time.perf_counter() - start, 60.0,
                           {"triples": triples, "nonempty_results": nonempty, "failures": bad})


def _two_object_grammar() -> CfGrammar:
    cat = FreeCat(["X", "Y"], [("X", "a", "Y"), ("Y", "b", "X")])
    species = Species(["S", "T"], [Vertex("s", ["T"], "S"), Vertex("t", [], "T")])
    rules = {"s": seq_from_labels(cat, [["a"], ["b"]], [("Y", "Y")], ("X", "X")),
             "t": seq_from_labels(cat, [[]], [], ("Y", "Y"))}
    return CfGrammar(species, cat, {"S": ("X", "X"), "T": ("Y", "Y")}, "S", rules)


def _bracket_relabel(g: CfGrammar) -> CatTransducer:
    states = single_object_cat(("[", "]"), "t")
    left = CatFunctor(states, g.base_cat, {"t": "*"}, {"[": ("(",), "]": (")",)})
    right = CatFunctor(states, single_object_cat(("[", "]")), {"t": "*"},
                       {"[": ("[",), "]": ("]",)})
    return CatTransducer(states, left, right)


def naturality(seed: int = 0, randomized: int = 25) -> CriterionResult:
    rng = _rng(seed, 4)
    start = time.perf_counter()
    results = {}
    results["word/c_to_ab"] = check_naturality(c_to_ab(), ab_fixture()).ok
    results["word/identity_ab"] = check_naturality(Transducer.identity(("A", "B")), ab_fixture()).ok
    results["word/identity_even"] = check_naturality(Transducer.identity(("A", "B")),
                                                     even_length()).ok
    tr = c_to_ab()
    cat_t = encode_transducer(tr.alpha, tr.beta, ("A", "B"), ("x",))
    results["category/c_to_ab"] = cat_naturality_check(cat_t, encode_fsa(ab_fixture())).ok
    ident = encode_transducer(MonoidHom.identity(("A", "B")), MonoidHom.identity(("A", "B")),
                              ("A", "B"), ("A", "B"))
    results["category/identity_ab"] = cat_naturality_check(ident, encode_fsa(ab_fixture())).ok
    dyck = dyck_grammar()
    results["grammar/bracket_relabel"] = grammar_naturality_check(_bracket_relabel(dyck), dyck).ok
    g2 = _two_object_grammar()
    results["grammar/identity_two_objects"] = grammar_naturality_check(
        CatTransducer.identity(g2.base_cat), g2).ok
    random_fail = []
    for i in range(randomized):
        m = _live_fsa(rng, 4, ("A", "B"))
        t = random_natural_transducer(rng, m.alphabet, mid_size=rng.randint(1, 3))
        if not check_naturality(t, m).ok:
            random_fail.append(i)
    controls = {
        "word/drop_pair": not check_naturality(Transducer.identity(("A", "B")), ab_fixture(),
                                               drop_pair=("u", "q1")).ok,
        "category/corrupt_gamma": not cat_naturality_check(
            ident, encode_fsa(ab_fixture()), corrupt=lambda k: None).ok,
        "grammar/corrupt_leg": not grammar_naturality_check(
            CatTransducer.identity(g2.base_cat), g2,
            corrupt=lambda y, x: {"X": "Y", "Y": "X"}[x]).ok,
    }
    exact = all(results.values()) and not random_fail and all(controls.values())
    return CriterionResult(4, "naturality squares and negative controls", exact,
                           time.perf_counter() - start, 60.0,
                           {"fixtures": results, "randomized": randomized,
                            "randomized_failures": random_fail, "controls_flagged": controls})


def sl2_structure(seed: int = 0) -> CriterionResult:
    start = time.perf_counter()
    m = ab_fixture()
    plain = set(k_factors(m, 2).strings())
    marked = set(k_factors(m, 2, markers=True).strings())
    ta, tb = m.letter_matrix("A"), m.letter_matrix("B")
    checks = {
        "factors": plain == {"AB", "BA"},
        "marked_factors": marked == {"⋊A", "AB", "BA", "B⋉"},
        "A_squared_zero": (ta @ ta).is_zero(),
        "B_squared_zero": (tb @ tb).is_zero(),
    }
    return CriterionResult(5, "strictly 2-local structure of the (AB)^n fixture",
                           all(checks.values()), time.perf_counter() - start, 1.0,
                           {"checks": checks, "factors": sorted(plain), "marked": sorted(marked)})


def _all_paths(cat: FreeCat, max_len: int) -> list:
    out = [identity_path(x) for x in cat.objects]
    return out + [p for p in cat.paths(max_len) if len(p) > 0]


def categorical_functoriality(seed: int = 0, machines: int = 20, max_len: int = 3) -> CriterionResult:
    rng = _rng(seed, 6)
    start = time.perf_counter()
    bad, pairs, zero_pairs = [], 0, 0
    for i in range(machines):
        m = random_catfsa(rng)
        paths = _all_paths(m.base_cat, max_len)
        ops = {p: t_phi(m, p) for p in paths}
        objs = m.states_cat.objects
        for p in paths:
            if not p.labels:
                continue
            runs = oracles.path_runs(m, p.labels)
            got = {(objs[j], objs[r]) for r, j in ops[p].support()}
            if got != runs:
                bad.append({"machine": i, "path": str(p), "kind": "oracle"})
        for p1, p2 in itertools.product(paths, repeat=2):
            prod = ops[p2] @ ops[p1]
            if p1.dst == p2.src:
                pairs += 1
                if prod != t_phi(m, p1.then(p2)):
                    bad.append({"machine": i, "first": str(p1), "second": str(p2), "kind": "compose"})
            else:
                zero_pairs += 1
                if not prod.is_zero():
                    bad.append({"machine": i, "first": str(p1), "second": str(p2), "kind": "zero"})
    return CriterionResult(6, "path operators compose like paths", not bad,
                           time.perf_counter() - start, 30.0,
                           {"machines": machines, "composable_pairs": pairs,
                            "mismatched_pairs": zero_pairs, "failures": bad[:5]})


def _small_seqs(cat: FreeCat, max_gaps: int, max_part: int) -> list:
    """Every spliced sequence with at most max_gaps gaps and parts of length <= max_part."""
    paths = _all_paths(cat, max_part)
    out = []
    for n in range(max_gaps + 1):
        for parts in itertools.product(paths, repeat=n + 1):
            gaps = [(parts[k].dst, parts[k + 1].src) for k in range(n)]
            out.append(seq_from_labels(cat, [p.labels for p in parts], gaps,
                                       (parts[0].src, parts[-1].dst)))
    return out


def operad_laws(seed: int = 0, depth: int = 3) -> CriterionResult:
    start = time.perf_counter()
    cat = FreeCat(["X", "Y"], [("X", "a", "Y"), ("Y", "b", "X")])
    seqs = _small_seqs(cat, 2, 1)
    identity_fail = assoc_fail = 0
    assoc_checked = 0
    for f in seqs:
        if splice_compose(identity_seq(*f.out_color), 0, f) != f:
            identity_fail += 1
        for i in range(f.n_gaps):
            if splice_compose(f, i, identity_seq(*f.gap_colors[i])) != f:
                identity_fail += 1
    by_out: dict = {}
    for s in seqs:
        by_out.setdefault(s.out_color, []).append(s)
    for f in seqs:
        for i in range(f.n_gaps):
            for g in by_out.get(f.gap_colors[i], ()):
                fg = splice_compose(f, i, g)
                # nested: splice into g, then into f
                for j in range(g.n_gaps):
                    for h in by_out.get(g.gap_colors[j], ()):
                        assoc_checked += 1
                        if (splice_compose(fg, i + j, h)
                                != splice_compose(f, i, splice_compose(g, j, h))):
                            assoc_fail += 1
                # parallel: a later gap of f
                for k in range(i + 1, f.n_gaps):
                    for h in by_out.get(f.gap_colors[k], ()):
                        assoc_checked += 1
                        if (splice_compose(fg, k + g.n_gaps - 1, h)
                                != splice_compose(splice_compose(f, k, h), i, g)):
                            assoc_fail += 1
    hom_checked = hom_fail = 0
    for g in (dyck_grammar(), ab_grammar()):
        for c in g.species.colors:
            for t1 in trees_by_depth(g.species, c, depth):
                leaves = tree_leaves(t1)
                if not leaves:
                    continue
                img1 = apply_grammar(g, t1)
                for i, lc in enumerate(leaves):
                    for t2 in trees_by_depth(g.species, lc, depth - 1):
                        hom_checked += 1
                        if (apply_grammar(g, graft(t1, i, t2))
                                != splice_compose(img1, i, apply_grammar(g, t2))):
                            hom_fail += 1
    exact = identity_fail == 0 and assoc_fail == 0 and hom_fail == 0
    return CriterionResult(7, "operad laws and grammar homomorphism", exact,
                           time.perf_counter() - start, 30.0,
                           {"sequences": len(seqs), "identity_failures": identity_fail,
                            "associativity_checked": assoc_checked, "associativity_failures": assoc_fail,
                            "homomorphism_checked": hom_checked, "homomorphism_failures": hom_fail})


def cs_pipeline(seed: int = 0, depth: int = 3, maxlen: int = 8) -> CriterionResult:
    start = time.perf_counter()
    details = {}
    exact = True
    oracle_sets = {
        "dyck": {"".join(w) for w in oracles.balanced_words(maxlen)},
        "ab": {"".join(w) for w in oracles.nfa_language(ab_fixture(), maxlen)},
    }
    for name, g in (("dyck", dyck_grammar()), ("ab", ab_grammar())):
        try:
            cs = cs_factorize(g, depth)
            triangle = True
        except AssertionError:
            details[name] = {"triangle": False}
            exact = False
            continue
        original = {"".join(p.labels) for p in language_of_arrows(g, maxlen)}
        transduced = {"".join(p.labels)
                      for p in language_of_arrows(grammar_transduce(cs.transducer, cs.contour_grammar),
                                                  maxlen)}
        ok = triangle and original == transduced == oracle_sets[name]
        exact &= ok
        details[name] = {"triangle": triangle, "trees_checked": cs.trees_checked,
                         "words": len(original), "languages_agree": original == transduced,
                         "matches_oracle": original == oracle_sets[name]}
    return CriterionResult(8, "factorization through the tree-contour grammar", exact,
                           time.perf_counter() - start, 60.0, details)


def fixture_catfsas(seed: int = 0, randomized: int = 5) -> dict:
    rng = _rng(seed, 9)
    tr = c_to_ab()
    fx = {
        "ab": encode_fsa(ab_fixture()),
        "even": encode_fsa(even_length()),
        "c_to_ab_image": cat_apply(encode_transducer(tr.alpha, tr.beta, ("A", "B"), ("x",)),
                                   encode_fsa(ab_fixture())),
        "universal": encode_fsa(universal_fsa(("A", "B"))),
    }
    for i in range(randomized):
        fx[f"random{i}"] = random_catfsa(rng)
    return fx


def degenerate_reduction(seed: int = 0, max_len: int = 4) -> CriterionResult:
    start = time.perf_counter()
    bad, checked = [], 0
    for name, m in fixture_catfsas(seed).items():
        for p in _all_paths(m.base_cat, max_len):
            checked += 1
            if spliced_defect_operator(m, constant(p)).matrix != t_phi(m, p):
                bad.append({"fixture": name, "path": str(p)})
    return CriterionResult(9, "gap-free spliced defects reduce to path operators", not bad,
                           time.perf_counter() - start, 10.0, {"paths_checked": checked, "failures": bad})


CRITERIA = {
    1: path_integral_law,
    2: transducer_semantics,
    3: category_laws,
    4: naturality,
    5: sl2_structure,
    6: categorical_functoriality,
    7: operad_laws,
    8: cs_pipeline,
    9: degenerate_reduction,
}


def run_suite(seed: int = 0, only=None) -> list:
    return [CRITERIA[n](seed) for n in sorted(CRITERIA) if only is None or n in only]
