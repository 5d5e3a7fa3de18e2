"""Small named machines and generators used by tests, the CLI suite and docs."""

from __future__ import annotations

import random

from .automata import Fsa, MonoidHom, Psa, trim, universal_fsa
from .transducers import Transducer


def ab_fixture() -> Fsa:
    """Two-state machine for (AB)^n."""
    return Fsa(("q0", "q1"), ("A", "B"), {("q0", "A", "q1"), ("q1", "B", "q0")}, "q0", ("q0",))


def dyck_psa() -> Psa:
    """One-counter machine for balanced strings over ( and )."""
    trans = {
        ("p", "(", "Z", "c", ("X", "Z")),
        ("c", "(", "X", "c", ("X", "X")),
        ("c", ")", "X", "c", ()),
        ("c", None, "Z", "p", ("Z",)),
    }
    return Psa(("p", "c"), ("(", ")"), trans, "p", ("p",), ("Z", "X"), "Z")


def even_length(alphabet=("A", "B")) -> Fsa:
    trans = {(s, a, 1 - s) for s in (0, 1) for a in alphabet}
    return Fsa((0, 1), alphabet, trans, 0, (0,))


def c_to_ab() -> Transducer:
    """Reads each AB block as one C and writes x for it."""
    alpha = MonoidHom(("C",), ("A", "B"), {"C": ("A", "B")})
    beta = MonoidHom(("C",), ("x",), {"C": ("x",)})
    return Transducer(alpha, beta, universal_fsa(("C",)))


def random_fsa(rng: random.Random, max_states: int = 6, alphabet=("A", "B", "C"),
               density: float = 0.3, trimmed: bool = True) -> Fsa:
    n = rng.randint(1, max_states)
    states = tuple(f"s{i}" for i in range(n))
    trans = {(p, a, q) for p in states for a in alphabet for q in states if rng.random() < density}
    finals = [q for q in states if rng.random() < 0.4]
    m = Fsa(states, tuple(alphabet), trans, states[0], finals)
    return trim(m) if trimmed else m


def random_word(rng: random.Random, alphabet, lo: int, hi: int) -> tuple:
    return tuple(rng.choice(alphabet) for _ in range(rng.randint(lo, hi)))


def random_hom(rng: random.Random, source, target, lo: int = 0, hi: int = 2) -> MonoidHom:
    return MonoidHom(tuple(source), tuple(target),
                     {a: random_word(rng, tuple(target), lo, hi) for a in source})


def random_transducer(rng: random.Random, in_alphabet, out_alphabet, mid_size: int = 2,
                      max_core: int = 3, erasing_alpha: bool = True) -> Transducer:
    mid = tuple(f"m{i}" for i in range(mid_size))
    alpha = random_hom(rng, mid, in_alphabet, 0 if erasing_alpha else 1, 2)
    beta = random_hom(rng, mid, out_alphabet, 1, 2)
    core = random_fsa(rng, max_core, mid, density=0.5, trimmed=False)
    return Transducer(alpha, beta, core)


def dyck_grammar():
    """S -> ( S ) S | empty, over the one-object category on ( and )."""
    from .catauto import single_object_cat
    from .operad import CfGrammar, Species, Vertex, seq_from_labels
    cat = single_object_cat(("(", ")"))
    pair = ("*", "*")
    species = Species(("S",), (Vertex("p", ("S", "S"), "S"), Vertex("e", (), "S")))
    rules = {"p": seq_from_labels(cat, [["("], [")"], []], [pair, pair], pair),
             "e": seq_from_labels(cat, [[]], [], pair)}
    return CfGrammar(species, cat, {"S": pair}, "S", rules)


def ab_grammar():
    """Right-linear grammar for (AB)^n with one color per state."""
    from .catauto import single_object_cat
    from .operad import CfGrammar, Species, Vertex, seq_from_labels
    cat = single_object_cat(("A", "B"))
    pair = ("*", "*")
    species = Species(("Q0", "Q1"), (Vertex("a", ("Q1",), "Q0"), Vertex("b", ("Q0",), "Q1"),
                                     Vertex("f", (), "Q0")))
    rules = {"a": seq_from_labels(cat, [["A"], []], [pair], pair),
             "b": seq_from_labels(cat, [["B"], []], [pair], pair),
             "f": seq_from_labels(cat, [[]], [], pair)}
    return CfGrammar(species, cat, {"Q0": pair, "Q1": pair}, "Q0", rules)


def random_natural_transducer(rng: random.Random, in_alphabet, out_alphabet=("x", "y", "z"),
                              mid_size: int = 2) -> Transducer:
    """Universal one-state core, random alpha, beta sending letters to distinct letters."""
    mid = tuple(f"m{i}" for i in range(mid_size))
    alpha = random_hom(rng, mid, in_alphabet, 1, 2)
    outs = rng.sample(list(out_alphabet), mid_size)
    beta = MonoidHom(mid, tuple(out_alphabet), {a: (o,) for a, o in zip(mid, outs)})
    return Transducer(alpha, beta, universal_fsa(mid))


def random_catfsa(rng: random.Random, max_objects: int = 2, max_gens: int = 4,
                  max_over: int = 2, density: float = 0.5):
    """Random categorical automaton whose state functor sends generators to generators.

    Such functors are finitary and have unique lifting of factorizations.
    """
    from .catauto import CatFsa, CatFunctor, FreeCat
    objs = [f"X{i}" for i in range(rng.randint(1, max_objects))]
    base_gens = [(rng.choice(objs), f"g{i}", rng.choice(objs))
                 for i in range(rng.randint(1, max_gens))]
    base = FreeCat(objs, base_gens)
    over = {x: [f"{x}.{j}" for j in range(rng.randint(1, max_over))] for x in objs}
    states = [q for x in objs for q in over[x]]
    gens, gmap = [], {}
    for src, lab, dst in base_gens:
        for q in over[src]:
            for r in over[dst]:
                if rng.random() < density:
                    name = f"{lab}:{q}>{r}"
                    gens.append((q, name, r))
                    gmap[name] = (lab,)
    cat = FreeCat(states, gens)
    tau = CatFunctor(cat, base, {q: x for x in objs for q in over[x]}, gmap)
    q0 = rng.choice(states)
    finals = tuple(q for q in states if rng.random() < 0.4) or (rng.choice(states),)
    return CatFsa(cat, base, tau, q0, finals)
