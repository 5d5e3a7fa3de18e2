"""Colored operads of trees, spliced arrows, and context-free grammars over categories.

A spliced sequence w0 [] w1 [] ... [] wn is a list of paths in a base
category separated by gaps.  Gap k (0-based) sits between parts[k] and
parts[k+1] and carries a color (X, Y): parts[k] ends at X and parts[k+1]
starts at Y.  The whole sequence has output color (source of w0, target of wn).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Union

import numpy as np

from .automata import Fsa, InputError
from .boolsemi import BoolMat
from .catauto import (BoundError, CatFsa, CatFunctor, CatTransducer, FreeCat, Path,
                      check_finitary, identity_path, lifts, single_object_cat, t_phi)
from .cobordism import Diagram, fill
from .tqft import TqftFunctor, _Evaluator


class OperadTypeError(InputError):
    """Colors do not match in a composition."""


@dataclass(frozen=True)
class Vertex:
    name: str
    inputs: tuple
    output: Hashable

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))

    @property
    def arity(self) -> int:
        return len(self.inputs)


@dataclass(frozen=True)
class Species:
    colors: tuple
    vertices: tuple

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(self.colors))
        object.__setattr__(self, "vertices", tuple(self.vertices))
        cs = set(self.colors)
        names = [v.name for v in self.vertices]
        if len(set(names)) != len(names):
            raise InputError("vertex names must be unique")
        for v in self.vertices:
            if v.output not in cs or not set(v.inputs) <= cs:
                raise InputError(f"vertex {v.name} uses an unknown color")

    def vertex(self, name) -> Vertex:
        for v in self.vertices:
            if v.name == name:
                return v
        raise InputError(f"unknown vertex {name!r}")

    def producing(self, color) -> list:
        return [v for v in self.vertices if v.output == color]


@dataclass(frozen=True)
class Leaf:
    """An open input of the given color; also the identity operation."""

    color: Hashable

    def __str__(self):
        return f"|{self.color}"


@dataclass(frozen=True)
class Node:
    vertex: Vertex
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) != self.vertex.arity:
            raise OperadTypeError(f"{self.vertex.name} needs {self.vertex.arity} children")
        for want, child in zip(self.vertex.inputs, self.children):
            if tree_color(child) != want:
                raise OperadTypeError(f"child of color {tree_color(child)!r} in a {want!r} slot "
                                      f"of {self.vertex.name}")

    def __str__(self):
        if not self.children:
            return self.vertex.name
        return f"{self.vertex.name}({', '.join(str(c) for c in self.children)})"


OperadTree = Union[Leaf, Node]


def tree_color(t: OperadTree):
    return t.color if isinstance(t, Leaf) else t.vertex.output


def tree_leaves(t: OperadTree) -> list:
    if isinstance(t, Leaf):
        return [t.color]
    return [c for child in t.children for c in tree_leaves(child)]


def tree_size(t: OperadTree) -> int:
    if isinstance(t, Leaf):
        return 0
    return 1 + sum(tree_size(c) for c in t.children)


def tree_depth(t: OperadTree) -> int:
    if isinstance(t, Leaf):
        return 0
    return 1 + max((tree_depth(c) for c in t.children), default=0)


def graft(t1: OperadTree, leaf: int, t2: OperadTree) -> OperadTree:
    """Plug t2 into the open leaf with the given 0-based index."""
    n = len(tree_leaves(t1))
    if not 0 <= leaf < n:
        raise OperadTypeError(f"leaf index {leaf} out of range for {n} leaves")

    def go(t, k):
        if isinstance(t, Leaf):
            if k == 0:
                if t.color != tree_color(t2):
                    raise OperadTypeError(f"cannot graft a {tree_color(t2)!r} tree onto a {t.color!r} leaf")
                return t2, -1
            return t, k - 1
        kids = []
        for c in t.children:
            if k < 0:
                kids.append(c)
            else:
                c, k = go(c, k)
                kids.append(c)
        return Node(t.vertex, kids), k

    return go(t1, leaf)[0]


def trees_by_depth(s: Species, color, depth: int) -> list:
    """Every tree of the given root color whose depth is at most depth."""

    @lru_cache(maxsize=None)
    def go(c, d):
        out = [Leaf(c)]
        if d == 0:
            return tuple(out)
        for v in s.producing(c):
            for kids in itertools.product(*(go(ci, d - 1) for ci in v.inputs)):
                out.append(Node(v, kids))
        return tuple(out)

    return list(go(color, depth))


def trees_by_size(s: Species, color, size: int) -> list:
    """Every tree of the given root color with exactly size vertices."""

    @lru_cache(maxsize=None)
    def go(c, n):
        if n == 0:
            return (Leaf(c),)
        out = []
        for v in s.producing(c):
            for split in _compositions(n - 1, v.arity):
                for kids in itertools.product(*(go(ci, k) for ci, k in zip(v.inputs, split))):
                    out.append(Node(v, kids))
        return tuple(out)

    return list(go(color, size))


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class SplicedSeq:
    parts: tuple
    gap_colors: tuple
    out_color: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        gaps = tuple(tuple(g) for g in self.gap_colors)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "gap_colors", gaps)
        object.__setattr__(self, "out_color", tuple(self.out_color))
        if len(parts) != len(gaps) + 1:
            raise OperadTypeError(f"{len(parts)} parts do not fit {len(gaps)} gaps")
        x, y = self.out_color
        if parts[0].src != x or parts[-1].dst != y:
            raise OperadTypeError(f"parts run {parts[0].src!r}..{parts[-1].dst!r}, "
                                  f"output color is {self.out_color!r}")
        for k, (gx, gy) in enumerate(gaps):
            if parts[k].dst != gx or parts[k + 1].src != gy:
                raise OperadTypeError(f"gap {k} colored {(gx, gy)!r} does not match its neighbours")

    @property
    def n_gaps(self) -> int:
        return len(self.gap_colors)

    def length(self) -> int:
        return sum(len(p) for p in self.parts)

    def __str__(self):
        return " [] ".join(str(p) for p in self.parts)

    def to_json(self) -> dict:
        parts: list = []
        for k, p in enumerate(self.parts):
            if k:
                parts.append("gap")
            parts.append([_lab(x) for x in p.labels])
        return {"parts": parts, "gap_colors": [[_lab(a), _lab(b)] for a, b in self.gap_colors],
                "out_color": [_lab(x) for x in self.out_color]}


def _lab(x):
    if isinstance(x, tuple):
        return "(" + ",".join(str(_lab(y)) for y in x) + ")"
    return x


def constant(p: Path) -> SplicedSeq:
    return SplicedSeq((p,), (), (p.src, p.dst))


def identity_seq(x, y) -> SplicedSeq:
    """id_x [] id_y, the identity operation of color (x, y)."""
    return SplicedSeq((identity_path(x), identity_path(y)), ((x, y),), (x, y))


def seq_from_labels(cat: FreeCat, label_parts, gap_colors, out_color) -> SplicedSeq:
    """Build a spliced sequence, taking each part's source from the colors."""
    gap_colors = [tuple(g) for g in gap_colors]
    out_color = tuple(out_color)
    parts = []
    for k, labels in enumerate(label_parts):
        src = out_color[0] if k == 0 else gap_colors[k - 1][1]
        parts.append(cat.path(src, tuple(labels)))
    return SplicedSeq(parts, gap_colors, out_color)


def splice_compose(f: SplicedSeq, i: int, g: SplicedSeq) -> SplicedSeq:
    """Splice g into gap i (0-based) of f."""
    if not 0 <= i < f.n_gaps:
        raise OperadTypeError(f"gap index {i} out of range for {f.n_gaps} gaps")
    if g.out_color != f.gap_colors[i]:
        raise OperadTypeError(f"cannot splice a {g.out_color!r} sequence into a "
                              f"{f.gap_colors[i]!r} gap")
    before, after = f.parts[i], f.parts[i + 1]
    if g.n_gaps == 0:
        middle = (before.then(g.parts[0]).then(after),)
    else:
        middle = ((before.then(g.parts[0]),) + g.parts[1:-1]
                  + (g.parts[-1].then(after),))
    parts = f.parts[:i] + middle + f.parts[i + 2:]
    gaps = f.gap_colors[:i] + g.gap_colors + f.gap_colors[i + 1:]
    return SplicedSeq(parts, gaps, f.out_color)


def map_seq(func: CatFunctor, s: SplicedSeq) -> SplicedSeq:
    """Apply a functor to every part and color."""
    om = func.object_map
    return SplicedSeq(tuple(func(p) for p in s.parts),
                      tuple((om[a], om[b]) for a, b in s.gap_colors),
                      (om[s.out_color[0]], om[s.out_color[1]]))


@dataclass(frozen=True)
class CfGrammar:
    """Operad morphism from the free operad on a species to spliced arrows of a base category."""

    species: Species
    base_cat: FreeCat
    color_map: dict = field(hash=False)
    start: Hashable = None
    rules: dict = field(hash=False, default_factory=dict)

    def __post_init__(self):
        for c in self.species.colors:
            if c not in self.color_map:
                raise InputError(f"color {c!r} has no object pair")
        if self.start is not None and self.start not in self.species.colors:
            raise InputError(f"start color {self.start!r} is not a color")
        for v in self.species.vertices:
            if v.name not in self.rules:
                raise InputError(f"vertex {v.name} has no rule")
            r = self.rules[v.name]
            want_gaps = tuple(tuple(self.color_map[c]) for c in v.inputs)
            if r.gap_colors != want_gaps or r.out_color != tuple(self.color_map[v.output]):
                raise OperadTypeError(f"rule for {v.name} does not respect colors")

    def __hash__(self):
        return id(self)

    def is_chromatic(self) -> bool:
        imgs = [tuple(self.color_map[c]) for c in self.species.colors]
        return len(set(imgs)) == len(imgs)

    def to_json(self) -> dict:
        return {
            "base": self.base_cat.to_json(),
            "species": species_to_json(self.species),
            "color_map": {str(_lab(c)): [_lab(x) for x in self.color_map[c]]
                          for c in self.species.colors},
            "start": _lab(self.start),
            "rules": {v.name: self.rules[v.name].to_json() for v in self.species.vertices},
        }


def apply_grammar(g: CfGrammar, t: OperadTree) -> SplicedSeq:
    if isinstance(t, Leaf):
        x, y = g.color_map[t.color]
        return identity_seq(x, y)
    out = g.rules[t.vertex.name]
    # splice right to left so earlier gap indices stay valid
    for k in reversed(range(len(t.children))):
        out = splice_compose(out, k, apply_grammar(g, t.children[k]))
    return out


def language_of_arrows(g: CfGrammar, len_bound: int, start=None) -> set:
    """Constant arrows of length <= len_bound derivable from the start color.

    Computed as a least fixpoint over per-color sets of bounded constants, so
    rules producing empty words (including cycles of them) are handled exactly.
    """
    start = g.start if start is None else start
    if start not in g.species.colors:
        return set()
    table = {c: set() for c in g.species.colors}
    changed = True
    while changed:
        changed = False
        for v in g.species.vertices:
            rule = g.rules[v.name]
            for combo in _fill_combinations(rule, [table[c] for c in v.inputs], len_bound):
                if combo not in table[v.output]:
                    table[v.output].add(combo)
                    changed = True
    return set(table[start])


def _fill_combinations(rule: SplicedSeq, choices: list, len_bound: int):
    base = rule.parts[0]
    partial = [base] if len(base) <= len_bound else []
    for k, options in enumerate(choices):
        nxt = []
        tail = rule.parts[k + 1]
        for p in partial:
            for o in options:
                total = len(p) + len(o) + len(tail)
                if total <= len_bound:
                    nxt.append(p.then(o).then(tail))
        partial = nxt
    return partial


def epsilon_cycles(g: CfGrammar) -> list:
    """Colors that can rewrite to themselves through unary rules with empty parts."""
    edges: dict = {}
    for v in g.species.vertices:
        r = g.rules[v.name]
        if v.arity == 1 and all(len(p) == 0 for p in r.parts):
            edges.setdefault(v.output, set()).add(v.inputs[0])
    out = []
    for c in g.species.colors:
        seen, stack = set(), [c]
        while stack:
            for d in edges.get(stack.pop(), ()):
                if d == c:
                    out.append(c)
                    stack = []
                    break
                if d not in seen:
                    seen.add(d)
                    stack.append(d)
    return out


def contour_objects(color):
    return (color, "d"), (color, "u")


def contour(s: Species) -> FreeCat:
    """Free category with objects (N, d), (N, u) and one arrow per vertex slot.

    For a vertex x with output N0 and inputs N1..Nn the arrows are
    (x,0): N0^d -> N1^d, (x,i): Ni^u -> N(i+1)^d, (x,n): Nn^u -> N0^u,
    so a contour enters each subtree going down and leaves it going up;
    the last arrow returns to the root color.
    """
    objects = [o for c in s.colors for o in contour_objects(c)]
    gens = []
    for v in s.vertices:
        cols = (v.output,) + v.inputs + (v.output,)
        n = v.arity
        for i in range(n + 1):
            src = (cols[i], "d") if i == 0 else (cols[i], "u")
            dst = (cols[i + 1], "u") if i == n else (cols[i + 1], "d")
            gens.append((src, (v.name, i), dst))
    return FreeCat(objects, gens)


def treecont(s: Species, start) -> CfGrammar:
    """The tree-contour grammar: vertex x goes to (x,0) [] (x,1) [] ... [] (x,n)."""
    if start not in s.colors:
        raise InputError(f"start color {start!r} is not a color")
    cat = contour(s)
    cmap = {c: contour_objects(c) for c in s.colors}
    rules = {}
    for v in s.vertices:
        rules[v.name] = seq_from_labels(cat, [((v.name, i),) for i in range(v.arity + 1)],
                                        [cmap[c] for c in v.inputs], cmap[v.output])
    return CfGrammar(s, cat, cmap, start, rules)


@dataclass
class CsFactorization:
    chromatic: CfGrammar
    relabel: dict
    functor: CatFunctor
    contour_grammar: CfGrammar
    transducer: CatTransducer
    trees_checked: int


def cs_factorize(g: CfGrammar, depth: int = 3) -> CsFactorization:
    """Factor a grammar through its tree-contour grammar.

    Returns the color relabelling onto object pairs, the grammar over the
    relabelled (chromatic) species, the functor from the contour category to
    the base sending (x,i) to the i-th part of the rule for x, and the
    transducer (identity, that functor) acting on the tree-contour grammar.
    The triangle apply_grammar(g, T) = functor(apply_grammar(contour, T)) is
    checked on every tree up to the given depth.
    """
    s = g.species
    relabel = {c: tuple(g.color_map[c]) for c in s.colors}
    pairs = []
    for c in s.colors:
        if relabel[c] not in pairs:
            pairs.append(relabel[c])
    cspecies = Species(pairs, [Vertex(v.name, [relabel[c] for c in v.inputs], relabel[v.output])
                               for v in s.vertices])
    chromatic = CfGrammar(cspecies, g.base_cat, {p: p for p in pairs},
                          relabel[g.start] if g.start is not None else None,
                          {v.name: g.rules[v.name] for v in s.vertices})
    tc = treecont(s, g.start if g.start is not None else s.colors[0])
    obj_map = {}
    for c in s.colors:
        x, y = g.color_map[c]
        obj_map[(c, "d")], obj_map[(c, "u")] = x, y
    gen_map = {(v.name, i): g.rules[v.name].parts[i].labels
               for v in s.vertices for i in range(v.arity + 1)}
    tau = CatFunctor(tc.base_cat, g.base_cat, obj_map, gen_map)
    checked = 0
    for c in s.colors:
        for t in trees_by_depth(s, c, depth):
            checked += 1
            if apply_grammar(g, t) != map_seq(tau, apply_grammar(tc, t)):
                raise AssertionError(f"factorization triangle fails on tree {t}")
    trans = CatTransducer(tc.base_cat, CatFunctor.identity(tc.base_cat), tau)
    return CsFactorization(chromatic, relabel, tau, tc, trans, checked)


def _seq_lifts(func: CatFunctor, s: SplicedSeq, obj_lift: dict) -> list:
    """Spliced sequences in the source of func mapping onto s, with colors fixed by obj_lift."""
    choices = []
    ends = [obj_lift.get(s.out_color[0])] + [obj_lift.get(y) for _, y in s.gap_colors]
    stops = [obj_lift.get(x) for x, _ in s.gap_colors] + [obj_lift.get(s.out_color[1])]
    if any(e is None for e in ends + stops):
        return []
    for k, p in enumerate(s.parts):
        opts = [w for w in lifts(func, p, start=ends[k]) if w.dst == stops[k]]
        if not opts:
            return []
        choices.append(opts)
    out = []
    for combo in itertools.product(*choices):
        out.append(SplicedSeq(combo, tuple(zip(stops[:-1], ends[1:])), (ends[0], stops[-1])))
    return out


def pullback_grammar(t: CatTransducer, g: CfGrammar) -> CfGrammar:
    """Lift a grammar along the transducer's left functor (injective on objects)."""
    if t.left.target != g.base_cat:
        raise InputError("transducer does not read the grammar's base category")
    inv = {t.left.object_map[y]: y for y in t.states_cat.objects}
    colors, cmap = [], {}
    for c in g.species.colors:
        x, y = g.color_map[c]
        if x in inv and y in inv:
            colors.append(c)
            cmap[c] = (inv[x], inv[y])
    cset = set(colors)
    vertices, rules = [], {}
    for v in g.species.vertices:
        if v.output not in cset or not set(v.inputs) <= cset:
            continue
        for k, lifted in enumerate(_seq_lifts(t.left, g.rules[v.name], inv)):
            name = v.name if k == 0 else f"{v.name}#{k}"
            vertices.append(Vertex(name, v.inputs, v.output))
            rules[name] = lifted
    start = g.start if g.start in cset else None
    return CfGrammar(Species(colors, vertices), t.states_cat, cmap, start, rules)


def grammar_transduce(t: CatTransducer, g: CfGrammar) -> CfGrammar:
    """Pull back along the left functor, then push every rule along the right functor."""
    lifted = pullback_grammar(t, g)
    rm = t.right
    cmap = {c: (rm.object_map[a], rm.object_map[b]) for c, (a, b) in lifted.color_map.items()}
    rules = {name: map_seq(rm, r) for name, r in lifted.rules.items()}
    return CfGrammar(lifted.species, rm.target, cmap, lifted.start, rules)


@dataclass
class OperatorResult:
    matrix: BoolMat
    basis: tuple
    complete: bool

    def __eq__(self, other):
        if isinstance(other, BoolMat):
            return self.matrix == other
        if isinstance(other, OperatorResult):
            return self.matrix == other.matrix and self.basis == other.basis
        return NotImplemented


def chromatic_basis(g: CfGrammar) -> tuple:
    """Objects occurring both as first and as second component of a color's image."""
    firsts = {g.color_map[c][0] for c in g.species.colors}
    seconds = {g.color_map[c][1] for c in g.species.colors}
    return tuple(x for x in g.base_cat.objects if x in firsts and x in seconds)


def _silent_nonnullary(g: CfGrammar) -> bool:
    return any(v.arity > 0 and g.rules[v.name].length() == 0 for v in g.species.vertices)


def grammar_tqft_operator(g: CfGrammar, d: SplicedSeq, size_bound: int = 6) -> OperatorResult:
    """Matrix with entry (t, s) set when a tree of size <= size_bound maps onto d
    and runs from object s to object t."""
    basis = chromatic_basis(g)
    idx = {x: i for i, x in enumerate(basis)}
    arr = np.zeros((len(basis), len(basis)), dtype=bool)
    x, y = d.out_color
    if x in idx and y in idx:
        for c in g.species.colors:
            if tuple(g.color_map[c]) != d.out_color:
                continue
            if _tree_hits(g, c, d, size_bound):
                arr[idx[y], idx[x]] = True
    max_arity = max((v.arity for v in g.species.vertices), default=0)
    needed = max(1, max_arity) * d.length() + 1
    complete = not _silent_nonnullary(g) and size_bound >= needed
    return OperatorResult(BoolMat(arr.reshape(len(basis), len(basis))), basis, complete)


def _tree_hits(g: CfGrammar, color, d: SplicedSeq, size_bound: int) -> bool:
    for n in range(size_bound + 1):
        for t in trees_by_size(g.species, color, n):
            if len(tree_leaves(t)) == d.n_gaps and apply_grammar(g, t) == d:
                return True
    return False


def spliced_defect_operator(m: CatFsa, d: SplicedSeq, size_bound: int = 8) -> OperatorResult:
    """Operator of a spliced defect on the objects of the state category.

    Gap objects are unconstrained, so for n >= 1 gaps the entry (q', q) is
    set when the first part lifts from q, every middle part lifts somewhere
    and the last part lifts into q'.  With no gaps this is the path operator.
    """
    objs = m.states_cat.objects
    if len(d.parts) == 1:
        return OperatorResult(t_phi(m, d.parts[0], bound=max(size_bound, len(d.parts[0]))),
                              tuple(objs), True)
    if not check_finitary(m.tau, size_bound):
        raise BoundError("state functor is not finitary")
    idx = {x: i for i, x in enumerate(objs)}
    first = {w.src for w in lifts(m.tau, d.parts[0])}
    last = {w.dst for w in lifts(m.tau, d.parts[-1])}
    middle_ok = all(lifts(m.tau, p) for p in d.parts[1:-1])
    arr = np.zeros((len(objs), len(objs)), dtype=bool)
    if middle_ok:
        for q in first:
            for r in last:
                arr[idx[r], idx[q]] = True
    return OperatorResult(BoolMat(arr), tuple(objs), True)


class CatTqft(_Evaluator):
    """Evaluation of plain cobordisms with defects labelled by base paths."""

    def __init__(self, m: CatFsa):
        self.machine = m
        self.basis = tuple(m.states_cat.objects)
        self.alphabet = tuple(lab for _, lab, _ in m.base_cat.generators)

    def word_operator(self, w) -> BoolMat:
        w = tuple(w)
        if not w:
            return BoolMat.identity(len(self.basis))
        return t_phi(self.machine, self.machine.base_cat.path_of(w))

    def start_vector(self) -> BoolMat:
        return BoolMat.unit(len(self.basis), self.basis.index(self.machine.q0))

    def end_covector(self) -> BoolMat:
        row = [[x in set(self.machine.finals) for x in self.basis]]
        return BoolMat(np.array(row, dtype=bool).reshape(1, len(self.basis)))


class GrammarTqft(_Evaluator):
    """Evaluation with defects labelled by constant arrows of a chromatic grammar."""

    def __init__(self, g: CfGrammar, size_bound: int = 6):
        if not g.is_chromatic():
            raise InputError("grammar must be injective on colors")
        self.grammar = g
        self.size_bound = size_bound
        self.basis = chromatic_basis(g)
        self.alphabet = tuple(lab for _, lab, _ in g.base_cat.generators)

    def word_operator(self, w) -> BoolMat:
        w = tuple(w)
        n = len(self.basis)
        if not w:
            arr = np.zeros((n, n), dtype=bool)
            for i, x in enumerate(self.basis):
                arr[i, i] = grammar_tqft_operator(
                    self.grammar, constant(identity_path(x)), self.size_bound).matrix[i, i]
            return BoolMat(arr)
        return grammar_tqft_operator(self.grammar, constant(self.grammar.base_cat.path_of(w)),
                                     self.size_bound).matrix

    def start_vector(self) -> BoolMat:
        x, _ = self.grammar.color_map[self.grammar.start]
        return BoolMat.unit(len(self.basis), self.basis.index(x))

    def end_covector(self) -> BoolMat:
        _, y = self.grammar.color_map[self.grammar.start]
        row = np.zeros((1, len(self.basis)), dtype=bool)
        row[0, self.basis.index(y)] = True
        return BoolMat(row)


def operadic_eval(source, holed: Diagram, fillings=None):
    """Fill holes, then evaluate; returns the residual term if holes remain.

    fillings maps hole names to diagrams (a list fills holes in order of
    appearance).  source is an Fsa, a CatFsa or a chromatic CfGrammar.
    """
    fillings = fillings or {}
    if isinstance(fillings, (list, tuple)):
        names = [h.name for h in holed.holes()]
        if len(fillings) > len(names):
            raise OperadTypeError(f"{len(fillings)} fillings for {len(names)} holes")
        fillings = dict(zip(names, fillings))
    filled = fill(holed, fillings)
    if filled.holes():
        return filled
    if isinstance(source, Fsa):
        return TqftFunctor(source).eval(filled)
    if isinstance(source, CatFsa):
        return CatTqft(source).eval(filled)
    if isinstance(source, CfGrammar):
        return GrammarTqft(source).eval(filled)
    raise InputError(f"cannot evaluate over {type(source).__name__}")


@dataclass
class GrammarNaturalityReport:
    squares: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s["commutes"] for s in self.squares)

    def failing(self) -> list:
        return [s for s in self.squares if not s["commutes"]]


def _leg(src_basis, dst_basis, obj_map, corrupt=None) -> BoolMat:
    arr = np.zeros((len(dst_basis), len(src_basis)), dtype=bool)
    for j, y in enumerate(src_basis):
        x = obj_map[y]
        if corrupt is not None:
            x = corrupt(y, x)
        if x in dst_basis:
            arr[dst_basis.index(x), j] = True
    return BoolMat(arr.reshape(len(dst_basis), len(src_basis)))


def grammar_naturality_check(t: CatTransducer, g: CfGrammar, probes=None,
                             size_bound: int = 6, corrupt=None) -> GrammarNaturalityReport:
    """Check the two squares of the span (inclusion leg, projection leg) for each probe.

    probes are spliced sequences over the transducer's states category; by
    default the rules of the lifted grammar.  corrupt(y, x) may rewrite the
    inclusion leg's image of object y, for negative controls.
    """
    lifted = pullback_grammar(t, g)
    pushed = grammar_transduce(t, g)
    if probes is None:
        probes = [lifted.rules[v.name] for v in lifted.species.vertices]
    b_lift = chromatic_basis(lifted)
    b_src = chromatic_basis(g)
    b_dst = chromatic_basis(pushed)
    f_leg = _leg(b_lift, b_src, t.left.object_map, corrupt)
    g_leg = _leg(b_lift, b_dst, t.right.object_map)
    report = GrammarNaturalityReport()
    for psi in probes:
        mid = grammar_tqft_operator(lifted, psi, size_bound).matrix
        left = grammar_tqft_operator(g, map_seq(t.left, psi), size_bound).matrix
        right = grammar_tqft_operator(pushed, map_seq(t.right, psi), size_bound).matrix
        for side, leg, op, basis in (("inclusion", f_leg, left, b_src),
                                     ("projection", g_leg, right, b_dst)):
            lhs, rhs = leg @ mid, op @ leg
            entry = {"probe": str(psi), "leg": side, "commutes": lhs == rhs}
            if not entry["commutes"]:
                i, j = (int(v) for v in np.argwhere(lhs.array ^ rhs.array)[0])
                entry["witness"] = {"color": str(_lab(b_lift[j])), "target": str(_lab(basis[i]))}
            report.squares.append(entry)
    return report


def species_to_json(s: Species) -> dict:
    return {"colors": [_lab(c) for c in s.colors],
            "vertices": [{"name": v.name, "inputs": [_lab(c) for c in v.inputs],
                          "output": _lab(v.output)} for v in s.vertices]}


def species_from_json(obj: dict) -> Species:
    try:
        return Species(obj["colors"], [Vertex(v["name"], v.get("inputs", []), v["output"])
                                       for v in obj["vertices"]])
    except KeyError as exc:
        raise InputError(f"species is missing {exc.args[0]!r}") from exc


def seq_from_json(cat: FreeCat, obj: dict) -> SplicedSeq:
    try:
        raw = obj["parts"]
        parts, cur = [], []
        for item in raw:
            if item == "gap":
                parts.append(cur)
                cur = []
            else:
                cur = list(item) if isinstance(item, list) else [item]
        parts.append(cur)
        return seq_from_labels(cat, parts, obj.get("gap_colors", []), obj["out_color"])
    except KeyError as exc:
        raise InputError(f"spliced sequence is missing {exc.args[0]!r}") from exc


def grammar_from_json(obj: dict) -> CfGrammar:
    from .catauto import freecat_from_json
    try:
        if "base" in obj:
            base = freecat_from_json(obj["base"])
        else:
            base = single_object_cat(obj["alphabet"])
        species = species_from_json(obj["species"])
        cmap = {c: tuple(obj["color_map"][c]) if "color_map" in obj else ("*", "*")
                for c in species.colors}
        rules = {name: seq_from_json(base, r) for name, r in obj["rules"].items()}
        return CfGrammar(species, base, cmap, obj.get("start"), rules)
    except KeyError as exc:
        raise InputError(f"grammar is missing {exc.args[0]!r}") from exc
