"""Automata whose states and inputs are free categories.

A categorical automaton is a functor tau from a free category of states to a
free base category, with an initial object and final objects.  Its runs are
paths in the state category and the recognised arrows are their images.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, NamedTuple

import numpy as np

from .automata import Fsa, InputError
from .boolsemi import BoolMat, SizeError, bmat_kron, bmat_mul


class BoundError(ValueError):
    """A bounded verification cannot certify the requested operation."""


class Path(NamedTuple):
    src: Hashable
    labels: tuple
    dst: Hashable

    def __len__(self):
        return len(self.labels)

    def then(self, other: "Path") -> "Path":
        """Concatenation: self first, other second."""
        if self.dst != other.src:
            raise InputError(f"paths do not compose: {self.dst!r} != {other.src!r}")
        return Path(self.src, self.labels + other.labels, other.dst)

    def __str__(self):
        if not self.labels:
            return f"id[{self.src}]"
        return "".join(str(x) for x in self.labels)


def identity_path(x) -> Path:
    return Path(x, (), x)


@dataclass(frozen=True)
class FreeCat:
    objects: tuple
    generators: tuple

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "generators", tuple(tuple(g) for g in self.generators))
        objs = set(self.objects)
        labels = [g[1] for g in self.generators]
        if len(set(labels)) != len(labels):
            raise InputError("generator labels must be unique")
        for s, _, d in self.generators:
            if s not in objs or d not in objs:
                raise InputError(f"generator endpoints {s!r}, {d!r} are not objects")

    @property
    def ends(self) -> dict:
        return {lab: (s, d) for s, lab, d in self.generators}

    def out_edges(self) -> dict:
        out: dict = {x: [] for x in self.objects}
        for s, lab, d in self.generators:
            out[s].append((lab, d))
        return out

    def path(self, src, labels) -> Path:
        ends = self.ends
        cur = src
        for lab in labels:
            if lab not in ends:
                raise InputError(f"unknown generator {lab!r}")
            s, d = ends[lab]
            if s != cur:
                raise InputError(f"generator {lab!r} does not start at {cur!r}")
            cur = d
        return Path(src, tuple(labels), cur)

    def path_of(self, labels) -> Path:
        """Path from a nonempty label sequence (source inferred)."""
        if not labels:
            raise InputError("an empty label sequence needs an explicit object")
        return self.path(self.ends[labels[0]][0], labels)

    def paths(self, max_len: int, start=None):
        """All paths of length <= max_len, shortest first."""
        out_edges = self.out_edges()
        layer = [identity_path(x) for x in self.objects if start is None or x == start]
        for _ in range(max_len + 1):
            yield from layer
            layer = [Path(p.src, p.labels + (lab,), d)
                     for p in layer for lab, d in out_edges[p.dst]]

    def to_json(self) -> dict:
        return {"objects": [_js(x) for x in self.objects],
                "generators": [[_js(s), _js(l), _js(d)] for s, l, d in self.generators]}


def _js(x):
    if isinstance(x, tuple):
        return "(" + ",".join(str(_js(y)) for y in x) + ")"
    return x


def single_object_cat(alphabet, obj="*") -> FreeCat:
    """The free monoid on an alphabet as a one-object category."""
    return FreeCat((obj,), tuple((obj, a, obj) for a in alphabet))


@dataclass(frozen=True)
class CatFunctor:
    source: FreeCat
    target: FreeCat
    object_map: dict = field(hash=False)
    gen_map: dict = field(hash=False)

    def __post_init__(self):
        tends = self.target.ends
        for x in self.source.objects:
            if x not in self.object_map:
                raise InputError(f"object {x!r} has no image")
            if self.object_map[x] not in self.target.objects:
                raise InputError(f"image of {x!r} is not a target object")
        gm = {}
        for s, lab, d in self.source.generators:
            if lab not in self.gen_map:
                raise InputError(f"generator {lab!r} has no image")
            img = tuple(self.gen_map[lab])
            p = self.target.path(self.object_map[s], img)
            if p.dst != self.object_map[d]:
                raise InputError(f"image of {lab!r} ends at {p.dst!r}, expected {self.object_map[d]!r}")
            gm[lab] = img
        del tends
        object.__setattr__(self, "gen_map", gm)

    def __hash__(self):
        return id(self)

    def __call__(self, p: Path) -> Path:
        labels = tuple(x for lab in p.labels for x in self.gen_map[lab])
        return Path(self.object_map[p.src], labels, self.object_map[p.dst])

    def collapsing(self) -> list:
        return [g for g in self.source.generators if not self.gen_map[g[1]]]

    def is_injective_on_objects(self) -> bool:
        imgs = [self.object_map[x] for x in self.source.objects]
        return len(set(imgs)) == len(imgs)

    def to_json(self) -> dict:
        return {"objects": {str(_js(k)): _js(v) for k, v in self.object_map.items()},
                "generators": {str(_js(k)): [_js(x) for x in v] for k, v in self.gen_map.items()}}

    @classmethod
    def identity(cls, c: FreeCat) -> "CatFunctor":
        return cls(c, c, {x: x for x in c.objects}, {l: (l,) for _, l, _ in c.generators})


class BoundedCheck:
    """Outcome of a verification that only inspected paths up to a bound."""

    def __init__(self, holds: bool, bound: int, witness=None):
        self.holds = holds
        self.bound = bound
        self.witness = witness

    def __bool__(self):
        return self.holds

    def __repr__(self):
        return f"BoundedCheck(holds={self.holds}, bound={self.bound}, witness={self.witness!r})"

    def to_json(self) -> dict:
        out = {"holds": self.holds, "bound": self.bound}
        if self.witness is not None:
            out["witness"] = str(self.witness)
        return out


def _collapsing_cycle(f: CatFunctor):
    edges: dict = {}
    for s, lab, d in f.collapsing():
        edges.setdefault(s, []).append((lab, d))
    # depth-first search for a cycle among generators with empty image
    color: dict = {}

    def visit(x, trail):
        color[x] = 1
        for lab, d in edges.get(x, ()):
            if color.get(d) == 1:
                return trail + [lab]
            if d not in color:
                found = visit(d, trail + [lab])
                if found:
                    return found
        color[x] = 2
        return None

    for x in f.source.objects:
        if x not in color:
            found = visit(x, [])
            if found:
                return found
    return None


def check_finitary(f: CatFunctor, len_bound: int) -> BoundedCheck:
    """Finite preimages of objects and of every target path up to len_bound.

    Preimages of a target path can only be infinite when generators with
    empty image form a cycle, which already makes the identity preimage
    infinite; so the test is the same at every bound.
    """
    cycle = _collapsing_cycle(f)
    return BoundedCheck(cycle is None, len_bound, cycle)


def _source_length_cap(f: CatFunctor, image_len: int) -> int:
    return (image_len + 1) * max(len(f.source.objects), 1)


def lifts(f: CatFunctor, phi: Path, start=None) -> list:
    """Every source path w with f(w) = phi (requires finitary f)."""
    if _collapsing_cycle(f) is not None:
        raise BoundError("functor is not finitary; lifts are infinite")
    out = []
    out_edges = f.source.out_edges()
    starts = [x for x in f.source.objects
              if f.object_map[x] == phi.src and (start is None or x == start)]
    stack = [(identity_path(x), 0) for x in starts]
    target = phi.labels
    while stack:
        p, pos = stack.pop()
        if pos == len(target) and f.object_map[p.dst] == phi.dst:
            out.append(p)
        for lab, d in out_edges[p.dst]:
            img = f.gen_map[lab]
            if target[pos:pos + len(img)] == img:
                stack.append((Path(p.src, p.labels + (lab,), d), pos + len(img)))
    return sorted(out, key=lambda p: (len(p), repr(p)))


def check_ulf(f: CatFunctor, len_bound: int) -> BoundedCheck:
    """Unique lifting of 2-factorizations for source paths with image length <= len_bound."""
    fin = check_finitary(f, len_bound)
    if not fin:
        return BoundedCheck(False, len_bound, f"not finitary: {fin.witness}")
    cap = _source_length_cap(f, len_bound)
    for p in f.source.paths(cap):
        img = f(p)
        if len(img) > len_bound:
            continue
        # source split points grouped by the length of their image prefix
        prefix_lengths = [sum(len(f.gen_map[lab]) for lab in p.labels[:k])
                          for k in range(len(p) + 1)]
        for cut in range(len(img) + 1):
            hits = [k for k, n in enumerate(prefix_lengths) if n == cut]
            # splits inside a run of collapsing generators change the middle object
            objs = {_prefix_end(f, p, k) for k in hits}
            if not hits:
                return BoundedCheck(False, len_bound, f"{p}: factorization at {cut} has no lift")
            if len(hits) > 1:
                return BoundedCheck(False, len_bound, f"{p}: factorization at {cut} lifts {len(hits)} ways"
                                    + ("" if len(objs) > 1 else " through one object"))
    return BoundedCheck(True, len_bound)


def _prefix_end(f: CatFunctor, p: Path, k: int):
    ends = f.source.ends
    return p.src if k == 0 else ends[p.labels[k - 1]][1]


@dataclass(frozen=True)
class CatFsa:
    states_cat: FreeCat
    base_cat: FreeCat
    tau: CatFunctor
    q0: Hashable
    finals: tuple

    def __post_init__(self):
        object.__setattr__(self, "finals", tuple(self.finals))
        objs = set(self.states_cat.objects)
        if self.q0 not in objs or not set(self.finals) <= objs:
            raise InputError("initial or final object missing from the state category")

    @property
    def qf(self):
        if len(self.finals) != 1:
            raise InputError(f"automaton has {len(self.finals)} final objects")
        return self.finals[0]

    def validate(self, bound: int) -> dict:
        return {"finitary": check_finitary(self.tau, bound).to_json(),
                "ulf": check_ulf(self.tau, bound).to_json()}

    def to_json(self) -> dict:
        return {"states": self.states_cat.to_json(), "base": self.base_cat.to_json(),
                "tau": self.tau.to_json(), "initial": _js(self.q0),
                "finals": [_js(x) for x in self.finals]}


def encode_fsa(m: Fsa) -> CatFsa:
    """One-object base category on the alphabet; states category on the transition graph."""
    base = single_object_cat(m.alphabet)
    gens = []
    gmap = {}
    for q, a, r in sorted(m.transitions, key=repr):
        lab = f"{q}-{a}-{r}"
        gens.append((q, lab, r))
        gmap[lab] = (a,)
    states = FreeCat(m.states, gens)
    tau = CatFunctor(states, base, {q: "*" for q in m.states}, gmap)
    return CatFsa(states, base, tau, m.initial, tuple(q for q in m.states if q in m.finals))


def arrow_language(m: CatFsa, len_bound: int) -> set:
    """Images of runs from the initial object to a final object, up to image length len_bound."""
    if _collapsing_cycle(m.tau) is not None:
        raise BoundError("state functor is not finitary")
    out = set()
    out_edges = m.states_cat.out_edges()
    finals = set(m.finals)
    seen = set()
    stack = [(m.q0, ())]
    while stack:
        x, img = stack.pop()
        if (x, img) in seen:
            continue
        seen.add((x, img))
        if x in finals:
            out.add(Path(m.tau.object_map[m.q0], img, m.tau.object_map[x]))
        for lab, d in out_edges[x]:
            nxt = img + m.tau.gen_map[lab]
            if len(nxt) <= len_bound:
                stack.append((d, nxt))
    return out


def t_phi(m: CatFsa, phi: Path, bound: int | None = None) -> BoolMat:
    """Operator summing delta_{q'} over lifts q -> q' of phi."""
    bound = len(phi) if bound is None else bound
    if bound < len(phi):
        raise BoundError(f"verification bound {bound} is shorter than the path ({len(phi)})")
    fin = check_finitary(m.tau, bound)
    if not fin:
        raise BoundError(f"state functor not finitary: {fin.witness}")
    objs = m.states_cat.objects
    idx = {x: i for i, x in enumerate(objs)}
    arr = np.zeros((len(objs), len(objs)), dtype=bool)
    for w in lifts(m.tau, phi):
        arr[idx[w.dst], idx[w.src]] = True
    return BoolMat(arr)


@dataclass(frozen=True)
class CatTransducer:
    """States category with a left functor (injective on objects) and a right functor."""

    states_cat: FreeCat
    left: CatFunctor
    right: CatFunctor

    def __post_init__(self):
        if not self.left.is_injective_on_objects():
            raise InputError("left functor must be injective on objects")

    @classmethod
    def identity(cls, c: FreeCat) -> "CatTransducer":
        f = CatFunctor.identity(c)
        return cls(c, f, f)

    def to_json(self) -> dict:
        return {"states": self.states_cat.to_json(),
                "left_target": self.left.target.to_json(), "left": self.left.to_json(),
                "right_target": self.right.target.to_json(), "right": self.right.to_json()}

    def left_preimage(self, x):
        for y in self.states_cat.objects:
            if self.left.object_map[y] == x:
                return y
        return None


class _Pullback(NamedTuple):
    cat: FreeCat
    first: dict     # generator label -> path labels in the first category
    second: dict    # generator label -> path labels in the second category


def _pullback(f: CatFunctor, g: CatFunctor, gen_budget: int = 4096) -> _Pullback:
    """Pullback of f: A -> C and g: B -> C, generated by pairs of lifts.

    Objects are pairs (a, b) with f(a) = g(b).  Generators are (w, h) for a
    generator h of B and an A-path w with f(w) = g(h), together with
    (k, identity) for generators k of A that f collapses.
    """
    if f.target != g.target:
        raise InputError("functors do not share a target")
    objs = [(a, b) for a in f.source.objects for b in g.source.objects
            if f.object_map[a] == g.object_map[b]]
    objset = set(objs)
    gens, first, second = [], {}, {}

    def add(src, w_labels, h_labels, dst, tag):
        if src not in objset or dst not in objset:
            return
        lab = (src, tuple(w_labels), tag)
        if lab in first:
            return
        if len(gens) >= gen_budget:
            raise SizeError(f"pullback exceeds {gen_budget} generators")
        gens.append((src, lab, dst))
        first[lab] = tuple(w_labels)
        second[lab] = tuple(h_labels)

    for bs, h, bd in g.source.generators:
        img = Path(g.object_map[bs], g.gen_map[h], g.object_map[bd])
        for w in lifts(f, img):
            add((w.src, bs), w.labels, (h,), (w.dst, bd), h)
    for s, k, d in f.collapsing():
        for b in g.source.objects:
            add((s, b), (k,), (), (d, b), ("id", b))
    return _Pullback(FreeCat(objs, gens), first, second)


def cat_apply(t: CatTransducer, m: CatFsa) -> CatFsa:
    """Pull the automaton back along the left functor and push forward along the right."""
    if t.left.target != m.base_cat:
        raise InputError("transducer left functor does not target the automaton's base")
    pb = _pullback(m.tau, t.left)
    cat = pb.cat
    obj_map = {(q, y): t.right.object_map[y] for q, y in cat.objects}
    gen_map = {lab: tuple(x for h in pb.second[lab] for x in t.right.gen_map[h])
               for _, lab, _ in cat.generators}
    start_t = t.left_preimage(m.tau.object_map[m.q0])
    finals = []
    for qf in m.finals:
        y = t.left_preimage(m.tau.object_map[qf])
        if y is not None:
            finals.append((qf, y))
    if start_t is None or not cat.objects:
        sink = ("empty",)
        target_obj = t.right.target.objects[0]
        empty = FreeCat((sink,), ())
        tau = CatFunctor(empty, t.right.target, {sink: target_obj}, {})
        return CatFsa(empty, t.right.target, tau, sink, ())
    tau = CatFunctor(cat, t.right.target, obj_map, gen_map)
    return CatFsa(cat, t.right.target, tau, (m.q0, start_t), finals)


def cat_compose(t2: CatTransducer, t1: CatTransducer) -> CatTransducer:
    """t2 after t1, over the pullback of t1's right functor and t2's left functor."""
    if t1.right.target != t2.left.target:
        raise InputError("transducers do not chain")
    pb = _pullback(t1.right, t2.left)
    cat = pb.cat
    left = CatFunctor(cat, t1.left.target,
                      {(a, b): t1.left.object_map[a] for a, b in cat.objects},
                      {lab: tuple(x for h in pb.first[lab] for x in t1.left.gen_map[h])
                       for _, lab, _ in cat.generators})
    right = CatFunctor(cat, t2.right.target,
                       {(a, b): t2.right.object_map[b] for a, b in cat.objects},
                       {lab: tuple(x for h in pb.second[lab] for x in t2.right.gen_map[h])
                        for _, lab, _ in cat.generators})
    return CatTransducer(cat, left, right)


def encode_transducer(alpha, beta, in_alphabet, out_alphabet) -> CatTransducer:
    """One-object transducer for a pair of homomorphisms with a universal core."""
    mid = tuple(alpha.source)
    core = single_object_cat(mid, "t")
    left = CatFunctor(core, single_object_cat(in_alphabet), {"t": "*"},
                      {a: alpha.images[a] for a in mid})
    right = CatFunctor(core, single_object_cat(out_alphabet), {"t": "*"},
                       {a: beta.images[a] for a in mid})
    return CatTransducer(core, left, right)


@dataclass
class CatNaturalityReport:
    squares: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s["commutes"] for s in self.squares)

    def failing(self) -> list:
        return [s for s in self.squares if not s["commutes"]]


def _half_vectors(m: CatFsa, basis: list):
    start = np.array([[x == m.q0] for x in basis], dtype=bool).reshape(len(basis), 1)
    end = np.array([[x in set(m.finals) for x in basis]], dtype=bool).reshape(1, len(basis))
    return BoolMat(start), BoolMat(end)


def _restricted_t(m: CatFsa, phi: Path, basis: list) -> BoolMat:
    full = t_phi(m, phi, bound=len(phi))
    idx = {x: i for i, x in enumerate(m.states_cat.objects)}
    pos = [idx[x] for x in basis]
    return BoolMat(full.array[np.ix_(pos, pos)])


def gamma_matrix(t: CatTransducer, m: CatFsa, target: CatFsa, corrupt=None) -> tuple:
    """The map q -> (q, left^-1 tau(q)) on the kept states, as a matrix."""
    images = set(t.left.object_map.values())
    basis = [q for q in m.states_cat.objects if m.tau.object_map[q] in images]
    tbasis = list(target.states_cat.objects)
    arr = np.zeros((len(tbasis), len(basis)), dtype=bool)
    tidx = {x: i for i, x in enumerate(tbasis)}
    for j, q in enumerate(basis):
        y = t.left_preimage(m.tau.object_map[q])
        key = (q, y)
        if corrupt is not None:
            key = corrupt(key)
        if key in tidx:
            arr[tidx[key], j] = True
    return basis, tbasis, BoolMat(arr.reshape(len(tbasis), len(basis)))


def _cup(n):
    return BoolMat(np.eye(n, dtype=bool).reshape(n * n, 1))


def _cap(n):
    return BoolMat(np.eye(n, dtype=bool).reshape(1, n * n))


def cat_naturality_check(t: CatTransducer, m: CatFsa, probe_paths=None,
                         corrupt=None) -> CatNaturalityReport:
    """Check the naturality squares of q -> (q, left^-1 tau(q)).

    probe_paths are paths in the transducer's states category (default: all
    generators).  corrupt, when given, rewrites the image pairs of the map
    and exists for negative controls.
    """
    target = cat_apply(t, m)
    basis, tbasis, g = gamma_matrix(t, m, target, corrupt)
    report = CatNaturalityReport()

    def record(name, lhs: BoolMat, rhs: BoolMat, source_labels):
        entry = {"probe": name, "commutes": lhs == rhs}
        if not entry["commutes"]:
            i, j = (int(x) for x in np.argwhere(lhs.array ^ rhs.array)[0])
            entry["witness"] = {"basis_vector": str(_js(source_labels[j])), "row": i}
        report.squares.append(entry)

    if probe_paths is None:
        probe_paths = [Path(s, (lab,), d) for s, lab, d in t.states_cat.generators]
        probe_paths += [identity_path(x) for x in t.states_cat.objects]
    for w in probe_paths:
        a_op = _restricted_t(m, t.left(w), basis)
        b_op = _restricted_t(target, t.right(w), tbasis)
        record(f"path {w}", bmat_mul(b_op, g), bmat_mul(g, a_op), basis)
    n, nt = len(basis), len(tbasis)
    gg = bmat_kron(g, g)
    pairs = [(x, y) for x in basis for y in basis]
    record("cup", bmat_mul(gg, _cup(n)), _cup(nt), ["1"])
    record("cap", bmat_mul(_cap(nt), gg), _cap(n), pairs)
    s_src, e_src = _half_vectors(m, basis)
    s_tgt, e_tgt = _half_vectors(target, tbasis)
    record("half_start", bmat_mul(g, s_src), s_tgt, ["1"])
    record("half_end", bmat_mul(e_tgt, g), e_src, basis)
    return report


def freecat_from_json(obj: dict) -> FreeCat:
    try:
        return FreeCat(obj["objects"], [tuple(g) for g in obj["generators"]])
    except KeyError as exc:
        raise InputError(f"free category is missing {exc.args[0]!r}") from exc


def functor_from_json(obj: dict, source: FreeCat, target: FreeCat) -> CatFunctor:
    try:
        return CatFunctor(source, target, dict(obj["objects"]),
                          {k: tuple(v) for k, v in obj["generators"].items()})
    except KeyError as exc:
        raise InputError(f"functor is missing {exc.args[0]!r}") from exc


def catfsa_from_json(obj: dict) -> CatFsa:
    try:
        states = freecat_from_json(obj["states"])
        base = freecat_from_json(obj["base"])
        tau = functor_from_json(obj["tau"], states, base)
        finals = obj.get("finals", [obj["final"]] if "final" in obj else [])
        return CatFsa(states, base, tau, obj["initial"], tuple(finals))
    except KeyError as exc:
        raise InputError(f"categorical automaton is missing {exc.args[0]!r}") from exc


def cattransducer_from_json(obj: dict) -> CatTransducer:
    try:
        states = freecat_from_json(obj["states"])
        left_t = freecat_from_json(obj["left_target"])
        right_t = freecat_from_json(obj["right_target"])
        return CatTransducer(states, functor_from_json(obj["left"], states, left_t),
                             functor_from_json(obj["right"], states, right_t))
    except KeyError as exc:
        raise InputError(f"categorical transducer is missing {exc.args[0]!r}") from exc
