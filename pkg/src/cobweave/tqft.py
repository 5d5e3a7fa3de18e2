"""Boolean 1D TQFTs with defects determined by automata, their pullbacks
along monoid homomorphisms, spans of semimodule maps, and the naturality
check for transducers."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .automata import Fsa, InputError, MonoidHom, as_word
from .boolsemi import (BoolMat, ShapeError, SizeError, bmat_kron, bmat_mul,
                       bmat_transpose, entry_cap)
from .cobordism import (PLUS, Compose, Diagram, Gen, Tensor, TypeMismatch,
                        generator_probes, typecheck)
from .transducers import Transducer, apply

CONVENTION = "cup=unit(empty->+-), cap=evaluation(+- ->empty)"


class _Evaluator:
    """Shared evaluation of diagrams given a basis and the defect operators."""

    basis: tuple
    alphabet: tuple

    def letter_operator(self, a) -> BoolMat:
        raise NotImplementedError

    def start_vector(self) -> BoolMat:
        raise NotImplementedError

    def end_covector(self) -> BoolMat:
        raise NotImplementedError

    def word_operator(self, w) -> BoolMat:
        if type(w) is not tuple:
            w = as_word(w)
        # memoized by prefix, so sweeping all words of a length reuses work
        cache = self.__dict__.setdefault("_word_cache", {})
        if w not in cache:
            if len(cache) > 200_000:
                cache.clear()
            if not w:
                cache[w] = BoolMat.identity(len(self.basis))
            else:
                cache[w] = bmat_mul(self.letter_operator(w[-1]), self.word_operator(w[:-1]))
        return cache[w]

    def dim(self, signs) -> int:
        return len(self.basis) ** len(signs)

    def eval(self, d: Diagram) -> BoolMat:
        # constructors already reject mismatched boundaries
        size = self.dim(d.dom) * self.dim(d.cod)
        if size > 4096 and size > entry_cap():
            raise SizeError(f"diagram boundary needs a {self.dim(d.cod)}x{self.dim(d.dom)} matrix")
        return self._eval(d)

    def _eval(self, d: Diagram) -> BoolMat:
        kind = type(d)
        if kind is Compose:
            return bmat_mul(self._eval(d.outer), self._eval(d.inner))
        if kind is Tensor:
            return bmat_kron(self._eval(d.left), self._eval(d.right))
        if kind is Gen:
            return self._gen(d)
        return BoolMat.identity(1)

    def _gen(self, g: Gen) -> BoolMat:
        n = len(self.basis)
        k = g.kind
        if k == "id":
            return BoolMat.identity(n)
        if k == "defect":
            letters = self.__dict__.get("_letters")
            if letters is None:
                letters = self.__dict__["_letters"] = frozenset(self.alphabet)
            for a in g.word:
                if a not in letters:
                    raise InputError(f"defect letter {a!r} not in alphabet {list(self.alphabet)}")
            op = self.word_operator(g.word)
            return op if g.signs[0] == PLUS else bmat_transpose(op)
        if k == "cup":
            return BoolMat(np.eye(n, dtype=bool).reshape(n * n, 1))
        if k == "cap":
            return BoolMat(np.eye(n, dtype=bool).reshape(1, n * n))
        if k == "perm":
            arr = np.zeros((n * n, n * n), dtype=bool)
            for i in range(n):
                for j in range(n):
                    arr[j * n + i, i * n + j] = True
            return BoolMat(arr)
        if k == "half_start":
            return self.start_vector()
        if k == "half_end":
            return self.end_covector()
        if k == "hole":
            raise TypeMismatch(f"cannot evaluate unfilled hole {g.name}")
        raise InputError(f"cannot evaluate generator {k}")

    def basis_labels(self, signs) -> list:
        return [tuple(p) for p in itertools.product(self.basis, repeat=len(signs))]


class TqftFunctor(_Evaluator):
    """The functor sending + to the free semimodule on the states of a machine."""

    def __init__(self, machine: Fsa, convention: str = CONVENTION):
        self.machine = machine
        self.convention = convention
        self.basis = tuple(machine.states)
        self.alphabet = tuple(machine.alphabet)
        self._ops: dict = {}

    def letter_operator(self, a) -> BoolMat:
        if ("letter", a) not in self._ops:
            self._ops["letter", a] = self.machine.letter_matrix(a)
        return self._ops["letter", a]

    def start_vector(self) -> BoolMat:
        if "start" not in self._ops:
            self._ops["start"] = BoolMat.unit(len(self.basis), self.basis.index(self.machine.initial))
        return self._ops["start"]

    def end_covector(self) -> BoolMat:
        if "end" not in self._ops:
            row = np.array([[q in self.machine.finals for q in self.basis]], dtype=bool)
            self._ops["end"] = BoolMat(row.reshape(1, len(self.basis)))
        return self._ops["end"]


def defect_operator(f: TqftFunctor, a) -> BoolMat:
    if a not in f.alphabet:
        raise InputError(f"letter {a!r} not in alphabet {list(f.alphabet)}")
    return f.letter_operator(a)


def eval_diagram(f: _Evaluator, d: Diagram) -> BoolMat:
    return f.eval(d)


def _restrict(mat: BoolMat, rows: list, cols: list) -> BoolMat:
    return BoolMat(mat.array[np.ix_(rows, cols)])


class PullbackFunctor(_Evaluator):
    """Pullback of a TQFT along a homomorphism, restricted to the kept states."""

    def __init__(self, base: TqftFunctor, hom: MonoidHom, kept_states: tuple,
                 fixpoint_states: tuple):
        self.base = base
        self.hom = hom
        self.kept_states = tuple(kept_states)
        self.fixpoint_states = tuple(fixpoint_states)
        self.basis = self.kept_states
        self.alphabet = tuple(hom.source)
        self._pos = [base.basis.index(q) for q in self.kept_states]
        self._ops: dict = {}

    @property
    def consistent(self) -> bool:
        """Whether the path-endpoint set and the fixpoint set coincide."""
        return set(self.kept_states) == set(self.fixpoint_states)

    def letter_operator(self, a) -> BoolMat:
        if a not in self._ops:
            full = self.base.word_operator(self.hom.images[a])
            self._ops[a] = _restrict(full, self._pos, self._pos)
        return self._ops[a]

    def start_vector(self) -> BoolMat:
        return _restrict(self.base.start_vector(), self._pos, [0])

    def end_covector(self) -> BoolMat:
        return _restrict(self.base.end_covector(), [0], self._pos)


def _touching(m: Fsa, ops: list) -> set:
    keep = set()
    for op in ops:
        for i, j in op.support():
            keep.update((m.states[i], m.states[j]))
    return keep


def modified_pullback(f: TqftFunctor, h: MonoidHom) -> PullbackFunctor:
    m = f.machine
    if set(h.target) - set(m.alphabet):
        raise InputError("homomorphism target is not the machine alphabet")
    ops = [f.word_operator(h.images[a]) for a in h.source]
    anchored = {m.initial} | set(m.finals)
    endpoints = _touching(m, ops) | anchored
    kept = tuple(q for q in m.states if q in endpoints)
    return PullbackFunctor(f, h, kept, tuple(q for q in m.states if q in _fixpoint(m, ops, anchored)))


def _fixpoint(m: Fsa, ops: list, anchored: set) -> set:
    # Largest state set S whose span is invariant under every image operator
    # and its dual, and in which every state is anchored or linked to S by an
    # image operator.  Computed by deleting offending states until stable.
    idx = {q: i for i, q in enumerate(m.states)}
    arrs = [op.array for op in ops]
    cur = set(m.states)
    while True:
        nxt = set()
        for q in cur:
            i = idx[q]
            linked = any(
                any(a[idx[r], i] or a[i, idx[r]] for r in cur) for a in arrs)
            closed = all(
                m.states[k] in cur for a in arrs for k in np.nonzero(a[:, i] | a[i, :])[0])
            if (q in anchored or linked) and closed:
                nxt.add(q)
        if nxt == cur:
            return cur
        cur = nxt


@dataclass(frozen=True)
class SemiSpan:
    """Span X <- Z -> Y of Boolean semimodule maps with free apex B^apex_dim."""

    apex_dim: int
    left: BoolMat
    right: BoolMat

    def __post_init__(self):
        if self.left.cols != self.apex_dim or self.right.cols != self.apex_dim:
            raise ShapeError(f"span legs {self.left.shape}, {self.right.shape} "
                             f"do not start at an apex of dimension {self.apex_dim}")

    @property
    def source_dim(self) -> int:
        return self.left.rows

    @property
    def target_dim(self) -> int:
        return self.right.rows

    def relation(self) -> BoolMat:
        """Boolean relation source -> target carried by the apex."""
        return bmat_mul(self.right, bmat_transpose(self.left))


def span_of_map(m: BoolMat) -> SemiSpan:
    return SemiSpan(m.cols, BoolMat.identity(m.cols), m)


def span_identity(n: int) -> SemiSpan:
    return SemiSpan(n, BoolMat.identity(n), BoolMat.identity(n))


def span_tensor(a: SemiSpan, b: SemiSpan) -> SemiSpan:
    return SemiSpan(a.apex_dim * b.apex_dim, bmat_kron(a.left, b.left), bmat_kron(a.right, b.right))


def span_compose(s2: SemiSpan, s1: SemiSpan) -> SemiSpan:
    """s2 after s1, by pulling back over pairs of apex generators.

    A pair (z, z2) belongs to the apex when the image of z under the right
    leg of s1 meets the image of z2 under the left leg of s2.
    """
    if s1.target_dim != s2.source_dim:
        raise ShapeError(f"span targets {s1.target_dim} and sources {s2.source_dim} differ")
    meet = s1.right.array.T.astype(np.int32) @ s2.left.array.astype(np.int32)
    zs, z2s = np.nonzero(meet)
    if len(zs) * (s1.source_dim + s2.target_dim) > entry_cap():
        raise SizeError(f"pullback apex of {len(zs)} pairs exceeds the cap")
    left = s1.left.array[:, zs].reshape(s1.source_dim, len(zs))
    right = s2.right.array[:, z2s].reshape(s2.target_dim, len(zs))
    return SemiSpan(len(zs), BoolMat(left), BoolMat(right))


def canonical_span(s: SemiSpan) -> SemiSpan:
    """Reduced representative: one apex generator per related basis pair.

    Columns with a zero leg, duplicates, and columns dominated by the
    basis-pair columns they cover are all deleted.  Multiplicities are
    collapsed, so two spans get the same canonical form exactly when they
    carry the same Boolean relation.
    """
    rel = s.relation()
    pairs = sorted((j, i) for i, j in rel.support())
    n = len(pairs)
    left = np.zeros((s.source_dim, n), dtype=bool)
    right = np.zeros((s.target_dim, n), dtype=bool)
    for k, (j, i) in enumerate(pairs):
        left[j, k] = True
        right[i, k] = True
    return SemiSpan(n, BoolMat(left.reshape(s.source_dim, n)), BoolMat(right.reshape(s.target_dim, n)))


def spans_equivalent(a: SemiSpan, b: SemiSpan) -> bool:
    return canonical_span(a) == canonical_span(b)


@dataclass
class NaturalityReport:
    squares: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(sq["commutes"] for sq in self.squares)

    def failing(self) -> list:
        return [sq for sq in self.squares if not sq["commutes"]]

    def to_json(self) -> list:
        return list(self.squares)


def _label(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join(_label(y) for y in x) + ")"
    return str(x)


def _gamma_strand(source: tuple, target: tuple, pairs: list) -> SemiSpan:
    left = np.zeros((len(source), len(pairs)), dtype=bool)
    right = np.zeros((len(target), len(pairs)), dtype=bool)
    for k, (p, q) in enumerate(pairs):
        if q in source:
            left[source.index(q), k] = True
        right[target.index(p), k] = True
    return SemiSpan(len(pairs), BoolMat(left.reshape(len(source), len(pairs))),
                    BoolMat(right.reshape(len(target), len(pairs))))


def _gamma(strand: SemiSpan, signs) -> SemiSpan:
    out = span_identity(1)
    for _ in signs:
        out = span_tensor(out, strand)
    return out


def naturality_data(t: Transducer, m: Fsa):
    """The two pulled-back functors and the pair states of the transformed machine."""
    alpha = MonoidHom(t.alpha.source, m.alphabet, t.alpha.images)
    pulled = modified_pullback(TqftFunctor(m), alpha)
    tm = apply(t, m)
    beta = MonoidHom(t.beta.source, tm.alphabet, t.beta.images)
    pushed = modified_pullback(TqftFunctor(tm), beta)
    core_states = set(t.core.states)
    pairs = [(p, p[1]) for p in pushed.kept_states
             if isinstance(p, tuple) and len(p) == 2 and p[0] in core_states
             and p[1] in set(m.states) and p[0] != "~"]
    return pulled, pushed, pairs


def check_naturality(t: Transducer, m: Fsa, probes=None, drop_pair=None) -> NaturalityReport:
    """Compare the two composite spans of every naturality square.

    drop_pair removes one pair state from the transformation; it exists to
    build negative controls.
    """
    pulled, pushed, pairs = naturality_data(t, m)
    report = NaturalityReport()
    if not pulled.consistent:
        report.notes.append({"kept_states": [_label(q) for q in pulled.kept_states],
                             "fixpoint_states": [_label(q) for q in pulled.fixpoint_states]})
    if drop_pair is not None:
        pairs = [pq for pq in pairs if pq[0] != drop_pair]
    strand = _gamma_strand(pulled.basis, pushed.basis, pairs)
    if probes is None:
        probes = generator_probes(t.mid_alphabet)
    for c in probes:
        typecheck(c)
        a_map = pulled.eval(c)
        b_map = pushed.eval(c)
        lhs = span_compose(_gamma(strand, c.cod), span_of_map(a_map))
        rhs = span_compose(span_of_map(b_map), _gamma(strand, c.dom))
        l_rel, r_rel = lhs.relation(), rhs.relation()
        entry = {"probe": str(c), "commutes": l_rel == r_rel}
        if not entry["commutes"]:
            diff = (l_rel.array ^ r_rel.array)
            i, j = (int(x) for x in np.argwhere(diff)[0])
            src = pulled.basis_labels(c.dom)[j]
            dst = pushed.basis_labels(c.cod)[i]
            entry["witness"] = {
                "source": [_label(q) for q in src],
                "target": [_label(q) for q in dst],
                "via_transformation_last": bool(l_rel.array[i, j]),
                "via_transformation_first": bool(r_rel.array[i, j]),
            }
        report.squares.append(entry)
    return report
