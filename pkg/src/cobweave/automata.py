"""Nondeterministic finite-state and pushdown automata.

Words are tuples of letters.  Plain strings are accepted wherever a word is
expected and are split into single characters.
"""

from __future__ import annotations

import itertools
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .boolsemi import BoolMat, BudgetExceeded, SizeError

State = Hashable
Letter = str
Word = tuple

EPS_JSON = "eps"


class InputError(ValueError):
    """Malformed or inconsistent input."""


def as_word(w) -> Word:
    if isinstance(w, str):
        return tuple(w)
    return tuple(w)


def show(w: Sequence[Letter]) -> str:
    return "".join(w)


def language_bound() -> int:
    env = os.environ.get("COBWEAVE_BUDGET")
    if env:
        try:
            return max(12, int(env))
        except ValueError:
            pass
    return 12


def config_budget() -> int:
    env = os.environ.get("COBWEAVE_BUDGET")
    if env:
        try:
            return max(int(env), 1) * 1000
        except ValueError:
            pass
    return 200_000


def _ordered(xs: Iterable) -> tuple:
    seen = []
    for x in xs:
        if x not in seen:
            seen.append(x)
    return tuple(seen)


@dataclass(frozen=True)
class MonoidHom:
    """Monoid homomorphism of free monoids, fixed by the image of each letter."""

    source: tuple
    target: tuple
    images: dict = field(hash=False, compare=True)

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        imgs = {a: as_word(w) for a, w in dict(self.images).items()}
        object.__setattr__(self, "images", imgs)
        for a in self.source:
            if a not in imgs:
                raise InputError(f"letter {a!r} has no image")
            bad = [b for b in imgs[a] if b not in self.target]
            if bad:
                raise InputError(f"image of {a!r} uses letters {bad} outside the target alphabet")

    def __hash__(self):
        return hash((self.source, self.target, tuple(sorted(self.images.items()))))

    def __call__(self, w) -> Word:
        out: list = []
        for a in as_word(w):
            if a not in self.images:
                raise InputError(f"letter {a!r} not in the source alphabet")
            out.extend(self.images[a])
        return tuple(out)

    @classmethod
    def identity(cls, alphabet) -> "MonoidHom":
        alphabet = tuple(alphabet)
        return cls(alphabet, alphabet, {a: (a,) for a in alphabet})

    def after(self, other: "MonoidHom") -> "MonoidHom":
        """The composite self . other (apply other first)."""
        if tuple(other.target) != tuple(self.source) and not set(other.target) <= set(self.source):
            raise InputError("homomorphisms do not chain")
        return MonoidHom(other.source, self.target, {a: self(other.images[a]) for a in other.source})

    def is_letter_injective(self) -> bool:
        imgs = [self.images[a] for a in self.source]
        return all(len(w) == 1 for w in imgs) and len(set(imgs)) == len(imgs)

    def to_json(self) -> dict:
        return {a: list(self.images[a]) for a in self.source}


@dataclass(frozen=True)
class Fsa:
    states: tuple
    alphabet: tuple
    transitions: frozenset
    initial: State
    finals: frozenset

    def __post_init__(self):
        object.__setattr__(self, "states", _ordered(self.states))
        object.__setattr__(self, "alphabet", _ordered(self.alphabet))
        object.__setattr__(self, "transitions", frozenset(tuple(t) for t in self.transitions))
        object.__setattr__(self, "finals", frozenset(self.finals))
        sset = set(self.states)
        if self.initial not in sset:
            raise InputError(f"initial state {self.initial!r} is not a state")
        if not self.finals <= sset:
            raise InputError(f"final states {sorted(map(str, self.finals - sset))} are not states")
        aset = set(self.alphabet)
        for q, a, r in self.transitions:
            if q not in sset or r not in sset:
                raise InputError(f"transition {(q, a, r)!r} uses an unknown state")
            if a not in aset:
                raise InputError(f"transition {(q, a, r)!r} uses a letter outside the alphabet")

    @property
    def index(self) -> dict:
        if "_index" not in self.__dict__:
            self.__dict__["_index"] = {q: i for i, q in enumerate(self.states)}
        return self.__dict__["_index"]

    def letter_matrix(self, a: Letter) -> BoolMat:
        """Matrix of q -> sum of a-successors of q (column = source state)."""
        cache = self.__dict__.setdefault("_letter_cache", {})
        if a not in cache:
            if a not in self.alphabet:
                raise InputError(f"letter {a!r} not in alphabet {list(self.alphabet)}")
            idx = self.index
            n = len(self.states)
            arr = np.zeros((n, n), dtype=bool)
            for q, b, r in self.transitions:
                if b == a:
                    arr[idx[r], idx[q]] = True
            cache[a] = BoolMat(arr)
        return cache[a]

    def word_matrix(self, w) -> BoolMat:
        out = BoolMat.identity(len(self.states))
        for a in as_word(w):
            out = self.letter_matrix(a) @ out
        return out

    def step_table(self) -> dict:
        """(state, letter) -> tuple of successor states."""
        if "_step" not in self.__dict__:
            step: dict = {}
            for q, a, r in self.transitions:
                step.setdefault((q, a), []).append(r)
            self.__dict__["_step"] = {k: tuple(v) for k, v in step.items()}
        return self.__dict__["_step"]

    def successors(self, qs: Iterable[State], a: Letter) -> frozenset:
        qs = set(qs)
        return frozenset(r for q, b, r in self.transitions if b == a and q in qs)

    def to_json(self) -> dict:
        return {
            "states": [_state_json(q) for q in self.states],
            "alphabet": list(self.alphabet),
            "transitions": sorted([_state_json(q), a, _state_json(r)] for q, a, r in
                                  sorted(self.transitions, key=repr)),
            "initial": _state_json(self.initial),
            "finals": sorted(_state_json(q) for q in self.finals),
        }


@dataclass(frozen=True)
class Psa:
    """Pushdown automaton accepting by final state with input consumed.

    A transition (q, a, z, q2, push) pops the top symbol z and pushes the
    string push, whose first symbol becomes the new top.  a is None for an
    epsilon move.
    """

    states: tuple
    alphabet: tuple
    transitions: frozenset
    initial: State
    finals: frozenset
    stack_alphabet: tuple
    stack_init: str

    def __post_init__(self):
        object.__setattr__(self, "states", _ordered(self.states))
        object.__setattr__(self, "alphabet", _ordered(self.alphabet))
        object.__setattr__(self, "stack_alphabet", _ordered(self.stack_alphabet))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(
            self, "transitions",
            frozenset((q, a, z, r, tuple(g)) for q, a, z, r, g in self.transitions))
        sset = set(self.states)
        if self.initial not in sset or not self.finals <= sset:
            raise InputError("initial or final state missing from the state set")
        if self.stack_init not in self.stack_alphabet:
            raise InputError(f"initial stack symbol {self.stack_init!r} not in the stack alphabet")
        gset, aset = set(self.stack_alphabet), set(self.alphabet)
        for q, a, z, r, g in self.transitions:
            if q not in sset or r not in sset:
                raise InputError(f"transition {(q, a, z, r, g)!r} uses an unknown state")
            if a is not None and a not in aset:
                raise InputError(f"transition {(q, a, z, r, g)!r} uses a letter outside the alphabet")
            if z not in gset or not set(g) <= gset:
                raise InputError(f"transition {(q, a, z, r, g)!r} uses an unknown stack symbol")

    def to_json(self) -> dict:
        return {
            "states": [_state_json(q) for q in self.states],
            "alphabet": list(self.alphabet),
            "stack_alphabet": list(self.stack_alphabet),
            "stack_init": self.stack_init,
            "transitions": sorted(
                [_state_json(q), EPS_JSON if a is None else a, z, _state_json(r), list(g)]
                for q, a, z, r, g in self.transitions),
            "initial": _state_json(self.initial),
            "finals": sorted(_state_json(q) for q in self.finals),
        }


def _state_json(q):
    if isinstance(q, tuple):
        return "(" + ",".join(str(_state_json(x)) for x in q) + ")"
    return q


def _check_word(m, w) -> Word:
    w = as_word(w)
    letters = m.__dict__.get("_letters")
    if letters is None:
        letters = m.__dict__["_letters"] = frozenset(m.alphabet)
    for a in w:
        if a not in letters:
            raise InputError(f"letter {a!r} not in alphabet {list(m.alphabet)}")
    return w


def fsa_accepts(m: Fsa, w) -> bool:
    w = _check_word(m, w)
    step = m.step_table()
    # subset transitions are memoized per machine, which amounts to a lazy DFA
    memo = m.__dict__.setdefault("_subset_step", {})
    cur = frozenset({m.initial})
    for a in w:
        nxt = memo.get((cur, a))
        if nxt is None:
            nxt = memo[cur, a] = frozenset(r for q in cur for r in step.get((q, a), ()))
        cur = nxt
        if not cur:
            return False
    return not cur.isdisjoint(m.finals)


def psa_accepts(m: Psa, w, budget: int | None = None) -> bool:
    w = _check_word(m, w)
    budget = config_budget() if budget is None else budget
    max_push = max((len(g) for *_, g in m.transitions), default=1)
    height_cap = len(w) * max_push + len(w) + 1
    by_src: dict = {}
    for t in m.transitions:
        by_src.setdefault((t[0], t[2]), []).append(t)
    start = (m.initial, 0, (m.stack_init,))
    seen = {start}
    queue = deque([start])
    pruned = False
    while queue:
        q, pos, stack = queue.popleft()
        if pos == len(w) and q in m.finals:
            return True
        if not stack:
            continue
        for _, a, _, r, g in by_src.get((q, stack[0]), ()):
            if a is None:
                npos = pos
            elif pos < len(w) and w[pos] == a:
                npos = pos + 1
            else:
                continue
            nstack = g + stack[1:]
            if len(nstack) > height_cap:
                pruned = True
                continue
            cfg = (r, npos, nstack)
            if cfg not in seen:
                if len(seen) >= budget:
                    raise BudgetExceeded(f"configuration budget {budget} exhausted on {show(w)!r}")
                seen.add(cfg)
                queue.append(cfg)
    if pruned:
        raise BudgetExceeded(f"stack height cap {height_cap} reached on {show(w)!r}")
    return False


def accepts(m: Fsa | Psa, w) -> bool:
    return psa_accepts(m, w) if isinstance(m, Psa) else fsa_accepts(m, w)


def product(a: Fsa | Psa, b: Fsa) -> Fsa | Psa:
    if tuple(a.alphabet) != tuple(b.alphabet) and set(a.alphabet) != set(b.alphabet):
        raise InputError(f"alphabets differ: {list(a.alphabet)} vs {list(b.alphabet)}")
    states = [(p, q) for p in a.states for q in b.states]
    finals = [(p, q) for p in a.finals for q in b.finals]
    if isinstance(a, Fsa):
        trans = {((p, q), x, (p2, q2))
                 for p, x, p2 in a.transitions
                 for q, y, q2 in b.transitions if x == y}
        return Fsa(states, a.alphabet, trans, (a.initial, b.initial), finals)
    trans = set()
    for p, x, z, p2, g in a.transitions:
        if x is None:
            trans.update(((p, q), None, z, (p2, q), g) for q in b.states)
        else:
            trans.update(((p, q), x, z, (p2, q2), g)
                         for q, y, q2 in b.transitions if y == x)
    return Psa(states, a.alphabet, trans, (a.initial, b.initial), finals,
               a.stack_alphabet, a.stack_init)


def touching_states(m: Fsa) -> tuple:
    """States that are endpoints of some transition, plus the initial and final states."""
    keep = {m.initial} | set(m.finals)
    for q, _, r in m.transitions:
        keep.update((q, r))
    return tuple(q for q in m.states if q in keep)


def preimage(h: MonoidHom, m: Fsa | Psa) -> Fsa | Psa:
    if set(h.target) - set(m.alphabet):
        raise InputError("homomorphism target is not the automaton alphabet")
    if isinstance(m, Psa):
        return _psa_preimage(h, m)
    idx = m.index
    trans = set()
    for a in h.source:
        mat = m.word_matrix(h.images[a])
        for i, j in mat.support():
            trans.add((m.states[j], a, m.states[i]))
    full = Fsa(m.states, h.source, trans, m.initial, m.finals)
    keep = touching_states(full)
    del idx
    return Fsa(keep, h.source, trans, m.initial, m.finals)


def _psa_preimage(h: MonoidHom, m: Psa) -> Psa:
    # reading a letter a enters a gadget that simulates m on h(a) with epsilon moves
    states = list(m.states)
    trans = set()
    for q, x, z, r, g in m.transitions:
        if x is None:
            trans.add((q, None, z, r, g))
    for a in h.source:
        img = h.images[a]
        gadget = {(q, j): ("pre", q, a, j) for q in m.states for j in range(len(img) + 1)}
        states.extend(gadget.values())
        for q in m.states:
            for z in m.stack_alphabet:
                trans.add((q, a, z, gadget[q, 0], (z,)))
                trans.add((gadget[q, len(img)], None, z, q, (z,)))
        for j, b in enumerate(img):
            for q, x, z, r, g in m.transitions:
                if x == b:
                    trans.add((gadget[q, j], None, z, gadget[r, j + 1], g))
        for j in range(len(img) + 1):
            for q, x, z, r, g in m.transitions:
                if x is None:
                    trans.add((gadget[q, j], None, z, gadget[r, j], g))
    return Psa(states, h.source, trans, m.initial, m.finals, m.stack_alphabet, m.stack_init)


def _fresh(edge_id: int, offset: int):
    return ("~", edge_id, offset)


def image(h: MonoidHom, m: Fsa | Psa) -> Fsa | Psa:
    if set(m.alphabet) - set(h.source):
        raise InputError("homomorphism source is not the automaton alphabet")
    if isinstance(m, Psa):
        return _psa_image(h, m)
    states = list(m.states)
    trans = set()
    eps = set()
    for e, (q, a, r) in enumerate(sorted(m.transitions, key=repr)):
        img = h.images[a]
        if not img:
            eps.add((q, r))
            continue
        chain = [q] + [_fresh(e, j) for j in range(1, len(img))] + [r]
        states.extend(chain[1:-1])
        for j, b in enumerate(img):
            trans.add((chain[j], b, chain[j + 1]))
    finals = set(m.finals)
    if eps:
        closure = _eps_closure(states, eps)
        trans = {(q, b, r2) for q in states for p in closure[q]
                 for p2, b, r2 in trans if p2 == p} | trans
        finals = {q for q in states if closure[q] & finals}
    return Fsa(states, h.target, trans, m.initial, finals)


def _eps_closure(states, eps) -> dict:
    succ: dict = {q: set() for q in states}
    for q, r in eps:
        succ[q].add(r)
    closure = {}
    for q in states:
        seen = {q}
        stack = [q]
        while stack:
            for r in succ[stack.pop()]:
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
        closure[q] = seen
    return closure


def _psa_image(h: MonoidHom, m: Psa) -> Psa:
    states = list(m.states)
    trans = set()
    for e, (q, a, z, r, g) in enumerate(sorted(m.transitions, key=repr)):
        img = () if a is None else h.images[a]
        if not img:
            trans.add((q, None, z, r, g))
            continue
        chain = [q] + [_fresh(e, j) for j in range(1, len(img))] + [r]
        states.extend(chain[1:-1])
        for j, b in enumerate(img):
            last = j == len(img) - 1
            trans.add((chain[j], b, z, chain[j + 1], g if last else (z,)))
    return Psa(states, h.target, trans, m.initial, m.finals, m.stack_alphabet, m.stack_init)


def trim(m: Fsa) -> Fsa:
    fwd = _reach({m.initial}, [(q, r) for q, _, r in m.transitions])
    bwd = _reach(set(m.finals), [(r, q) for q, _, r in m.transitions])
    keep = fwd & bwd
    if not keep:
        return Fsa((m.initial,), m.alphabet, (), m.initial, ())
    keep.add(m.initial)
    states = tuple(q for q in m.states if q in keep)
    trans = {(q, a, r) for q, a, r in m.transitions if q in keep and r in keep}
    return Fsa(states, m.alphabet, trans, m.initial, m.finals & keep)


def _reach(start: set, edges) -> set:
    succ: dict = {}
    for q, r in edges:
        succ.setdefault(q, []).append(r)
    seen = set(start)
    stack = list(start)
    while stack:
        for r in succ.get(stack.pop(), ()):
            if r not in seen:
                seen.add(r)
                stack.append(r)
    return seen


def enumerate_language(m: Fsa | Psa, maxlen: int) -> list:
    """All accepted words of length <= maxlen, shortest first, then lexicographic."""
    if maxlen > language_bound():
        raise SizeError(f"maxlen {maxlen} exceeds the configured bound {language_bound()}")
    if isinstance(m, Psa):
        return _psa_enumerate(m, maxlen)
    succ: dict = {}
    for q, a, r in m.transitions:
        succ.setdefault((q, a), set()).add(r)
    out = []
    layer = [((), frozenset({m.initial}))]
    for _ in range(maxlen + 1):
        out.extend(w for w, qs in layer if qs & m.finals)
        nxt = []
        for w, qs in layer:
            for a in m.alphabet:
                rs = frozenset(r for q in qs for r in succ.get((q, a), ()))
                if rs:
                    nxt.append((w + (a,), rs))
        layer = nxt
    return out


def _psa_enumerate(m: Psa, maxlen: int) -> list:
    out = []
    for n in range(maxlen + 1):
        for w in itertools.product(m.alphabet, repeat=n):
            if psa_accepts(m, w):
                out.append(tuple(w))
    return out


def universal_fsa(alphabet) -> Fsa:
    alphabet = tuple(alphabet)
    return Fsa(("u",), alphabet, {("u", a, "u") for a in alphabet}, "u", ("u",))


def empty_fsa(alphabet) -> Fsa:
    return Fsa(("z",), tuple(alphabet), (), "z", ())


def single_final(m: Fsa) -> Fsa:
    """Equivalent automaton whose only non-initial final state is a fresh sink."""
    if len(m.finals) <= 1:
        return m
    end = ("end",)
    trans = set(m.transitions) | {(q, a, end) for q, a, r in m.transitions if r in m.finals}
    finals = {end} | ({m.initial} & set(m.finals))
    return Fsa(m.states + (end,), m.alphabet, trans, m.initial, finals)


def fsa_from_json(obj: dict) -> Fsa:
    try:
        return Fsa(obj["states"], obj["alphabet"], [tuple(t) for t in obj["transitions"]],
                   obj["initial"], obj.get("finals", []))
    except KeyError as exc:
        raise InputError(f"missing field {exc.args[0]!r} in automaton") from exc


def psa_from_json(obj: dict) -> Psa:
    try:
        trans = [(q, None if a == EPS_JSON else a, z, r, tuple(g))
                 for q, a, z, r, g in obj["transitions"]]
        return Psa(obj["states"], obj["alphabet"], trans, obj["initial"], obj.get("finals", []),
                   obj["stack_alphabet"], obj["stack_init"])
    except KeyError as exc:
        raise InputError(f"missing field {exc.args[0]!r} in pushdown automaton") from exc


def machine_from_json(obj: dict) -> Fsa | Psa:
    return psa_from_json(obj) if "stack_alphabet" in obj else fsa_from_json(obj)


def hom_from_json(images: dict, source=None, target=None) -> MonoidHom:
    imgs = {a: as_word(w) if isinstance(w, str) else tuple(w) for a, w in images.items()}
    source = tuple(source) if source is not None else tuple(imgs)
    if target is None:
        target = _ordered(b for w in imgs.values() for b in w)
    return MonoidHom(source, target, imgs)
