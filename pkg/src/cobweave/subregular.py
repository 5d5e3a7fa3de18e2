"""k-factors, strict locality, nilpotent defect operators and Ker/Im quotients."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .automata import Fsa, InputError, as_word, show, trim
from .boolsemi import BoolMat, SizeError, vec

LEFT, RIGHT = "⋊", "⋉"


@dataclass(frozen=True)
class FactorSet:
    """Length-k factors of a language.

    With markers, factors are read off LEFT + w + RIGHT for accepted nonempty
    w whose marked form has length >= k; accepted words too short to carry a
    k-factor are listed in short_words instead (the empty word included).
    """

    k: int
    factors: frozenset
    with_markers: bool = False
    short_words: frozenset = field(default_factory=frozenset)

    def strings(self) -> list:
        return sorted(show(f) for f in self.factors)


def k_factors(m: Fsa, k: int, markers: bool = False) -> FactorSet:
    if k < 2:
        raise InputError("k must be at least 2")
    m = trim(m)
    # every transition of a trimmed machine lies on an accepting run, so
    # factors are exactly the windows seen while exploring (state, window)
    start = (m.initial, (LEFT,) if markers else ())
    seen = {start}
    stack = [start]
    factors = set()
    short = set()
    succ: dict = {}
    for q, a, r in m.transitions:
        succ.setdefault(q, []).append((a, r))
    while stack:
        q, win = stack.pop()
        if markers and q in m.finals:
            full = win + (RIGHT,)
            if full == (LEFT, RIGHT) or len(full) < k:
                short.add(full[1:-1])
            elif len(full) == k:
                factors.add(full)
        for a, r in succ.get(q, ()):
            nxt = win + (a,)
            if len(nxt) == k:
                factors.add(nxt)
                nxt = nxt[1:]
            node = (r, nxt)
            if node not in seen:
                seen.add(node)
                stack.append(node)
    return FactorSet(k, frozenset(factors), markers, frozenset(short))


@dataclass(frozen=True)
class NilpotencyEntry:
    first: tuple
    second: tuple
    is_zero: bool
    reversed_is_zero: bool


def nilpotency_report(m: Fsa, k: int) -> list:
    """Zero tests for operator chains of forbidden k-factors.

    For a forbidden factor w = first + second, is_zero tests the chain that
    applies first then second (the run order); reversed_is_zero tests the
    opposite matrix order.
    """
    m = trim(m)
    allowed = k_factors(m, k).factors
    out = []
    for w in itertools.product(m.alphabet, repeat=k):
        if w in allowed:
            continue
        for cut in range(1, k):
            w1, w2 = w[:cut], w[cut:]
            t1, t2 = m.word_matrix(w1), m.word_matrix(w2)
            out.append(NilpotencyEntry(w1, w2, (t2 @ t1).is_zero(), (t1 @ t2).is_zero()))
    return out


@dataclass
class CohomologyReport:
    ker_size: int
    im_size: int
    quotient_size: int
    class_representatives: list
    im_in_ker: bool


def cohomology_cap() -> int:
    return 12


def cohomology(m: Fsa, w_ker, w_im, cap: int | None = None) -> CohomologyReport:
    """Ker(T_{w_ker}) modulo the image of T_{w_im}, by exhaustive enumeration."""
    n = len(m.states)
    cap = cohomology_cap() if cap is None else cap
    if n > cap:
        raise SizeError(f"{n} states exceed the enumeration cap {cap}")
    ker_op = m.word_matrix(as_word(w_ker)).array
    im_op = m.word_matrix(as_word(w_im)).array
    return _quotient(ker_op, im_op, n)


def operator_cohomology(ker_op: BoolMat, im_op: BoolMat) -> CohomologyReport:
    n = ker_op.cols
    if n > cohomology_cap():
        raise SizeError(f"dimension {n} exceeds the enumeration cap")
    return _quotient(ker_op.array, im_op.array, n)


def _apply_mask(op, mask: int, n: int) -> int:
    out = 0
    for j in range(n):
        if mask >> j & 1:
            for i in range(op.shape[0]):
                if op[i, j]:
                    out |= 1 << i
    return out


def _quotient(ker_op, im_op, n: int) -> CohomologyReport:
    everything = range(1 << n)
    kernel = [v for v in everything if _apply_mask(ker_op, v, n) == 0]
    image = sorted({_apply_mask(im_op, u, n) for u in everything})
    kset = set(kernel)
    down = {d for d in everything if any(d & ~i == 0 for i in image)}
    # x ~ y when x | i == y | j for some i, j below the image; close transitively
    parent = {x: x for x in kernel}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    owner: dict = {}
    for x in kernel:
        for d in down:
            key = x | d
            if key in owner:
                a, b = find(x), find(owner[key])
                if a != b:
                    parent[max(a, b)] = min(a, b)
            else:
                owner[key] = x
    classes = sorted({find(x) for x in kernel})
    reps = [vec((x >> i) & 1 for i in range(n)) for x in classes]
    return CohomologyReport(len(kernel), len(image), len(classes), reps,
                            all(i in kset for i in image))


def lt_membership(w, required, ordered: bool = False) -> bool:
    """Whether every required factor occurs in w.

    required is a FactorSet or a collection of factors.  With ordered=True
    the factors must occur in the given order without overlapping.
    """
    w = as_word(w)
    markers = isinstance(required, FactorSet) and required.with_markers
    facs = required.factors if isinstance(required, FactorSet) else required
    facs = [as_word(u) for u in facs]
    if markers:
        w = (LEFT,) + w + (RIGHT,)
    if not ordered:
        return all(_find(w, u, 0) >= 0 for u in facs)
    pos = 0
    for u in facs:
        hit = _find(w, u, pos)
        if hit < 0:
            return False
        pos = hit + len(u)
    return True


def _find(w: tuple, u: tuple, start: int) -> int:
    for i in range(start, len(w) - len(u) + 1):
        if w[i:i + len(u)] == u:
            return i
    return -1


def dfa_cap() -> int:
    return 4096


def sl_scanner(fs: FactorSet, alphabet) -> Fsa:
    """Deterministic automaton for words all of whose marked k-factors are allowed."""
    if not fs.with_markers:
        raise InputError("the scanner needs a marker factor set")
    k = fs.k
    start = (LEFT,)
    states, trans = [start], set()
    stack = [start]
    while stack:
        win = stack.pop()
        for a in alphabet:
            nxt = win + (a,)
            if len(nxt) == k:
                if nxt not in fs.factors:
                    continue
                nxt = nxt[1:]
            trans.add((win, a, nxt))
            if nxt not in states:
                states.append(nxt)
                stack.append(nxt)
    finals = []
    for win in states:
        full = win + (RIGHT,)
        if win[0] == LEFT and full[1:-1] in fs.short_words:
            finals.append(win)
        elif len(full) == k and full != (LEFT, RIGHT) and full in fs.factors:
            finals.append(win)
    return Fsa(states, tuple(alphabet), trans, start, finals)


def determinize(m: Fsa, cap: int | None = None) -> Fsa:
    cap = dfa_cap() if cap is None else cap
    start = frozenset({m.initial})
    states, trans = [start], set()
    stack = [start]
    while stack:
        s = stack.pop()
        for a in m.alphabet:
            t = m.successors(s, a)
            trans.add((s, a, t))
            if t not in states:
                if len(states) >= cap:
                    raise SizeError(f"subset construction exceeds {cap} states")
                states.append(t)
                stack.append(t)
    finals = [s for s in states if s & m.finals]
    return Fsa(states, m.alphabet, trans, start, finals)


def equivalent(a: Fsa, b: Fsa) -> bool:
    """Language equality via the product of determinized machines."""
    if set(a.alphabet) != set(b.alphabet):
        raise InputError("alphabets differ")
    da, db = determinize(a), determinize(b)
    da_succ = {(q, x): r for q, x, r in da.transitions}
    db_succ = {(q, x): r for q, x, r in db.transitions}
    start = (da.initial, db.initial)
    seen = {start}
    stack = [start]
    while stack:
        p, q = stack.pop()
        # a reachable pair accepted by one side only witnesses a difference
        if (p in da.finals) != (q in db.finals):
            return False
        for x in a.alphabet:
            nxt = (da_succ[p, x], db_succ[q, x])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return True


def sl_check(m: Fsa, k: int) -> bool:
    fs = k_factors(m, k, markers=True)
    return equivalent(m, sl_scanner(fs, m.alphabet))
