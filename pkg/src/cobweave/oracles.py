"""Slow reference semantics, written without the matrix and construction code.

Used by the test suite and by `cobweave suite` to cross-check results.
"""

from __future__ import annotations

import itertools
from collections import deque


def nfa_accepts(m, w) -> bool:
    """Plain set simulation over the transition triples."""
    step: dict = {}
    for q, a, r in m.transitions:
        step.setdefault((q, a), set()).add(r)
    cur = {m.initial}
    for a in w:
        cur = {r for q in cur for r in step.get((q, a), ())}
        if not cur:
            return False
    return bool(cur & set(m.finals))


def nfa_language(m, maxlen: int) -> set:
    out = set()
    for n in range(maxlen + 1):
        for w in itertools.product(m.alphabet, repeat=n):
            if nfa_accepts(m, w):
                out.add(w)
    return out


def _hom_image(images: dict, w) -> tuple:
    return tuple(x for a in w for x in images[a])


def transduction(t, m, maxlen: int) -> set:
    """Outputs beta(u) of length <= maxlen for u in L(core) with alpha(u) in L(m).

    Searches over (core state, set of m states reached by alpha of the prefix,
    output so far); the node set is finite for bounded output, so erasing
    letters on either side are handled without a length bound on u.
    """
    step: dict = {}
    for q, a, r in m.transitions:
        step.setdefault((q, a), set()).add(r)
    core_step: dict = {}
    for q, a, r in t.core.transitions:
        core_step.setdefault(q, []).append((a, r))

    def run(states, word):
        for a in word:
            states = frozenset(r for q in states for r in step.get((q, a), ()))
        return states

    start = (t.core.initial, frozenset({m.initial}), ())
    seen = {start}
    queue = deque([start])
    finals, core_finals = set(m.finals), set(t.core.finals)
    out = set()
    while queue:
        c, ms, o = queue.popleft()
        if c in core_finals and ms & finals:
            out.add(o)
        for a, r in core_step.get(c, ()):
            o2 = o + tuple(t.beta.images[a])
            if len(o2) > maxlen:
                continue
            ms2 = run(ms, t.alpha.images[a])
            if not ms2:
                continue
            node = (r, ms2, o2)
            if node not in seen:
                seen.add(node)
                queue.append(node)
    return out


def balanced(w, opener="(", closer=")") -> bool:
    depth = 0
    for x in w:
        if x == opener:
            depth += 1
        elif x == closer:
            depth -= 1
            if depth < 0:
                return False
        else:
            return False
    return depth == 0


def balanced_words(maxlen: int, opener="(", closer=")") -> set:
    return {w for n in range(0, maxlen + 1, 2)
            for w in itertools.product((opener, closer), repeat=n) if balanced(w, opener, closer)}


def path_runs(m, labels) -> set:
    """(start, end) state pairs of runs of a categorical automaton over a base path.

    Explores lifts generator by generator: a state generator whose image is
    a (possibly empty) run of base labels consumes that run.
    """
    images = {}
    for src, lab, dst in m.states_cat.generators:
        images.setdefault(src, []).append((tuple(m.tau.gen_map[lab]), dst))
    labels = tuple(labels)
    base_src = None
    if labels:
        for s, lab, _ in m.base_cat.generators:
            if lab == labels[0]:
                base_src = s
    out = set()
    for q in m.states_cat.objects:
        if labels and m.tau.object_map[q] != base_src:
            continue
        seen = {(q, 0)}
        stack = [(q, 0)]
        while stack:
            x, i = stack.pop()
            if i == len(labels):
                out.add((q, x))
            for img, y in images.get(x, ()):
                if labels[i:i + len(img)] == img:
                    node = (y, i + len(img))
                    if node not in seen:
                        seen.add(node)
                        stack.append(node)
    return out
