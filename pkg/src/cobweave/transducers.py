"""Rational transductions in (alpha, beta, core) normal form, acting on automata."""

from __future__ import annotations

from dataclasses import dataclass

from .automata import (Fsa, InputError, MonoidHom, Psa, as_word,
                       fsa_from_json, hom_from_json, image, preimage, product,
                       universal_fsa)
from .boolsemi import BudgetExceeded


@dataclass(frozen=True)
class Transducer:
    """Computes w -> beta(alpha^-1(w) & L(core)) over a middle alphabet."""

    alpha: MonoidHom
    beta: MonoidHom
    core: Fsa

    def __post_init__(self):
        mid = tuple(self.core.alphabet)
        if set(self.alpha.source) != set(mid) or set(self.beta.source) != set(mid):
            raise InputError("alpha, beta and the core must share the middle alphabet")

    @property
    def mid_alphabet(self) -> tuple:
        return tuple(self.core.alphabet)

    @classmethod
    def identity(cls, alphabet) -> "Transducer":
        h = MonoidHom.identity(alphabet)
        return cls(h, h, universal_fsa(alphabet))

    def to_json(self) -> dict:
        return {"alpha": self.alpha.to_json(), "beta": self.beta.to_json(),
                "core": self.core.to_json()}


def transducer_from_json(obj: dict, input_alphabet=None, output_alphabet=None) -> Transducer:
    try:
        core = fsa_from_json(obj["core"])
        alpha = hom_from_json(obj["alpha"], core.alphabet, input_alphabet)
        beta = hom_from_json(obj["beta"], core.alphabet, output_alphabet)
    except KeyError as exc:
        raise InputError(f"missing field {exc.args[0]!r} in transducer") from exc
    return Transducer(alpha, beta, core)


def transduce_word(t: Transducer, w, maxmid: int) -> set:
    """Outputs of w, searching middle words of length <= maxmid.

    Raises BudgetExceeded when alpha erases letters and the search hits the
    bound with unexplored middle words still consistent with w.
    """
    w = as_word(w)
    out = set()
    erasing = any(not t.alpha.images[a] for a in t.mid_alphabet)
    succ: dict = {}
    for q, a, r in t.core.transitions:
        succ.setdefault((q, a), set()).add(r)
    # frontier of (consumed prefix length of w, core state set, middle word)
    frontier = [(0, frozenset({t.core.initial}), ())]
    truncated = False
    for depth in range(maxmid + 1):
        nxt = []
        for pos, qs, u in frontier:
            if pos == len(w) and qs & t.core.finals:
                out.add(t.beta(u))
            for a in t.mid_alphabet:
                img = t.alpha.images[a]
                if tuple(w[pos:pos + len(img)]) != img:
                    continue
                rs = frozenset(r for q in qs for r in succ.get((q, a), ()))
                if not rs:
                    continue
                if depth == maxmid:
                    truncated = True
                    continue
                nxt.append((pos + len(img), rs, u + (a,)))
        frontier = nxt
    if truncated and erasing:
        raise BudgetExceeded(f"middle-word bound {maxmid} exhausted with erasing alpha")
    return out


def apply(t: Transducer, m: Fsa | Psa) -> Fsa | Psa:
    """Image of an automaton: beta(core x alpha^-1(m))."""
    if set(t.alpha.target) - set(m.alphabet):
        raise InputError("transducer input alphabet does not match the automaton")
    alpha = MonoidHom(t.alpha.source, m.alphabet, t.alpha.images)
    pulled = preimage(alpha, m)
    if isinstance(pulled, Psa):
        paired = _core_times_psa(t.core, pulled)
    else:
        paired = product(t.core, pulled)
    return image(t.beta, paired)


def _core_times_psa(core: Fsa, m: Psa) -> Psa:
    # product with the finite core listed first, stack data from the pushdown side
    states = [(p, q) for p in core.states for q in m.states]
    finals = [(p, q) for p in core.finals for q in m.finals]
    trans = set()
    for q, x, z, q2, g in m.transitions:
        if x is None:
            trans.update(((p, q), None, z, (p, q2), g) for p in core.states)
        else:
            trans.update(((p, q), x, z, (p2, q2), g)
                         for p, y, p2 in core.transitions if y == x)
    return Psa(states, m.alphabet, trans, (core.initial, m.initial), finals,
               m.stack_alphabet, m.stack_init)


def compose(t2: Transducer, t1: Transducer) -> Transducer:
    """Transducer for t2 after t1."""
    if set(t1.beta.target) - set(t2.alpha.target) and not set(t1.beta.target) <= set(t2.alpha.target):
        raise InputError("output alphabet of the first transducer does not feed the second")
    a1 = [f"1.{a}" for a in t1.mid_alphabet]
    a2 = [f"2.{a}" for a in t2.mid_alphabet]
    mid = tuple(a1 + a2)
    # alpha = alpha1 . pi1 and beta = beta2 . pi2 on the disjoint union
    alpha = MonoidHom(mid, t1.alpha.target,
                      {**{f"1.{a}": t1.alpha.images[a] for a in t1.mid_alphabet},
                       **{x: () for x in a2}})
    beta = MonoidHom(mid, t2.beta.target,
                     {**{x: () for x in a1},
                      **{f"2.{a}": t2.beta.images[a] for a in t2.mid_alphabet}})
    # core: runs interleaving t1 letters and t2 letters so that beta1 of the
    # t1 part is consumed by alpha2 of the t2 part, tracked by a buffer
    return Transducer(alpha, beta, _compose_core(t2, t1, mid))


def _compose_core(t2: Transducer, t1: Transducer, mid: tuple) -> Fsa:
    # Interleaves runs of both cores.  The state carries the mismatch between
    # what beta1 has produced and what alpha2 has consumed: ("+", s) is output
    # of t1 not yet read by t2, ("-", d) is input t2 asked for that t1 has not
    # yet produced.  Both are suffixes of single letter images, so the state
    # space is finite.
    succ1: dict = {}
    for q, a, r in t1.core.transitions:
        succ1.setdefault(q, []).append((a, r))
    succ2: dict = {}
    for q, b, r in t2.core.transitions:
        succ2.setdefault(q, []).append((b, r))

    def settle(mode, buf):
        return ("", ()) if not buf else (mode, buf)

    def feed(pending, supply):
        mode, buf = pending
        if not buf:
            return settle("+", supply)
        if mode == "+":
            return None if supply else pending
        if buf[:len(supply)] == supply:
            return settle("-", buf[len(supply):])
        if supply[:len(buf)] == buf:
            return settle("+", supply[len(buf):])
        return None

    def demand(pending, need):
        mode, buf = pending
        if not buf:
            return settle("-", need)
        if mode == "-":
            return None if need else pending
        if buf[:len(need)] == need:
            return settle("+", buf[len(need):])
        if need[:len(buf)] == buf:
            return settle("-", need[len(buf):])
        return None

    init = (t1.core.initial, t2.core.initial, ("", ()))
    states = [init]
    seen = {init}
    trans = set()
    stack = [init]
    while stack:
        s = stack.pop()
        p1, p2, pending = s
        moves = []
        for a, r in succ1.get(p1, ()):
            nxt = feed(pending, t1.beta.images[a])
            if nxt is not None:
                moves.append((f"1.{a}", (r, p2, nxt)))
        for b, r in succ2.get(p2, ()):
            nxt = demand(pending, t2.alpha.images[b])
            if nxt is not None:
                moves.append((f"2.{b}", (p1, r, nxt)))
        for x, s2 in moves:
            trans.add((s, x, s2))
            if s2 not in seen:
                seen.add(s2)
                states.append(s2)
                stack.append(s2)
    finals = [s for s in states
              if s[0] in t1.core.finals and s[1] in t2.core.finals and not s[2][1]]
    return Fsa(states, mid, trans, init, finals)
