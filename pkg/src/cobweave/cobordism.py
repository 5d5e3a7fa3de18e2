"""Typed terms for oriented 1D cobordisms with defects.

Objects are tuples of signs "+" and "-".  A term is a generator, a
composition (applied right to left, like functions) or a tensor product.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automata import InputError, as_word, show

PLUS, MINUS = "+", "-"
EMPTY: tuple = ()


class TypeMismatch(InputError):
    """Boundaries of a composite do not match."""


def _signs(s) -> tuple:
    s = tuple(s)
    for x in s:
        if x not in (PLUS, MINUS):
            raise InputError(f"bad sign {x!r}")
    return s


class Diagram:
    dom: tuple
    cod: tuple

    def __matmul__(self, other: "Diagram") -> "Compose":
        """self @ other is self after other."""
        return Compose(self, other)

    def __mul__(self, other: "Diagram") -> "Tensor":
        return Tensor(self, other)

    def generators(self):
        raise NotImplementedError

    def holes(self) -> list:
        return [g for g in self.generators() if g.kind == "hole"]


@dataclass(frozen=True)
class Gen(Diagram):
    """A generating cobordism.

    kind is one of id, cup, cap, perm, half_start, half_end, defect, hole.
    For id and defect, signs holds the one strand sign; for perm it holds the
    two input signs.  A hole carries explicit boundaries.
    """

    kind: str
    signs: tuple = ()
    word: tuple = ()
    name: str = ""
    hole_dom: tuple = ()
    hole_cod: tuple = ()
    dom: tuple = field(init=False, compare=False, repr=False)
    cod: tuple = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.signs:
            object.__setattr__(self, "signs", _signs(self.signs))
        if type(self.word) is not tuple:
            object.__setattr__(self, "word", as_word(self.word))
        k, s = self.kind, self.signs
        if k in ("id", "defect"):
            if len(s) != 1:
                raise InputError(f"{k} needs exactly one strand sign")
            dom = cod = s
        elif k == "cup":
            dom, cod = EMPTY, (PLUS, MINUS)
        elif k == "cap":
            dom, cod = (PLUS, MINUS), EMPTY
        elif k == "perm":
            if len(s) != 2:
                raise InputError("perm needs two strand signs")
            dom, cod = s, (s[1], s[0])
        elif k == "half_start":
            dom, cod = EMPTY, (PLUS,)
        elif k == "half_end":
            dom, cod = (PLUS,), EMPTY
        elif k == "hole":
            dom, cod = _signs(self.hole_dom), _signs(self.hole_cod)
        else:
            raise InputError(f"unknown generator {k!r}")
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)

    def generators(self):
        yield self

    def __str__(self):
        if self.kind == "defect":
            return f"defect{self.signs[0]}[{show(self.word)}]"
        if self.kind in ("id", "perm"):
            return f"{self.kind}({''.join(self.signs)})"
        if self.kind == "hole":
            return f"hole:{self.name}"
        return self.kind


@dataclass(frozen=True)
class Compose(Diagram):
    """outer after inner."""

    outer: Diagram
    inner: Diagram
    dom: tuple = field(init=False, compare=False, repr=False)
    cod: tuple = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.inner.cod != self.outer.dom:
            raise TypeMismatch(
                f"cannot compose {self.outer} after {self.inner}: "
                f"{''.join(self.inner.cod) or 'empty'} != {''.join(self.outer.dom) or 'empty'}")
        object.__setattr__(self, "dom", self.inner.dom)
        object.__setattr__(self, "cod", self.outer.cod)

    def generators(self):
        yield from self.inner.generators()
        yield from self.outer.generators()

    def __str__(self):
        return f"({self.outer} . {self.inner})"


@dataclass(frozen=True)
class Tensor(Diagram):
    left: Diagram
    right: Diagram
    dom: tuple = field(init=False, compare=False, repr=False)
    cod: tuple = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "dom", self.left.dom + self.right.dom)
        object.__setattr__(self, "cod", self.left.cod + self.right.cod)

    def generators(self):
        yield from self.left.generators()
        yield from self.right.generators()

    def __str__(self):
        return f"({self.left} x {self.right})"


# generators without parameters are immutable, so one instance each suffices
_CONSTANT_GENS = {k: Gen(k) for k in ("cup", "cap", "half_start", "half_end")}


def Id(sign: str = PLUS) -> Gen:
    return Gen("id", (sign,))


def Cup() -> Gen:
    return _CONSTANT_GENS["cup"]


def Cap() -> Gen:
    return _CONSTANT_GENS["cap"]


def Perm(first: str, second: str) -> Gen:
    return Gen("perm", (first, second))


def HalfStart() -> Gen:
    return _CONSTANT_GENS["half_start"]


def HalfEnd() -> Gen:
    return _CONSTANT_GENS["half_end"]


def Defect(orientation: str, word) -> Gen:
    return Gen("defect", (orientation,), as_word(word))


def Hole(name: str, dom, cod) -> Gen:
    return Gen("hole", name=name, hole_dom=tuple(dom), hole_cod=tuple(cod))


def identity(signs) -> Diagram:
    signs = _signs(signs)
    if not signs:
        return _Empty()
    d: Diagram = Id(signs[0])
    for s in signs[1:]:
        d = Tensor(d, Id(s))
    return d


class _Empty(Diagram):
    dom = cod = EMPTY

    def generators(self):
        return iter(())

    def __eq__(self, other):
        return isinstance(other, _Empty)

    def __hash__(self):
        return 0

    def __str__(self):
        return "empty"


def compose(*terms: Diagram) -> Diagram:
    """Compose terms listed in order of application."""
    d = terms[0]
    for t in terms[1:]:
        d = Compose(t, d)
    return d


def tensor(*terms: Diagram) -> Diagram:
    d = terms[0]
    for t in terms[1:]:
        d = Tensor(d, t)
    return d


def typecheck(d: Diagram) -> tuple:
    # construction already checks; re-walk so hand-built terms are validated too
    if isinstance(d, Compose):
        typecheck(d.inner)
        typecheck(d.outer)
        if d.inner.cod != d.outer.dom:
            raise TypeMismatch(f"boundary mismatch at {d}")
    elif isinstance(d, Tensor):
        typecheck(d.left)
        typecheck(d.right)
    return d.dom, d.cod


def floating_line(w) -> Diagram:
    if not w:
        return Compose(HalfEnd(), HalfStart())
    return Compose(HalfEnd(), Compose(Defect(PLUS, w), HalfStart()))


def snake(sign: str = PLUS) -> Diagram:
    """Zig-zag on one strand; evaluates to the identity."""
    if sign == PLUS:
        return compose(Tensor(Cup(), Id(PLUS)),
                       Tensor(Id(PLUS), compose(Perm(MINUS, PLUS), Cap())))
    return compose(Tensor(Id(MINUS), Cup()),
                   Tensor(Perm(MINUS, PLUS), Id(MINUS)),
                   Tensor(Cap(), Id(MINUS)))


def generator_probes(alphabet) -> list:
    """One instance of every generator, with single-letter defects on both orientations."""
    probes = [Id(PLUS), Id(MINUS), Cup(), Cap(), HalfStart(), HalfEnd(),
              Perm(PLUS, PLUS), Perm(PLUS, MINUS), Perm(MINUS, PLUS), Perm(MINUS, MINUS)]
    for a in alphabet:
        probes += [Defect(PLUS, (a,)), Defect(MINUS, (a,))]
    return probes


def map_defects(d: Diagram, fn) -> Diagram:
    """Replace every defect word w by fn(w)."""
    if isinstance(d, Gen):
        if d.kind == "defect":
            return Defect(d.signs[0], fn(d.word))
        return d
    if isinstance(d, Compose):
        return Compose(map_defects(d.outer, fn), map_defects(d.inner, fn))
    if isinstance(d, Tensor):
        return Tensor(map_defects(d.left, fn), map_defects(d.right, fn))
    return d


def fill(d: Diagram, fillings: dict) -> Diagram:
    """Substitute diagrams for named holes; unfilled holes stay in place."""
    if isinstance(d, Gen):
        if d.kind == "hole" and d.name in fillings:
            f = fillings[d.name]
            if (f.dom, f.cod) != (d.dom, d.cod):
                raise TypeMismatch(f"filling for hole {d.name} has boundary "
                                   f"{''.join(f.dom)}->{''.join(f.cod)}, expected "
                                   f"{''.join(d.dom)}->{''.join(d.cod)}")
            return f
        return d
    if isinstance(d, Compose):
        return Compose(fill(d.outer, fillings), fill(d.inner, fillings))
    if isinstance(d, Tensor):
        return Tensor(fill(d.left, fillings), fill(d.right, fillings))
    return d


def diagram_from_json(obj) -> Diagram:
    try:
        op = obj["op"]
        if op == "gen":
            name = obj["name"]
            if name in ("id", "defect"):
                sign = obj.get("sign", obj.get("orientation", PLUS))
                if name == "id":
                    return Id(sign)
                word = obj.get("word", "")
                return Defect(sign, word if isinstance(word, str) else tuple(word))
            if name == "perm":
                return Perm(*obj.get("signs", [PLUS, PLUS]))
            if name == "hole":
                return Hole(obj["hole"], obj.get("dom", []), obj.get("cod", []))
            return Gen(name)
        terms = [diagram_from_json(t) for t in obj["terms"]]
        if not terms:
            if op == "tensor":
                return _Empty()
            raise InputError("compose needs at least one term")
        if op == "compose":
            return compose(*terms)
        if op == "tensor":
            return tensor(*terms)
        raise InputError(f"unknown op {op!r}")
    except KeyError as exc:
        raise InputError(f"diagram is missing field {exc.args[0]!r}") from exc
    except TypeError as exc:
        raise InputError(f"malformed diagram: {exc}") from exc


def diagram_to_json(d: Diagram) -> dict:
    if isinstance(d, Gen):
        out: dict = {"op": "gen", "name": d.kind}
        if d.kind in ("id", "defect"):
            out["sign"] = d.signs[0]
        if d.kind == "defect":
            out["word"] = list(d.word)
        if d.kind == "perm":
            out["signs"] = list(d.signs)
        if d.kind == "hole":
            out.update(hole=d.name, dom=list(d.dom), cod=list(d.cod))
        return out
    if isinstance(d, Compose):
        return {"op": "compose", "terms": [diagram_to_json(d.inner), diagram_to_json(d.outer)]}
    if isinstance(d, Tensor):
        return {"op": "tensor", "terms": [diagram_to_json(d.left), diagram_to_json(d.right)]}
    return {"op": "tensor", "terms": []}
