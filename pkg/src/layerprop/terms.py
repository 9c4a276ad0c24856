"""Term syntax for diagrams and its recursive sort discipline.

Terms mirror the constructors of the calculus one-to-one.  ``infer_sort``
assigns sorts by structural recursion and enforces the side condition that
the in-layer tensor only applies to internal terms; ``build`` elaborates a
term into a port-graph diagram.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import diagram as dg
from .errors import SideConditionViolation, SortMismatch
from .internal import EPSILON, InternalDiagram, Word
from .theory import EMPTY_TYPE, Sort, SystemOfLayers, sheet


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Id:
    layer: str
    word: Word


@dataclass(frozen=True)
class Gen:
    layer: str
    name: str


@dataclass(frozen=True)
class BoxT:
    content: InternalDiagram


@dataclass(frozen=True)
class CupT:
    layer: str


@dataclass(frozen=True)
class CapT:
    layer: str


@dataclass(frozen=True)
class PantsT:
    layer: str
    alpha: Word
    beta: Word


@dataclass(frozen=True)
class CopantsT:
    layer: str
    alpha: Word
    beta: Word


@dataclass(frozen=True)
class RefineT:
    source: str
    target: str
    word: Word


@dataclass(frozen=True)
class CoarsenT:
    source: str
    target: str
    word: Word


@dataclass(frozen=True)
class SymT:
    layer1: str
    alpha: Word
    layer2: str
    beta: Word


@dataclass(frozen=True)
class Seq:
    first: "Term"
    second: "Term"


@dataclass(frozen=True)
class Par:
    top: "Term"
    bottom: "Term"


@dataclass(frozen=True)
class Fuse:
    layer: str
    top: "Term"
    bottom: "Term"


Term = (Empty | Id | Gen | BoxT | CupT | CapT | PantsT | CopantsT | RefineT
        | CoarsenT | SymT | Seq | Par | Fuse)


def is_internal_term(t: Term) -> bool:
    """Built from generators, identities, composition and in-layer tensor."""
    if isinstance(t, (Gen, Id, BoxT)):
        return True
    if isinstance(t, (Seq,)):
        return is_internal_term(t.first) and is_internal_term(t.second)
    if isinstance(t, Fuse):
        return is_internal_term(t.top) and is_internal_term(t.bottom)
    return False


def infer_sort(t: Term, sys: SystemOfLayers) -> Sort:
    """Sort assignment by the construction rules; raises on ill-typed terms."""
    if isinstance(t, Empty):
        return Sort(EMPTY_TYPE, EMPTY_TYPE)
    if isinstance(t, Id):
        sys.validate_word(t.layer, t.word)
        s = sheet(t.layer, t.word)
        return Sort(s, s)
    if isinstance(t, Gen):
        sig = sys.signature(t.layer)
        if t.name not in sig:
            from .errors import UnknownGenerator
            raise UnknownGenerator(
                f"no generator {t.name!r} in layer {t.layer!r}")
        dom, cod = sig[t.name]
        return Sort(sheet(t.layer, dom), sheet(t.layer, cod))
    if isinstance(t, BoxT):
        from . import internal
        internal.validate(t.content, sys.signature(t.content.layer))
        return Sort(sheet(t.content.layer, t.content.dom),
                    sheet(t.content.layer, t.content.cod))
    if isinstance(t, CupT):
        sys.layer(t.layer)
        return Sort(EMPTY_TYPE, sheet(t.layer, EPSILON))
    if isinstance(t, CapT):
        sys.layer(t.layer)
        return Sort(sheet(t.layer, EPSILON), EMPTY_TYPE)
    if isinstance(t, PantsT):
        sys.validate_word(t.layer, t.alpha)
        sys.validate_word(t.layer, t.beta)
        return Sort(sheet(t.layer, t.alpha) + sheet(t.layer, t.beta),
                    sheet(t.layer, t.alpha + t.beta))
    if isinstance(t, CopantsT):
        sys.validate_word(t.layer, t.alpha)
        sys.validate_word(t.layer, t.beta)
        return Sort(sheet(t.layer, t.alpha + t.beta),
                    sheet(t.layer, t.alpha) + sheet(t.layer, t.beta))
    if isinstance(t, RefineT):
        f = sys.functor(t.source, t.target)
        sys.validate_word(t.source, t.word)
        return Sort(sheet(t.source, t.word),
                    sheet(t.target, f.word_image(t.word)))
    if isinstance(t, CoarsenT):
        f = sys.functor(t.source, t.target)
        sys.validate_word(t.source, t.word)
        return Sort(sheet(t.target, f.word_image(t.word)),
                    sheet(t.source, t.word))
    if isinstance(t, SymT):
        sys.validate_word(t.layer1, t.alpha)
        sys.validate_word(t.layer2, t.beta)
        return Sort(sheet(t.layer1, t.alpha) + sheet(t.layer2, t.beta),
                    sheet(t.layer2, t.beta) + sheet(t.layer1, t.alpha))
    if isinstance(t, Seq):
        s1 = infer_sort(t.first, sys)
        s2 = infer_sort(t.second, sys)
        if s1.cod != s2.dom:
            raise SortMismatch(
                f"cannot compose {s1.pretty()} with {s2.pretty()}")
        return Sort(s1.dom, s2.cod)
    if isinstance(t, Par):
        s1 = infer_sort(t.top, sys)
        s2 = infer_sort(t.bottom, sys)
        return Sort(s1.dom + s2.dom, s1.cod + s2.cod)
    if isinstance(t, Fuse):
        if not (is_internal_term(t.top) and is_internal_term(t.bottom)):
            raise SideConditionViolation(
                "in-layer tensor applied to a non-internal term")
        s1 = infer_sort(t.top, sys)
        s2 = infer_sort(t.bottom, sys)
        for s in (s1, s2):
            if len(s.dom) != 1 or s.dom.entries[0][0] != t.layer:
                raise SideConditionViolation(
                    f"in-layer tensor operand not internal to {t.layer!r}")
        (l1, a), (l2, b) = s1.dom.entries[0], s2.dom.entries[0]
        (_, c), (_, d) = s1.cod.entries[0], s2.cod.entries[0]
        return Sort(sheet(t.layer, a + b), sheet(t.layer, c + d))
    raise TypeError(f"not a term: {t!r}")


def build(t: Term, sys: SystemOfLayers) -> dg.Diagram:
    """Elaborate a term into a diagram; typing errors propagate."""
    infer_sort(t, sys)
    if isinstance(t, Empty):
        return dg.empty_diagram(sys)
    if isinstance(t, Id):
        return dg.identity(sys, sheet(t.layer, t.word))
    if isinstance(t, Gen):
        return dg.gen_box(sys, t.layer, t.name)
    if isinstance(t, BoxT):
        return dg.box(sys, t.content)
    if isinstance(t, CupT):
        return dg.cup(sys, t.layer)
    if isinstance(t, CapT):
        return dg.cap(sys, t.layer)
    if isinstance(t, PantsT):
        return dg.pants(sys, t.layer, t.alpha, t.beta)
    if isinstance(t, CopantsT):
        return dg.copants(sys, t.layer, t.alpha, t.beta)
    if isinstance(t, RefineT):
        return dg.refine(sys, t.source, t.target, t.word)
    if isinstance(t, CoarsenT):
        return dg.coarsen(sys, t.source, t.target, t.word)
    if isinstance(t, SymT):
        return dg.sheet_sym(sys, t.layer1, t.alpha, t.layer2, t.beta)
    if isinstance(t, Seq):
        return dg.seq_compose(build(t.first, sys), build(t.second, sys))
    if isinstance(t, Par):
        return dg.par_tensor(build(t.top, sys), build(t.bottom, sys))
    if isinstance(t, Fuse):
        return dg.fuse_internal(build(t.top, sys), build(t.bottom, sys),
                                t.layer)
    raise TypeError(f"not a term: {t!r}")
