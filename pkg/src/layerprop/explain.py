"""Window recognition and the three explanation judgments.

An explanation relates two parallel diagrams across abstraction levels:
the explained morphism must be a single box of one layer, the explaining
diagram may only use boxes from strictly lower layers, and the two must be
connected by a rewrite (or, for a counterfactual, provably not).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import rewrite as rw
from .diagram import (Coarsen, Diagram, InternalBox, Refine, canonical_key,
                      canonicalize, structural_eq)
from .errors import InvalidDerivation, SortMismatch
from .rewrite import Derivation, RuleEngine
from .theory import SystemOfLayers


@dataclass
class ExplanationVerdict:
    status: str  # valid | invalid | certified | refuted | unknown
    witness: Derivation | None = None
    reasons: list[str] = field(default_factory=list)


def _single_path(d: Diagram) -> list | None:
    """Cells in order along a single-sheet chain dom -> ... -> cod."""
    c = canonicalize(d).diagram
    if len(c.dom) != 1 or len(c.cod) != 1:
        return None
    by_src = {w.src: w for w in c.wires}
    chain = []
    cursor = by_src.get(("dom", 0))
    seen = 0
    while cursor is not None and seen <= len(c.cells) + 1:
        if cursor.dst[0] == "cod":
            return chain if len(chain) == len(c.cells) else None
        ci = cursor.dst[1]
        chain.append(c.cells[ci])
        cursor = by_src.get(("out", ci, 0))
        seen += 1
        if len(c.cells[ci].out_ports()) != 1 or \
                len(c.cells[ci].in_ports()) != 1:
            return None
    return None


def is_window(d: Diagram) -> bool:
    """Refine, then an internal morphism of the lower layer, then coarsen."""
    chain = _single_path(d)
    if chain is None or not chain:
        return False
    first, last = chain[0], chain[-1]
    if not (isinstance(first, Refine) and isinstance(last, Coarsen)):
        return False
    if (first.source, first.target) != (last.source, last.target):
        return False
    middle = chain[1:-1]
    if len(middle) > 1:
        return False
    return all(isinstance(c, InternalBox) and c.layer == first.target
               for c in middle)


def is_cowindow(d: Diagram) -> bool:
    """Coarsen, then an internal morphism of the upper layer, then refine."""
    chain = _single_path(d)
    if chain is None or not chain:
        return False
    first, last = chain[0], chain[-1]
    if not (isinstance(first, Coarsen) and isinstance(last, Refine)):
        return False
    if (first.source, first.target) != (last.source, last.target):
        return False
    middle = chain[1:-1]
    if len(middle) > 1:
        return False
    return all(isinstance(c, InternalBox) and c.layer == first.source
               for c in middle)


def contains_window(d: Diagram) -> bool:
    """Some refine cell reaches a matching coarsen through boxes only."""
    c = canonicalize(d).diagram
    by_src = {w.src: w for w in c.wires}
    for ci, cell in enumerate(c.cells):
        if not isinstance(cell, Refine):
            continue
        cursor = by_src.get(("out", ci, 0))
        hops = 0
        while cursor is not None and hops <= len(c.cells):
            if cursor.dst[0] != "in":
                break
            nxt = c.cells[cursor.dst[1]]
            if isinstance(nxt, Coarsen) and \
                    (nxt.source, nxt.target) == (cell.source, cell.target):
                return True
            if isinstance(nxt, InternalBox) and nxt.layer == cell.target:
                cursor = by_src.get(("out", cursor.dst[1], 0))
                hops += 1
                continue
            break
    return False


def _single_internal(d: Diagram) -> str | None:
    """Layer of d when d is one internal box; None otherwise."""
    c = canonicalize(d).diagram
    if len(c.cells) == 1 and isinstance(c.cells[0], InternalBox):
        if len(c.dom) == 1 and len(c.cod) == 1:
            return c.cells[0].layer
    return None


def _conditions_12(e: Diagram, sigma: Diagram,
                   sys: SystemOfLayers) -> tuple[str | None, list[str]]:
    reasons: list[str] = []
    omega = _single_internal(sigma)
    if omega is None:
        reasons.append("condition 1: explained morphism is not a single "
                       "internal box of one layer")
        return None, reasons
    ce = canonicalize(e).diagram
    for ci, cell in enumerate(ce.cells):
        if isinstance(cell, InternalBox) and cell.content.slices:
            if not sys.below(cell.layer, omega):
                reasons.append(
                    f"condition 2: internal box {ci} lives in layer "
                    f"{cell.layer!r}, which is not strictly below "
                    f"{omega!r}")
    return omega, reasons


def check_explanation_1(e: Diagram, sigma: Diagram, budget: int = 10_000,
                        engine: RuleEngine | None = None
                        ) -> ExplanationVerdict:
    """Is e an explanation of the internal morphism sigma?"""
    if e.sort != sigma.sort:
        raise SortMismatch("explanation and explained must be parallel")
    sys = e.system
    if engine is None:
        engine = RuleEngine(sys)
    omega, reasons = _conditions_12(e, sigma, sys)
    if reasons:
        return ExplanationVerdict("invalid", None, reasons)
    for a, b in ((e, sigma), (sigma, e)):
        dv = rw.find_derivation(a, b, budget, engine)
        if isinstance(dv, Derivation):
            return ExplanationVerdict("valid", dv, [])
    return ExplanationVerdict(
        "unknown", None,
        [f"condition 3: no rewrite found within budget {budget}"])


def check_explanation_2(eta: Derivation, layer: str, eq_name: str
                        ) -> ExplanationVerdict:
    """Is the derivation eta an explanation of the named layer equation?"""
    sys = eta.start.system
    equations = {eq.name: eq for eq in sys.layer(layer).equations}
    if eq_name not in equations:
        raise InvalidDerivation(
            f"layer {layer!r} has no equation named {eq_name!r}")
    if not rw.verify_derivation(eta):
        raise InvalidDerivation("derivation does not replay")
    eq = equations[eq_name]
    from . import diagram as dg
    lhs_key = canonical_key(dg.box(sys, eq.lhs))
    rhs_key = canonical_key(dg.box(sys, eq.rhs))
    ends = {canonical_key(eta.start), eta.end_key}
    reasons: list[str] = []
    if ends != {lhs_key, rhs_key}:
        reasons.append("parallelism: derivation endpoints are not the "
                       "equation's two sides")
    for i, step in enumerate(eta.steps):
        if step.rule.family == "E":
            used_layer = step.rule.params[0]
            if not sys.below(used_layer, layer):
                reasons.append(
                    f"condition 2: step {i} uses an equation of layer "
                    f"{used_layer!r}, which is not strictly below {layer!r}")
    if reasons:
        return ExplanationVerdict("invalid", eta, reasons)
    return ExplanationVerdict("valid", eta, [])


def check_counterfactual(e: Diagram, sigma: Diagram, budget: int = 2_000,
                         engine: RuleEngine | None = None
                         ) -> ExplanationVerdict:
    """Conditions 1 and 2 of an explanation, with condition 3 negated."""
    if e.sort != sigma.sort:
        raise SortMismatch("counterfactual and explained must be parallel")
    sys = e.system
    if engine is None:
        engine = RuleEngine(sys)
    omega, reasons = _conditions_12(e, sigma, sys)
    if reasons:
        return ExplanationVerdict("invalid", None, reasons)
    if structural_eq(e, sigma):
        return ExplanationVerdict(
            "invalid", None, ["the diagrams coincide; the identity rewrite "
                              "connects them"])
    if engine.is_isolated(e):
        return ExplanationVerdict("certified", None, [])
    for a, b in ((e, sigma), (sigma, e)):
        dv = rw.find_derivation(a, b, budget, engine)
        if isinstance(dv, Derivation):
            return ExplanationVerdict("refuted", dv, [])
    return ExplanationVerdict(
        "unknown", None,
        [f"no isolation certificate and no rewrite within budget {budget}"])
