"""JSON encodings for systems, diagrams, derivations, models, verdicts.

All encoders are deterministic (sorted keys, canonical forms) so that
repeated runs serialize byte-identically.
"""

from __future__ import annotations

import json
from typing import Any

from . import diagram as dg
from . import rewrite as rw
from .diagram import (Cap, Coarsen, Copants, Cup, Diagram, InternalBox,
                      Pants, Refine, SheetSym, Wire, canonicalize)
from .errors import InvalidDerivation, MalformedInput
from .explain import ExplanationVerdict
from .internal import InternalDiagram
from .profunctor import FinFunctor, FinMonoidalCategory
from .semantics import FinOmegaSystem
from .theory import (Equation, LayerPresentation, MorphismGen, OmegaType,
                     SystemOfLayers, TranslationFunctor)


def dumps(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=1,
                      ensure_ascii=False) + "\n"


# -- internal diagrams -------------------------------------------------------


def internal_to_json(d: InternalDiagram) -> dict:
    return {"layer": d.layer, "dom": list(d.dom), "cod": list(d.cod),
            "slices": [[off, gen] for off, gen in d.slices]}


def internal_from_json(payload: dict) -> InternalDiagram:
    try:
        return InternalDiagram(
            payload["layer"], tuple(payload["dom"]), tuple(payload["cod"]),
            tuple((int(off), gen) for off, gen in payload["slices"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad internal diagram: {exc}")


# -- systems ------------------------------------------------------------------


def system_to_json(sys_: SystemOfLayers) -> dict:
    return {
        "layers": [
            {"name": lay.name,
             "objects": list(lay.gen_objects),
             "morphisms": [{"name": g.name, "dom": list(g.dom),
                            "cod": list(g.cod)}
                           for g in lay.gen_morphisms],
             "equations": [{"name": eq.name,
                            "lhs": internal_to_json(eq.lhs),
                            "rhs": internal_to_json(eq.rhs)}
                           for eq in lay.equations]}
            for lay in sorted(sys_.layers.values(), key=lambda l: l.name)],
        "functors": [
            {"source": f.source, "target": f.target,
             "objects": {sym: list(w) for sym, w in f.object_map},
             "morphisms": {gen: internal_to_json(img)
                           for gen, img in f.morphism_map}}
            for (_, _), f in sorted(sys_.functors.items())],
        "order": [list(pair) for pair in sorted(sys_.order)],
    }


def system_from_json(payload: dict) -> SystemOfLayers:
    try:
        layers = []
        for lay in payload["layers"]:
            layers.append(LayerPresentation(
                lay["name"], tuple(lay["objects"]),
                tuple(MorphismGen(m["name"], tuple(m["dom"]),
                                  tuple(m["cod"]))
                      for m in lay.get("morphisms", ())),
                tuple(Equation(e["name"], internal_from_json(e["lhs"]),
                               internal_from_json(e["rhs"]))
                      for e in lay.get("equations", ()))))
        functors = []
        for f in payload.get("functors", ()):
            functors.append(TranslationFunctor(
                f["source"], f["target"],
                tuple(sorted((sym, tuple(w))
                             for sym, w in f["objects"].items())),
                tuple(sorted((gen, internal_from_json(img))
                             for gen, img in f["morphisms"].items()))))
        order = [tuple(pair) for pair in payload.get("order", ())]
        return SystemOfLayers(layers, functors, order)
    except (KeyError, TypeError) as exc:
        raise MalformedInput(f"bad theory file: {exc}")


# -- diagrams -----------------------------------------------------------------


def _cell_to_json(cell) -> dict:
    if isinstance(cell, InternalBox):
        return {"kind": "box", **internal_to_json(cell.content)}
    if isinstance(cell, Pants):
        return {"kind": "pants", "layer": cell.layer,
                "alpha": list(cell.alpha), "beta": list(cell.beta)}
    if isinstance(cell, Copants):
        return {"kind": "copants", "layer": cell.layer,
                "alpha": list(cell.alpha), "beta": list(cell.beta)}
    if isinstance(cell, Cup):
        return {"kind": "cup", "layer": cell.layer}
    if isinstance(cell, Cap):
        return {"kind": "cap", "layer": cell.layer}
    if isinstance(cell, Refine):
        return {"kind": "refine", "source": cell.source,
                "target": cell.target, "word": list(cell.word)}
    if isinstance(cell, Coarsen):
        return {"kind": "coarsen", "source": cell.source,
                "target": cell.target, "word": list(cell.word)}
    if isinstance(cell, SheetSym):
        return {"kind": "sym", "layer1": cell.layer1,
                "alpha": list(cell.alpha), "layer2": cell.layer2,
                "beta": list(cell.beta)}
    raise MalformedInput(f"unknown cell {cell!r}")


def _cell_from_json(sys_: SystemOfLayers, payload: dict):
    kind = payload.get("kind")
    if kind == "box":
        content = internal_from_json(payload)
        return InternalBox(content.layer, content)
    if kind == "pants":
        return Pants(payload["layer"], tuple(payload["alpha"]),
                     tuple(payload["beta"]))
    if kind == "copants":
        return Copants(payload["layer"], tuple(payload["alpha"]),
                       tuple(payload["beta"]))
    if kind == "cup":
        return Cup(payload["layer"])
    if kind == "cap":
        return Cap(payload["layer"])
    if kind == "refine":
        f = sys_.functor(payload["source"], payload["target"])
        word = tuple(payload["word"])
        return Refine(payload["source"], payload["target"], word,
                      f.word_image(word))
    if kind == "coarsen":
        f = sys_.functor(payload["source"], payload["target"])
        word = tuple(payload["word"])
        return Coarsen(payload["source"], payload["target"], word,
                       f.word_image(word))
    if kind == "sym":
        return SheetSym(payload["layer1"], tuple(payload["alpha"]),
                        payload["layer2"], tuple(payload["beta"]))
    raise MalformedInput(f"unknown cell kind {kind!r}")


def _endpoint_to_json(ep) -> list:
    if ep[0] in ("dom", "cod"):
        return [ep[0], ep[1]]
    side = "cell"
    return [side, ep[1], ep[2], "out" if ep[0] == "out" else "in"]


def diagram_to_json(d: Diagram) -> dict:
    c = canonicalize(d).diagram
    return {
        "sort": {"dom": [[layer, list(w)] for layer, w in c.dom.entries],
                 "cod": [[layer, list(w)] for layer, w in c.cod.entries]},
        "cells": [{"id": i, **_cell_to_json(cell)}
                  for i, cell in enumerate(c.cells)],
        "wires": [{"source": _endpoint_to_json(w.src),
                   "target": _endpoint_to_json(w.dst),
                   "type": [w.type[0], list(w.type[1])]}
                  for w in c.wires],
    }


def diagram_from_json(sys_: SystemOfLayers, payload: dict) -> Diagram:
    try:
        dom = OmegaType(tuple((layer, tuple(w))
                              for layer, w in payload["sort"]["dom"]))
        cod = OmegaType(tuple((layer, tuple(w))
                              for layer, w in payload["sort"]["cod"]))
        cells = [_cell_from_json(sys_, c) for c in payload["cells"]]

        def endpoint(raw, role):
            if raw[0] in ("dom", "cod"):
                return (raw[0], int(raw[1]))
            port = raw[3] if len(raw) > 3 else role
            return (port, int(raw[1]), int(raw[2]))

        wires = [Wire(endpoint(w["source"], "out"),
                      endpoint(w["target"], "in"),
                      (w["type"][0], tuple(w["type"][1])))
                 for w in payload["wires"]]
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise MalformedInput(f"bad diagram file: {exc}")
    d = Diagram(sys_, dom, cod, cells, wires)
    dg.validate_diagram(d)
    return d


# -- derivations --------------------------------------------------------------


def derivation_to_json(dv: rw.Derivation) -> dict:
    steps = []
    for m in dv.steps:
        anchor = {"cells": list(m.cells),
                  "dom_wires": list(m.dom_wires),
                  "cod_wires": list(m.cod_wires)}
        if m.box_payload is not None:
            ci, content = m.box_payload
            anchor["box"] = {"cell": ci, **internal_to_json(content)}
        steps.append({"rule": m.rule.name, "orientation": m.orientation,
                      "anchor": anchor})
    return {"start": diagram_to_json(dv.start), "steps": steps}


def derivation_from_json(sys_: SystemOfLayers, payload: dict,
                         engine: rw.RuleEngine | None = None
                         ) -> rw.Derivation:
    """Reconstruct by replaying: each recorded step must re-match."""
    start = diagram_from_json(sys_, payload["start"])
    collapse = set()
    for step in payload.get("steps", ()):
        name = step.get("rule", "")
        if name.startswith("A3c["):
            inner = name[4:name.index(";")]
            src, tgt = inner.split(">")
            collapse.add((src, tgt))
    if engine is None:
        engine = rw.RuleEngine(sys_, collapse)
    current = canonicalize(start).diagram
    steps = []
    for step in payload.get("steps", ()):
        anchor = step.get("anchor", {})
        box = anchor.get("box")
        payload_sig = None
        if box is not None:
            content = internal_from_json(box)
            payload_sig = (box["cell"], content.dom, content.cod,
                           content.slices)
        want = (step.get("rule"), step.get("orientation"),
                tuple(anchor.get("cells", ())),
                tuple(anchor.get("dom_wires", ())),
                tuple(anchor.get("cod_wires", ())), payload_sig)
        found = None
        for m in engine.matches(current):
            if m.signature() == want:
                found = m
                break
        if found is None:
            raise InvalidDerivation(
                f"step {step.get('rule')!r} does not re-match")
        steps.append(found)
        current = rw.apply_rule(current, found)
    return rw.Derivation(canonicalize(start).diagram, steps)


# -- verdicts -----------------------------------------------------------------


def verdict_to_json(v: ExplanationVerdict) -> dict:
    return {
        "status": v.status,
        "witness": None if v.witness is None
        else derivation_to_json(v.witness),
        "failed_conditions": list(v.reasons),
    }


# -- finite models ------------------------------------------------------------


def model_to_json(model: FinOmegaSystem) -> dict:
    cats = {}
    for layer, cat in sorted(model.categories.items()):
        cats[layer] = {
            "objects": list(cat.objects),
            "morphisms": [{"name": m, "dom": cat.dom(m), "cod": cat.cod(m)}
                          for m in cat.morphisms],
            "compose": [[f, g, cat.then(f, g)]
                        for f in cat.morphisms for g in cat.morphisms
                        if cat.cod(f) == cat.dom(g)],
            "identities": {a: cat.ident(a) for a in cat.objects},
            "unit": cat.unit,
            "tensor_obj": [[a, b, cat.tensor_obj(a, b)]
                           for a in cat.objects for b in cat.objects],
            "tensor_mor": [[f, g, cat.tensor_mor(f, g)]
                           for f in cat.morphisms for g in cat.morphisms],
        }
    return {
        "categories": cats,
        "objects": {f"{layer}:{sym}": obj
                    for (layer, sym), obj in sorted(model.objects.items())},
        "generators": {f"{layer}:{gen}": mor
                       for (layer, gen), mor
                       in sorted(model.generators.items())},
        "functors": [{"source": s, "target": t,
                      "objects": dict(sorted(f.obj_map.items())),
                      "morphisms": dict(sorted(f.mor_map.items()))}
                     for (s, t), f in sorted(model.functors.items())],
    }


def model_from_json(sys_: SystemOfLayers, payload: dict) -> FinOmegaSystem:
    try:
        cats: dict[str, FinMonoidalCategory] = {}
        for layer, raw in payload["categories"].items():
            morphisms = [m["name"] for m in raw["morphisms"]]
            dom = {m["name"]: m["dom"] for m in raw["morphisms"]}
            cod = {m["name"]: m["cod"] for m in raw["morphisms"]}
            compose = {(f, g): h for f, g, h in raw["compose"]}
            cats[layer] = FinMonoidalCategory(
                layer, raw["objects"], morphisms, dom, cod, compose,
                dict(raw["identities"]), raw["unit"],
                {(a, b): c for a, b, c in raw["tensor_obj"]},
                {(f, g): h for f, g, h in raw["tensor_mor"]})
        objects = {}
        for key, obj in payload["objects"].items():
            layer, sym = key.split(":", 1)
            objects[(layer, sym)] = obj
        generators = {}
        for key, mor in payload["generators"].items():
            layer, gen = key.split(":", 1)
            generators[(layer, gen)] = mor
        functors = {}
        for f in payload.get("functors", ()):
            src, tgt = f["source"], f["target"]
            functors[(src, tgt)] = FinFunctor(
                f"{src}>{tgt}", cats[src], cats[tgt],
                dict(f["objects"]), dict(f["morphisms"]))
        return FinOmegaSystem(sys_, cats, objects, generators, functors)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad model file: {exc}")
