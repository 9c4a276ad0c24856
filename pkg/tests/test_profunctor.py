"""Categories, coends, embeddings, adjunctions, and the search routines."""

import itertools
import random

import pytest

from layerprop import models
from layerprop import profunctor as pf
from layerprop.errors import SearchTooLarge


@pytest.fixture(scope="module")
def z3():
    return models.cyclic_monoid_category()

@pytest.fixture(scope="module")
def arrow():
    return models.arrow_meet_category()


@pytest.fixture(scope="module")
def square():
    return models.square_meet_category()


def test_categories_validate(z3, arrow, square):
    assert z3.validate_monoidal() == []
    assert arrow.validate_monoidal() == []
    assert square.validate_monoidal() == []


def test_hom_profunctor_valid(z3, square):
    assert pf.validate_profunctor(pf.hom_profunctor(z3)) == []
    assert pf.validate_profunctor(pf.hom_profunctor(square)) == []


def test_broken_action_detected(z3):
    hom = pf.hom_profunctor(z3)
    broken = pf.Profunctor(
        "broken", z3, z3, hom._elements,
        lambda g, x, a, b: "1" if (g, x) == ("1", "1") else z3.then(g, x),
        hom._ract)
    report = pf.validate_profunctor(broken)
    assert any("left" in line for line in report)


def test_embeddings_valid_and_adjoint(square, arrow):
    f = pf.FinFunctor("incl", arrow, square,
                      {"lo": "p", "hi": "s"},
                      {"lo<lo": "p<p", "lo<hi": "p<s", "hi<hi": "s<s"})
    assert f.validate() == []
    up = pf.embed(f, "up")
    down = pf.embed(f, "down")
    assert pf.validate_profunctor(up) == []
    assert pf.validate_profunctor(down) == []
    assert pf.check_adjunction_triangles(f) == []


def test_identity_embeddings_are_hom(z3):
    ident = pf.identity_functor(z3)
    hom = pf.hom_profunctor(z3)
    up = pf.embed(ident, "up")
    down = pf.embed(ident, "down")
    for a in z3.objects:
        for b in z3.objects:
            assert up.elements(a, b) == hom.elements(a, b)
            assert down.elements(a, b) == hom.elements(a, b)


def test_adjunction_triangles_all_model_functors():
    for model in models.all_models():
        for f in model.functors.values():
            assert pf.check_adjunction_triangles(f) == []
        for cat in model.categories.values():
            assert pf.check_adjunction_triangles(
                pf.identity_functor(cat)) == []


def test_compose_with_hom_is_identity_on_counts(z3, square):
    for cat in (z3, square):
        hom = pf.hom_profunctor(cat)
        comp = pf.compose_prof(hom, hom)
        for a in cat.objects:
            for c in cat.objects:
                assert len(comp.elements(a, c)) == len(hom.elements(a, c))


def test_pointed_composition_realizes_composites(z3, arrow, square):
    for cat in (z3, arrow, square):
        assert pf.check_pointed_composition(cat) == []


def test_point_compose_unit_law(z3):
    f = pf.pointed_hom(z3, "1")
    ident = pf.pointed_hom(z3, "0")
    out = pf.point_compose(f, ident)
    # the composite class must coincide with the class of (1, id)
    assert out.point == out.prof.inject("*", "*", "*", "1", "0")
    assert out.point == out.prof.inject("*", "*", "*", "0", "1")


def _random_profunctor(rng, c, d, name):
    elements = {}
    n = 0
    for a in c.objects:
        for b in d.objects:
            k = rng.randint(0, 2)
            elements[(a, b)] = tuple(f"e{n + i}" for i in range(k))
            n += k
    # freely generated actions: collapse everything to a chosen element
    # deterministically; simplest valid bimodule: constant actions are not
    # functorial in general, so use the hom-induced shape instead
    return None


def test_coend_matches_naive_closure_oracle(z3, arrow):
    # oracle: transitive closure over all pair identifications, computed
    # with a different algorithm (repeated relaxation over an edge list)
    rng = random.Random(5)
    cases = [(z3, z3, z3), (arrow, arrow, arrow)]
    for (A, B, C) in cases:
        p = pf.hom_profunctor(A)
        q = pf.hom_profunctor(B)
        comp = pf.compose_prof(p, q)
        for a in A.objects:
            for c in C.objects:
                triples = [(b, x, y) for b in B.objects
                           for x in p.elements(a, b)
                           for y in q.elements(b, c)]
                edges = []
                for g in B.morphisms:
                    b, b2 = B.dom(g), B.cod(g)
                    for x in p.elements(a, b):
                        for y in q.elements(b2, c):
                            edges.append(((b2, p.ract(x, g, a, b), y),
                                          (b, x, q.lact(g, y, b2, c))))
                labels = {t: i for i, t in enumerate(triples)}
                changed = True
                while changed:
                    changed = False
                    for u, v in edges:
                        lu, lv = labels[u], labels[v]
                        if lu != lv:
                            keep = min(lu, lv)
                            for t, l in labels.items():
                                if l in (lu, lv):
                                    labels[t] = keep
                            changed = True
                oracle_classes = len(set(labels.values()))
                assert oracle_classes == len(comp.elements(a, c))
                # membership agrees as well
                for t1 in triples:
                    for t2 in triples:
                        same_oracle = labels[t1] == labels[t2]
                        same_uf = (comp.inject(a, c, *t1)
                                   == comp.inject(a, c, *t2))
                        assert same_oracle == same_uf


def test_nat_iso_hom_vs_up_identity(z3):
    hom = pf.hom_profunctor(z3)
    up = pf.embed(pf.identity_functor(z3), "up")
    assert pf.nat_iso_search(hom, up) is not None


def test_nat_iso_self(square):
    hom = pf.hom_profunctor(square)
    iso = pf.nat_iso_search(hom, hom)
    assert iso is not None
    for key, val in iso.items():
        assert key[2] == val  # the first iso found is the identity


def test_nat_iso_cardinality_prefilter(z3, arrow):
    hom_z = pf.hom_profunctor(z3)
    up = pf.embed(pf.FinFunctor(
        "收", arrow, arrow,
        {"lo": "lo", "hi": "hi"},
        {m: m for m in arrow.morphisms}), "up")
    assert pf.nat_iso_search(hom_z, up) is None  # different boundaries


def test_nat_search_too_large():
    # build a discrete-ish category with many parallel elements
    objs = ["o"]
    mors = [f"m{i}" for i in range(9)]

    class Fake(pf.Profunctor):
        pass

    cat = pf.FinCategory("big", objs, ["id"], {"id": "o"}, {"id": "o"},
                         {("id", "id"): "id"}, {"o": "id"})
    elements = {("o", "o"): tuple(mors)}
    p = pf.Profunctor("p", cat, cat, elements,
                      lambda g, x, a, b: x, lambda x, h, a, b: x)
    with pytest.raises(SearchTooLarge):
        pf.nat_trans_search(p, p, cap=10)


def test_up_product_iso(arrow, z3):
    f = pf.identity_functor(arrow)
    g = pf.identity_functor(z3)
    prod = pf.product_functor([f, g])
    up_prod = pf.embed(prod, "up")
    # product of embeddings, as a plain (unpointed) profunctor
    up_f = pf.embed(f, "up")
    up_g = pf.embed(g, "up")
    src = pf.product_category([arrow, z3])
    elements = {}
    for a in src.objects:
        for b in src.objects:
            elems = [(x, y) for x in up_f.elements(a[0], b[0])
                     for y in up_g.elements(a[1], b[1])]
            elements[(a, b)] = tuple(sorted(elems, key=repr))
    pair = pf.Profunctor(
        "pair", src, src, elements,
        lambda gg, xy, a, b: (up_f.lact(gg[0], xy[0], a[0], b[0]),
                              up_g.lact(gg[1], xy[1], a[1], b[1])),
        lambda xy, hh, a, b: (up_f.ract(xy[0], hh[0], a[0], b[0]),
                              up_g.ract(xy[1], hh[1], a[1], b[1])))
    assert pf.nat_iso_search(up_prod, pair) is not None


def test_coend_associativity_via_iso_search(arrow, z3):
    for cat in (arrow, z3):
        hom = pf.hom_profunctor(cat)
        left = pf.compose_prof(pf.compose_prof(hom, hom), hom)
        right = pf.compose_prof(hom, pf.compose_prof(hom, hom))
        assert pf.nat_iso_search(left, right) is not None


def test_middle_relabeling_preserves_class_counts(arrow):
    # relabel the arrow category's objects and compare composite counts
    relabeled = pf.FinCategory(
        "Arr2", ["LO", "HI"], ["LO<LO", "LO<HI", "HI<HI"],
        {"LO<LO": "LO", "LO<HI": "LO", "HI<HI": "HI"},
        {"LO<LO": "LO", "LO<HI": "HI", "HI<HI": "HI"},
        {("LO<LO", "LO<LO"): "LO<LO", ("LO<LO", "LO<HI"): "LO<HI",
         ("LO<HI", "HI<HI"): "LO<HI", ("HI<HI", "HI<HI"): "HI<HI"},
        {"LO": "LO<LO", "HI": "HI<HI"})
    assert relabeled.validate() == []
    comp_a = pf.compose_prof(pf.hom_profunctor(arrow),
                             pf.hom_profunctor(arrow))
    comp_b = pf.compose_prof(pf.hom_profunctor(relabeled),
                             pf.hom_profunctor(relabeled))
    rename = {"lo": "LO", "hi": "HI"}
    for a in arrow.objects:
        for c in arrow.objects:
            assert len(comp_a.elements(a, c)) == \
                len(comp_b.elements(rename[a], rename[c]))


def test_tensor_compose_interchange_on_points():
    # interchange: (p ; q) x (r ; s) matches (p x r) ; (q x s), points too
    from layerprop import models, semantics as sm
    from layerprop import diagram as dg
    model = models.monoid_model()
    sys_ = model.system
    p = dg.gen_box(sys_, "MU", "m1")
    q = dg.gen_box(sys_, "MU", "m2")
    seq_then_par = sm.interpret(model, dg.par_tensor(
        dg.seq_compose(p, q), dg.seq_compose(q, p)))
    par_then_seq = sm.interpret(
        model, dg.seq_compose(dg.par_tensor(p, q), dg.par_tensor(q, p)))
    # the interchange law is already quotiented at the diagram level, so
    # both routes evaluate the same canonical diagram: tables and points
    # coincide on the nose
    assert seq_then_par.point == par_then_seq.point
    assert (seq_then_par.src_obj, seq_then_par.tgt_obj) == \
        (par_then_seq.src_obj, par_then_seq.tgt_obj)
    a, b = seq_then_par.src_obj, seq_then_par.tgt_obj
    assert seq_then_par.prof.elements(a, b) == \
        par_then_seq.prof.elements(a, b)
