import json

import numpy as np
import pytest

from orbitcx.ahr import (MoveBrokeHomology, cancel_pair, check_monotone, check_strictly_monotone,
                         is_algebraic_homotopy_representation, is_tight, non_ahr_examples, tighten, trace_json,
                         verify_mayer_vietoris_lemma)
from orbitcx.chaincx import (FreeChainComplex, HomologyTable, SuperClassFunction, add_contractible_summand,
                             change_basis, hdim_function, is_homology_sphere, validate, zero_complex)
from orbitcx.exactalg import Coefficients, WrongRing
from orbitcx.gcw import boundary_sphere
from orbitcx.groups import GSet, catalog, cyclic, enumerate_subgroups
from orbitcx.orbitcat import OrbitCategory, OrbitMatrix
from orbitcx.superclass import linear_sphere_dim_function


def test_monotone_checks():
    lat = enumerate_subgroups(catalog()["C2xC2"])
    const = SuperClassFunction.constant(lat, 0)
    assert check_monotone(const).ok and not check_strictly_monotone(const).ok
    n = linear_sphere_dim_function(lat, [0])  # (3,1,1,1,0)
    assert check_strictly_monotone(n).ok
    bad = SuperClassFunction.from_dict(lat, {0: 0, 4: 1})
    assert not check_monotone(bad).ok


def test_tight_corpus_is_ahr(corpus):
    for item in corpus:
        rep = is_algebraic_homotopy_representation(item.complex)
        assert rep.ok, item.name
        assert all(len(v) == 1 for v in rep.maximal.values())


def test_strictly_monotone_makes_conditions_vacuous(corpus):
    for item in corpus:
        rep = is_algebraic_homotopy_representation(item.complex)
        if check_strictly_monotone(rep.n).ok:
            assert rep.condition_ii == [] and rep.condition_iii == []


def test_is_tight_examples(corpus):
    C = corpus[0].complex
    assert is_tight(C).tight
    P = add_contractible_summand(C, 0, C.top + 1)
    rep = is_tight(P)
    assert not rep.tight and 0 in rep.witnesses
    assert is_tight(zero_complex(C.cat, C.coeffs)).tight


def test_tight_input_unchanged(corpus):
    for item in corpus[:5]:
        out = tighten(item.complex)
        assert out.ok and out.trace == [] and out.result == item.complex


def test_tighten_requires_field(corpus):
    from orbitcx.chaincx import with_coefficients
    with pytest.raises(WrongRing):
        tighten(with_coefficients(corpus[0].complex, Coefficients(None)))


def test_unit_search_with_basis_change():
    """Rows (1+g, 1-g) over Z/3[C2]: neither entry is a unit, together they split."""
    cat = OrbitCategory.of(cyclic(2))
    _, C = boundary_sphere(cat, GSet.regular(cat.lattice), Coefficients(3))
    P = add_contractible_summand(add_contractible_summand(C, 0, 1, "a"), 0, 1, "b")
    F = P.modules[0]
    i, j = [k for k, l in enumerate(F.labels) if l[0] in "ab"]
    M = {(k, k): {0: 1} for k in range(F.rank)}
    M[(i, i)] = {0: 1, 1: 1}
    M[(i, j)] = {0: 1, 1: -1}
    M[(j, i)] = {0: 1, 1: -1}
    M[(j, j)] = {0: 1, 1: 1}
    phi = OrbitMatrix(cat, F, F, M, 3)  # phi^2 = 1 over Z/3[C2]
    Q = change_basis(P, 0, phi, phi)
    assert validate(Q).ok
    out = tighten(Q, debug_verify_moves=True)
    assert out.ok and is_tight(out.result).tight
    assert any(m.change_of_basis is not None for m in out.trace)
    assert HomologyTable(out.result).table() == HomologyTable(Q).table()
    json.loads(trace_json(out.trace))


def test_cancel_pair_rejects_non_unit(corpus):
    C = corpus[0].complex
    P = add_contractible_summand(C, 0, 1, "x")
    D = P.boundary(1)
    b = P.modules[1].labels.index("x1.1")
    a = next(j for j in range(D.target.rank) if not D[(b, j)])
    with pytest.raises(ValueError):
        cancel_pair(P, 1, b, a)


def test_padded_round_trip_random(corpus):
    rng = np.random.default_rng(11)
    for item in corpus:
        C = item.complex
        P = C
        for r in range(int(rng.integers(1, 4))):
            c = C.cat.objects[int(rng.integers(len(C.cat.objects)))]
            P = add_contractible_summand(P, c, int(rng.integers(1, P.top + 2)), f"pad{r}")
        out = tighten(P, seed=1, debug_verify_moves=True)
        assert out.ok, (item.name, out.obstruction)
        D = out.result
        assert is_tight(D).tight
        assert HomologyTable(D).table() == HomologyTable(P).table()
        again = tighten(D)
        assert again.trace == [] and again.result == D


def test_non_ahr_examples_obstruct():
    ex = non_ahr_examples()
    assert len(ex) >= 3
    for name, C in ex.items():
        assert validate(C).ok
        rep = is_algebraic_homotopy_representation(C)
        assert not rep.ok, name
        out = tighten(C)
        assert not out.ok and out.result is None, name
        assert out.obstruction.cls in C.cat.objects


def test_truncated_family_violates_condition_iii():
    C = non_ahr_examples()["C2xC2/Z3 rank<=1 truncation"]
    rep = is_algebraic_homotopy_representation(C)
    assert rep.n.values == (0, 0, 0, 0, -1)
    assert not rep.condition_iii_ok
    bad = [v for v in rep.condition_iii if not v.ok]
    assert all(v.m == C.lattice.whole for v in bad)


def test_mayer_vietoris_lemma_on_corpus(corpus):
    nonvacuous = 0
    for item in corpus:
        C = item.complex
        n = is_homology_sphere(C)
        for c in C.cat.objects:
            rep = verify_mayer_vietoris_lemma(C, c, n)
            assert rep.ok, (item.name, c, rep)
            nonvacuous += not rep.vacuous
    assert nonvacuous >= 5
