import json

import numpy as np
import pytest

from orbitcx.chaincx import (FreeChainComplex, HomologyTable, NotASphere, SuperClassFunction, add_contractible_summand,
                             change_basis, dim_function, direct_sum, hdim_function, intersect_images,
                             is_homology_sphere, is_oriented, restriction_on_homology, splitting_quotient, validate,
                             with_coefficients, zero_complex)
from orbitcx.exactalg import Coefficients
from orbitcx.groups import catalog
from orbitcx.orbitcat import FreeOrbitModule, OrbitCategory, OrbitMatrix


def test_superclass_function_basics():
    cat = OrbitCategory.of(catalog()["C2xC2"])
    n = SuperClassFunction.from_dict(cat.lattice, {0: 3, 1: 1})
    assert n.values == (3, 1, -1, -1, -1)
    assert n.support() == frozenset({0, 1})
    assert SuperClassFunction.from_json(cat.lattice, json.loads(json.dumps(n.to_json()))) == n
    assert (n + SuperClassFunction.constant(cat.lattice, 1)).values == (4, 2, 0, 0, 0)


def test_zero_complex_is_empty_sphere():
    cat = OrbitCategory.of(catalog()["C2"])
    Z0 = zero_complex(cat, Coefficients(2))
    assert is_homology_sphere(Z0).values == (-1, -1)
    assert dim_function(Z0).values == hdim_function(Z0).values == (-1, -1)


def test_corpus_complexes_are_valid_spheres(corpus):
    for item in corpus:
        C = item.complex
        assert validate(C).strict_ok, item.name
        n = is_homology_sphere(C)
        # [DERIVED] orbit count minus two on simplex boundaries
        for c in C.cat.objects:
            h = C.cat.sub(c)
            assert n[c] == item.omega.count_orbits(C.lattice[h].elements) - 2, item.name
        assert dim_function(C) == hdim_function(C) == n


def test_json_roundtrip(corpus):
    for item in corpus[:6]:
        C = item.complex
        D = FreeChainComplex.from_json(json.loads(C.dumps()))
        assert D == C
        assert HomologyTable(D).table() == HomologyTable(C).table()


def test_padding_keeps_homology_and_breaks_tightness(corpus):
    C = corpus[7].complex  # C2xC2 regular
    P = add_contractible_summand(C, 0, C.top + 1)
    assert validate(P).ok
    assert HomologyTable(P).table() == HomologyTable(C).table()
    assert dim_function(P)[0] == C.top + 1 != hdim_function(P)[0]


def test_change_basis_preserves_homology(corpus):
    C = corpus[3].complex  # C3 regular over Z/3
    F = C.modules[0]
    ph = {(i, i): {0: 1} for i in range(F.rank)}
    phi_inv = dict(ph)
    same = [(i, j) for i in range(F.rank) for j in range(F.rank) if i != j and F.types[i] == F.types[j]]
    i, j = same[0]
    ph[(i, j)] = {0: 1}
    phi_inv[(i, j)] = {0: -1}
    D = change_basis(C, 0, OrbitMatrix(C.cat, F, F, ph, 3), OrbitMatrix(C.cat, F, F, phi_inv, 3))
    assert validate(D).ok
    assert HomologyTable(D).table() == HomologyTable(C).table()


def test_direct_sum_and_coefficient_change(corpus):
    C = corpus[0].complex  # C2 regular over Z/2
    S = direct_sum(C, C)
    assert validate(S).ok
    with pytest.raises(NotASphere):
        is_homology_sphere(S)
    Cz = with_coefficients(C, Coefficients(None))
    assert validate(Cz).ok


def test_orientation_of_c2_regular_over_z():
    # the antipodal circle: W = C2 acts on H_0 of S^0 by the sign over Z
    from orbitcx.gcw import boundary_sphere
    from orbitcx.groups import GSet
    cat = OrbitCategory.of(catalog()["C2"])
    _, C = boundary_sphere(cat, GSet.regular(cat.lattice), Coefficients(None))
    assert not is_oriented(C).oriented
    _, C3 = boundary_sphere(cat, GSet.regular(cat.lattice), Coefficients(2))
    assert is_oriented(C3).oriented


def test_restriction_on_homology_and_intersections(corpus):
    item = next(i for i in corpus if i.group_name == "C2xC2" and i.gset_spec == "cosets:1,2")
    C = item.complex
    lat = C.lattice
    n = is_homology_sphere(C)
    for h in range(len(lat)):
        for k in range(len(lat)):
            if h != k and lat.is_subgroup(h, k) and n.at(h) == n.at(k):
                M = restriction_on_homology(C, h, k, n.at(h))
                assert M.shape == (1, 1) and M[0, 0] % 2 == 1
    rep = intersect_images(C, 0, 1, 2)
    assert rep.M == lat.whole and rep.m_in_family and rep.equal_to_CM


def test_splitting_quotient_shape(corpus):
    C = corpus[7].complex
    Q = splitting_quotient(C, 0)
    assert Q.dims[0] == C.modules[0].types.count(0) * 4
