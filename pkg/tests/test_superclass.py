from collections import Counter
from fractions import Fraction

import pytest

from orbitcx.chaincx import SuperClassFunction
from orbitcx.groups import GSet, catalog, cyclic, enumerate_subgroups, family, prime_divisors, qd
from orbitcx.superclass import (borel_smith_check, bs_infer, check_monotone_p_group_lemma, combine,
                                enumerate_bs_instances, linear_sphere_dim_function, sylow_center_class)


def lat_of(name):
    return enumerate_subgroups(catalog()[name])


def test_instance_enumeration_examples():
    # [DERIVED] lattice scans
    assert Counter(i.kind for i in enumerate_bs_instances(lat_of("C4"), 2)) == Counter({"iii": 1})
    assert Counter(i.kind for i in enumerate_bs_instances(lat_of("Q8"), 2)) == Counter({"iv": 1, "iii": 3, "ii": 1})
    assert Counter(i.kind for i in enumerate_bs_instances(lat_of("C3"), 3)) == Counter({"i": 1})
    assert enumerate_bs_instances(lat_of("C2"), 2) == []


def test_dedup_only_merges_conjugates():
    lat = lat_of("S3")
    a = enumerate_bs_instances(lat, 3, dedup=True)
    b = enumerate_bs_instances(lat, 3, dedup=False)
    assert len(a) == len(b) == 1
    lat = enumerate_subgroups(qd(3))
    assert len(enumerate_bs_instances(lat, 3)) < len(enumerate_bs_instances(lat, 3, dedup=False))


def test_type_ii_intermediates():
    lat = lat_of("C3xC3")
    inst = [i for i in enumerate_bs_instances(lat, 3) if i.kind == "ii"]
    assert len(inst) == 1 and len(inst[0].mids) == 4


def test_borel_smith_examples():
    lat = lat_of("C2xC2")
    n = linear_sphere_dim_function(lat, [0])
    assert n.values == (3, 1, 1, 1, 0)
    inst = [i for i in enumerate_bs_instances(lat, 2) if i.kind == "ii"][0]
    assert n.at(inst.L) - n.at(inst.K) == 3 * (1 - 0) == sum(n.at(m) - n.at(inst.K) for m in inst.mids)
    assert borel_smith_check(n, 2).ok
    q8 = lat_of("Q8")
    nq = linear_sphere_dim_function(q8, [0])
    assert (nq[0], nq[1]) == (7, 3) and borel_smith_check(nq, 2).ok
    c4 = lat_of("C4")
    bad = SuperClassFunction.from_dict(c4, {0: 3, 1: 0})
    rep = borel_smith_check(bad, 2)
    assert not rep.ok and rep.violations[0].instance.kind == "iii" and rep.violations[0].lhs == 3


def test_linear_spheres_pass_everywhere():
    for name, G in catalog().items():
        lat = enumerate_subgroups(G)
        for c in range(len(lat.classes)):
            for copies in (1, 2):
                n = linear_sphere_dim_function(lat, [lat.rep(c)], copies)
                for p in prime_divisors(G.order):
                    assert borel_smith_check(n, p).ok, (name, c, copies, p)
                    assert check_monotone_p_group_lemma(n, p).ok


def test_linear_sphere_trivial_and_combine():
    lat = lat_of("S3")
    n = linear_sphere_dim_function(lat, GSet.trivial(lat, 1))
    assert set(n.values) == {0}
    m = linear_sphere_dim_function(lat, [0])
    assert combine(n, m).values == tuple(a + b + 1 for a, b in zip(n.values, m.values))
    assert combine(n, m) == linear_sphere_dim_function(lat, [lat.whole, 0])
    with pytest.raises(ValueError):
        linear_sphere_dim_function(lat, [0], 0)


def test_monotone_lemma_violation_reported():
    lat = lat_of("C2")
    rep = check_monotone_p_group_lemma(SuperClassFunction.from_dict(lat, {0: 0, 1: 2}), 2)
    assert not rep.ok and rep.violations == [(0, 1)]
    assert check_monotone_p_group_lemma(SuperClassFunction.constant(lat, -1), 2).ok


def test_qd3_infer_chain():
    lat = enumerate_subgroups(qd(3))
    res = bs_infer(lat, 3, family(lat, "rank_le:1"))
    z = sylow_center_class(lat, 3)
    assert lat.class_order(z) == 3
    assert res.infeasible
    order = [s.cls for s in res.chain]
    assert order.index(z) < order.index(0)
    assert res.forced[z] == -1 and res.forced[0] == -1


def test_infer_feasible_cases():
    lat = lat_of("C3xC3")
    res = bs_infer(lat, 3, family(lat, "all"))
    assert not res.infeasible
    n = linear_sphere_dim_function(lat, [0])  # a feasible point
    assert borel_smith_check(n, 3).ok and n[0] >= 0
    assert bs_infer(lat_of("C2"), 2, family(lat_of("C2"), "all")).chain == []


def test_infer_rank_one_c2xc2_forces_values():
    # off-family C2xC2 pinned to -1: n(1) + 2(-1) = sum n(H_i), nothing contradictory
    lat = lat_of("C2xC2")
    res = bs_infer(lat, 2, family(lat, "rank_le:1"))
    assert not res.infeasible
    assert res.forced.get(4) is None
