"""Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic throughout.

Run under pytest (``pytest tests/test_acceptance.py -s`` shows the lines even
without failures) or directly as ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import contextlib
import io
import os
import sys
import time
from functools import lru_cache

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oracles import count_orbits, fixed_subdivided_boundary, reduced_homology_ranks  # noqa: E402
from randgen import random_module  # noqa: E402

from orbitcx.ahr import (check_monotone, is_algebraic_homotopy_representation, is_tight,  # noqa: E402
                         non_ahr_examples, tighten, verify_mayer_vietoris_lemma)
from orbitcx.chaincx import (FreeChainComplex, HomologyTable, NotASphere, add_contractible_summand,  # noqa: E402
                             dim_function, hdim_function, intersect_images, is_homology_sphere)
from orbitcx.cli import main as cli_main  # noqa: E402
from orbitcx.exactalg import Coefficients, snf_diagonal  # noqa: E402
from orbitcx.gcw import build_corpus, fixed_subcomplex  # noqa: E402
from orbitcx.groups import catalog, enumerate_subgroups, family, prime_divisors, qd  # noqa: E402
from orbitcx.orbitcat import OrbitCategory, OrbitMatrix, deflation, rank_at, restriction_matrix  # noqa: E402
from orbitcx.superclass import (borel_smith_check, bs_infer, enumerate_bs_instances,  # noqa: E402
                                linear_sphere_dim_function, sylow_center_class)

SEED = 20240601
RANDOM_PER_GROUP = 100


@lru_cache(maxsize=None)
def corpus():
    return tuple(build_corpus())


def _subset(lat, h, k) -> bool:
    """H <= K on raw element sets (not through the lattice tables)."""
    return set(lat[h].elements) <= set(lat[k].elements)


# -- 1 ----------------------------------------------------------------------


def criterion_1():
    t0 = time.perf_counter()
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli_main(["qd-demo", "-p", "3"])
    out = buf.getvalue()
    lat = enumerate_subgroups(qd(3))
    res = bs_infer(lat, 3, family(lat, "rank_le:1"))
    elapsed = time.perf_counter() - t0
    z = sylow_center_class(lat, 3)
    order = [s.cls for s in res.chain]
    ok = (code == 2 and qd(3).order == 216 and res.infeasible
          and res.forced.get(z) == -1 and res.forced.get(0) == -1
          and z in order and 0 in order and order.index(z) < order.index(0)
          and "Infeasible" in out and out.index("Z(P)") < out.index("n(1) = -1")
          and elapsed <= 60)
    return ok, f"|G|=216, n(Z(P))=-1 then n(1)=-1, Infeasible, {elapsed:.1f}s (limit 60s)"


# -- 2 ----------------------------------------------------------------------


def criterion_2():
    t0 = time.perf_counter()
    items = corpus()
    combos = {(i.group_name, i.gset_spec) for i in items}
    primes_ok = all({i.p for i in items if (i.group_name, i.gset_spec) == c}
                    == set(prime_divisors(catalog()[c[0]].order)) for c in combos)
    checked, bad = 0, []
    for item in items:
        try:
            n = is_homology_sphere(item.complex)
        except NotASphere:
            continue
        checked += 1
        rep = borel_smith_check(n, item.p)
        if not rep.ok:
            bad.append(item.name)
    elapsed = time.perf_counter() - t0
    ok = len(combos) >= 12 and primes_ok and checked == len(items) and not bad and elapsed <= 120
    return ok, f"{len(combos)} combos, {checked} spheres, violations in {bad or 'none'}, {elapsed:.1f}s (limit 120s)"


# -- 3 ----------------------------------------------------------------------


def criterion_3():
    checked, bad = 0, []
    for name, G in catalog().items():
        lat = enumerate_subgroups(G)
        for c in range(len(lat.classes) - 1):  # G/H for every proper H; class 0 is the regular module
            n = linear_sphere_dim_function(lat, [lat.rep(c)])
            for p in prime_divisors(G.order):
                checked += 1
                if not borel_smith_check(n, p).ok:
                    bad.append((name, c, p))
    lat = enumerate_subgroups(catalog()["C2xC2"])
    n = linear_sphere_dim_function(lat, [0])
    inst = [i for i in enumerate_bs_instances(lat, 2) if i.kind == "ii"]
    identity = (len(inst) == 1 and n.at(inst[0].L) - n.at(inst[0].K) == 3
                and sum(n.at(m) - n.at(inst[0].K) for m in inst[0].mids) == 3 * (1 - 0))
    ok = not bad and n.values == (3, 1, 1, 1, 0) and identity
    return ok, f"{checked} (module, prime) checks, failures {bad or 'none'}; C2xC2 regular {n.values}, 3-0 = 3*(1-0)"


# -- 4 ----------------------------------------------------------------------


def _pad_randomly(C, rng, tag="pad"):
    P = C
    for r in range(int(rng.integers(1, 4))):
        c = C.cat.objects[int(rng.integers(len(C.cat.objects)))]
        P = add_contractible_summand(P, c, int(rng.integers(1, P.top + 2)), f"{tag}{r}")
    return P


def criterion_4():
    rng = np.random.default_rng(SEED)
    items = corpus()
    done, worst, failures = 0, 0.0, []
    for rnd in range(4):
        for item in items:
            P = _pad_randomly(item.complex, rng)
            if P.total_rank() > 200:
                continue
            t0 = time.perf_counter()
            out = tighten(P, seed=rnd)
            ok = out.ok
            if ok:
                D = out.result
                again = tighten(D)
                ok = (is_tight(D).tight and dim_function(D) == hdim_function(D)
                      and HomologyTable(D).table() == HomologyTable(P).table()
                      and again.ok and again.trace == [] and again.result == D)
            dt = time.perf_counter() - t0
            worst = max(worst, dt)
            if not ok or dt > 10:
                failures.append(item.name)
            done += 1
    ok = done >= 20 and not failures
    return ok, f"{done} padded instances, failures {failures or 'none'}, worst {worst:.2f}s (limit 10s)"


# -- 5 ----------------------------------------------------------------------


def criterion_5():
    ex = non_ahr_examples()
    bad = []
    for name, C in ex.items():
        rep = is_algebraic_homotopy_representation(C)
        out = tighten(C)
        if rep.ok or (rep.condition_ii_ok and rep.condition_iii_ok) or out.ok or out.obstruction is None:
            bad.append(name)
    return len(ex) >= 3 and not bad, f"{len(ex)} inputs violating (ii)/(iii), non-obstructed: {bad or 'none'}"


# -- 6 ----------------------------------------------------------------------


def _lemma_a(cat, rng, p) -> bool:
    """Random free complex (zero differentials suffice for Dim), brute-force Dim."""
    lat, G = cat.lattice, cat.group
    mods = [random_module(cat, rng, 3, 1 if i == 0 else 0) for i in range(int(rng.integers(1, 4)))]
    bds = [OrbitMatrix.zero(cat, mods[i + 1], mods[i], p) for i in range(len(mods) - 1)]
    C = FreeChainComplex(cat, mods, bds, [0] * mods[0].rank, Coefficients(p))
    d = dim_function(C)
    if not check_monotone(d).ok:
        return False
    # oracle: (G/B)^K != 0 iff some g has g^-1 K g <= B
    for c in cat.objects:
        K = lat[lat.rep(c)].elements
        top = -1
        for i, F in enumerate(mods):
            for t in F.types:
                B = set(lat[lat.rep(t)].elements)
                if any(all(G.mul[G.mul[G.inv[g], x], g] in B for x in K) for g in range(G.order)):
                    top = i
        if d[c] != top:
            return False
    return True


def _random_pair(lat, rng):
    k = int(rng.integers(len(lat)))
    below = [h for h in range(len(lat)) if _subset(lat, h, k)]
    return int(below[rng.integers(len(below))]), k


def _lemma_b(cat, rng) -> bool:
    F = random_module(cat, rng, 3, 1)
    h, k = _random_pair(cat.lattice, rng)
    R = restriction_matrix(cat, F, h, k)
    nk = rank_at(cat, F, k)
    if R.size == 0:
        return nk == 0
    diag = snf_diagonal(R)
    # injective with torsion-free cokernel over Z: exactly rank F(K) unit invariant factors
    return sum(1 for x in diag if x) == nk and all(x in (0, 1) for x in diag)


def _lemma_c(cat, rng, p) -> bool:
    lat = cat.lattice
    F = random_module(cat, rng, 3, 1)
    C = FreeChainComplex(cat, [F], [], [1] * F.rank, Coefficients(p))
    h = int(rng.integers(len(lat)))
    over = [k for k in range(len(lat)) if _subset(lat, h, k)]
    k, l = (int(over[rng.integers(len(over))]) for _ in range(2))
    rep = intersect_images(C, h, k, l)
    return rep.m_in_family and rep.equal_to_CM is True


def _lemma_d(cat, rng) -> bool:
    lat, G = cat.lattice, cat.group
    normal = [n for n in range(len(lat)) if len(lat.classes[lat.class_of[n]]) == 1]
    n = int(normal[rng.integers(len(normal))])
    F = random_module(cat, rng, 3, 1)
    ch = deflation(cat, n)
    got = sorted(ch.module(F)[0].types)
    qlat, lift = ch.new.lattice, ch.hom
    N = set(lat[n].elements)
    want = []
    for t in F.types:
        B = set(lat[lat.rep(t)].elements)
        if not N <= B:
            continue  # (G/B)^N is empty for normal N not inside B
        # X^N = G/B as a G/N-set; stabilizer of the base coset B
        stab = [q for q in range(qlat.group.order) if int(lift[q]) in B]
        want.append(int(qlat.class_of[qlat.id_of_elements(stab)]))
    return got == sorted(want)


def _lemma_e(rng):
    """MV lemma reports on tight corpus spheres and on tightened padded ones."""
    per_group: dict[str, int] = {}
    nonvacuous, bad = 0, []
    items = corpus()
    by_group: dict[str, list] = {}
    for item in items:
        by_group.setdefault(item.group_name, []).append(item)
    for g, its in by_group.items():
        count = 0
        while count < RANDOM_PER_GROUP:
            base = its[count % len(its)].complex
            if count < len(its):
                C = base
            else:
                out = tighten(_pad_randomly(base, rng), seed=count)
                if not out.ok:
                    bad.append((g, "tighten failed"))
                    count += 1
                    continue
                C = out.result
            n = is_homology_sphere(C)
            for c in C.cat.objects:
                rep = verify_mayer_vietoris_lemma(C, c, n)
                if rep.vacuous:
                    continue
                nonvacuous += 1
                if not (rep.tight_above and rep.ok):
                    bad.append((g, c))
            count += 1
        per_group[g] = count
    return per_group, nonvacuous, bad


def criterion_6():
    rng = np.random.default_rng(SEED)
    counts = {"a": 0, "b": 0, "c": 0, "d": 0}
    fails: list[tuple] = []
    for name, G in catalog().items():
        cat = OrbitCategory.of(G)
        p = prime_divisors(G.order)[0]
        for _ in range(RANDOM_PER_GROUP):
            for key, fn in (("a", lambda: _lemma_a(cat, rng, p)), ("b", lambda: _lemma_b(cat, rng)),
                            ("c", lambda: _lemma_c(cat, rng, p)), ("d", lambda: _lemma_d(cat, rng))):
                counts[key] += 1
                if not fn():
                    fails.append((key, name))
    per_group, nonvacuous, bad_e = _lemma_e(rng)
    fails += [("e",) + b for b in bad_e]
    ngroups = len(catalog())
    ok = (all(v == RANDOM_PER_GROUP * ngroups for v in counts.values())
          and all(v >= RANDOM_PER_GROUP for v in per_group.values()) and nonvacuous > 0 and not fails)
    detail = (f"(a)-(d) {RANDOM_PER_GROUP} instances x {ngroups} groups each; (e) {sum(per_group.values())} complexes "
              f"over {len(per_group)} corpus groups, {nonvacuous} non-vacuous reports; failures {fails[:5] or 'none'}")
    return ok, detail


# -- 7 ----------------------------------------------------------------------


def criterion_7():
    checks, bad = 0, []
    for item in corpus():
        C, lat = item.complex, item.complex.lattice
        act = item.omega.action.tolist()
        for h in range(len(lat)):
            els = list(lat[h].elements)
            betti = reduced_homology_ranks(fixed_subdivided_boundary(act, els), item.p)
            E = C.evaluated(h)
            same = all(E.reduced_homology(d).rank == betti.get(d, 0) for d in range(-1, C.top + 1))
            same &= fixed_subcomplex(item.X, els).dim == count_orbits(act, els) - 2
            checks += 1
            if not same:
                bad.append((item.name, h))
    return not bad, f"{checks} (complex, subgroup) pairs vs brute-force fixed-point homology, mismatches {bad or 'none'}"


# -- 8 ----------------------------------------------------------------------


def criterion_8():
    tight, bad = 0, []
    for item in corpus():
        C = item.complex
        if not is_tight(C).tight:
            continue
        tight += 1
        if not is_algebraic_homotopy_representation(C).ok:
            bad.append(item.name)
    ok = tight == len(corpus()) and not bad
    return ok, f"{tight}/{len(corpus())} corpus spheres tight, AHR failures {bad or 'none'}"


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


def _line(k: int) -> tuple[bool, str]:
    ok, detail = CRITERIA[k]()
    return ok, f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}"


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    ok, line = _line(k)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [_line(k) for k in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
