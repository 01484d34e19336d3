"""Algebraic homotopy representations, tightness and the tightening reduction.

Tightening works over Z/p by Gaussian cancellation of basis pairs of the
same orbit type (H) whose connecting entry is a unit of
End(R[G/H^?]) = R[W_G(H)].  Classes are processed from large subgroups
to small ones; at each class the top degree is cancelled until the
chain dimension at H equals the sphere degree n(H).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from . import exactalg
from .chaincx import (FreeChainComplex, HomologyTable, SuperClassFunction, change_basis, dim_function,
                      hdim_function, image_coordinates, intersect_images, is_homology_sphere, restriction_on_homology,
                      splitting_quotient, sum_of_images_homology)
from .exactalg import Coefficients, WrongRing
from .orbitcat import (FreeOrbitModule, OrbitCategory, OrbitMatrix, evaluate_matrix, rank_at, rw_inverse, rw_mul)


# ---------------------------------------------------------------------------
# monotonicity and the AHR conditions
# ---------------------------------------------------------------------------


@dataclass
class MonotoneReport:
    ok: bool
    violations: list[tuple[int, int]]  # class pairs (H) <= (K) breaking the inequality


def check_monotone(n: SuperClassFunction) -> MonotoneReport:
    leq = n.lattice.class_leq
    bad = [(a, b) for a in range(len(n.values)) for b in range(len(n.values))
           if a != b and leq[a, b] and n[a] < n[b]]
    return MonotoneReport(not bad, bad)


def check_strictly_monotone(n: SuperClassFunction) -> MonotoneReport:
    leq = n.lattice.class_leq
    bad = [(a, b) for a in range(len(n.values)) for b in range(len(n.values))
           if a != b and leq[a, b] and n[a] <= n[b]]
    return MonotoneReport(not bad, bad)


def _overgroups(C: FreeChainComplex, h: int) -> list[int]:
    """Subgroups K > H (proper) in the family."""
    lat = C.lattice
    return [k for k in range(len(lat)) if k != h and lat.is_subgroup(h, k) and C.cat.family.contains_subgroup(k)]


def _is_unit(x, coeffs: Coefficients) -> bool:
    x = int(x)
    return x % coeffs.p != 0 if coeffs.is_field else abs(x) == 1


@dataclass
class ConditionIIVerdict:
    h: int
    k: int
    degree: int
    ok: bool


def check_condition_ii(C: FreeChainComplex, n: SuperClassFunction, table: HomologyTable | None = None
                       ) -> list[ConditionIIVerdict]:
    """Restriction maps r^K_H between equal sphere degrees are homology isomorphisms.

    H runs over class representatives and K over all overgroups, so every
    G-map is covered up to conjugation maps, which are isomorphisms.
    """
    table = table or HomologyTable(C)
    out = []
    for c in C.cat.objects:
        h = C.cat.sub(c)
        for k in _overgroups(C, h):
            if n.at(k) != n[c]:
                continue
            d = n[c]
            M = restriction_on_homology(C, h, k, d, table)
            ok = M.shape == (1, 1) and _is_unit(M[0, 0], C.coeffs)
            out.append(ConditionIIVerdict(h, k, d, ok))
    return out


@dataclass
class ConditionIIIVerdict:
    h: int
    k: int
    l: int
    m: int
    ok: bool
    intersection_ok: bool | None = None


def check_condition_iii(C: FreeChainComplex, n: SuperClassFunction) -> list[ConditionIIIVerdict]:
    out = []
    lat, fam = C.lattice, C.cat.family
    for c in C.cat.objects:
        h = C.cat.sub(c)
        if n[c] <= -1:
            continue
        ks = [k for k in _overgroups(C, h) if n.at(k) == n[c]]
        for k, l in combinations(ks, 2):
            m = lat.generated_subgroup(k, l)
            ok = fam.contains_subgroup(m) and n.at(m) == n[c]
            rep = intersect_images(C, h, k, l)
            inter = None if rep.equal_to_CM is None else bool(rep.equal_to_CM)
            out.append(ConditionIIIVerdict(h, k, l, m, ok, inter))
    return out


def unique_maximal_classes(C: FreeChainComplex, n: SuperClassFunction) -> dict[int, list[int]]:
    """For each class (H) with n(H) > -1, the maximal classes of F_H."""
    leq = C.lattice.class_leq
    out = {}
    for c in C.cat.objects:
        if n[c] <= -1:
            continue
        FH = [k for k in C.cat.objects if leq[c, k] and n[k] == n[c]]
        out[c] = [k for k in FH if not any(j != k and leq[k, j] for j in FH)]
    return out


@dataclass
class AHRReport:
    n: SuperClassFunction
    monotone: MonotoneReport
    condition_ii: list[ConditionIIVerdict]
    condition_iii: list[ConditionIIIVerdict]
    maximal: dict[int, list[int]] = field(default_factory=dict)

    @property
    def condition_ii_ok(self) -> bool:
        return all(v.ok for v in self.condition_ii)

    @property
    def condition_iii_ok(self) -> bool:
        return all(v.ok for v in self.condition_iii)

    @property
    def ok(self) -> bool:
        return self.monotone.ok and self.condition_ii_ok and self.condition_iii_ok

    def to_json(self) -> dict:
        return {
            "n": list(self.n.values),
            "monotone": self.monotone.ok,
            "monotone_violations": [list(v) for v in self.monotone.violations],
            "condition_ii": [{"H": v.h, "K": v.k, "degree": v.degree, "ok": v.ok} for v in self.condition_ii],
            "condition_iii": [{"H": v.h, "K": v.k, "L": v.l, "M": v.m, "ok": v.ok} for v in self.condition_iii],
            "maximal": {str(k): v for k, v in self.maximal.items()},
            "ok": self.ok,
        }


def is_algebraic_homotopy_representation(C: FreeChainComplex) -> AHRReport:
    table = HomologyTable(C)
    n = is_homology_sphere(C, table)
    return AHRReport(n, check_monotone(n), check_condition_ii(C, n, table), check_condition_iii(C, n),
                     unique_maximal_classes(C, n))


@dataclass
class TightReport:
    tight: bool
    dim: SuperClassFunction
    hdim: SuperClassFunction
    witnesses: list[int]  # classes where dim != hdim


def is_tight(C: FreeChainComplex) -> TightReport:
    d, h = dim_function(C), hdim_function(C)
    bad = [c for c in C.cat.objects if d[c] != h[c]]
    return TightReport(not bad, d, h, bad)


# ---------------------------------------------------------------------------
# tightening
# ---------------------------------------------------------------------------


@dataclass
class Move:
    cls: int
    degree: int
    cancelled: tuple[str, str]  # labels of the (degree, degree - 1) basis pair
    change_of_basis: dict | None = None  # OrbitMatrix JSON of phi on C_{degree-1}

    def to_json(self) -> dict:
        return {"class": self.cls, "degree": self.degree, "cancelled": list(self.cancelled),
                "change_of_basis": self.change_of_basis}


@dataclass
class Obstruction:
    cls: int
    degree: int
    reason: str

    def to_json(self) -> dict:
        return {"class": self.cls, "degree": self.degree, "reason": self.reason}


@dataclass
class TightenOutcome:
    result: FreeChainComplex | None
    obstruction: Obstruction | None
    trace: list[Move]

    @property
    def ok(self) -> bool:
        return self.obstruction is None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "obstruction": self.obstruction.to_json() if self.obstruction else None,
            "trace": [m.to_json() for m in self.trace],
            "result": self.result.to_json() if self.result is not None else None,
        }


class MoveBrokeHomology(AssertionError):
    pass


def cancel_pair(C: FreeChainComplex, degree: int, b: int, a: int) -> FreeChainComplex:
    """Gaussian cancellation of b in C_degree against a in C_{degree-1}.

    Needs d[b][a] to be a unit u of End(R[G/H^?]); then
    d'[b'][a'] = d[b'][a'] - d[b'][a] u^-1 d[b][a'] (row convention).
    """
    cat, p = C.cat, C.coeffs.p
    D = C.boundary(degree)
    H = D.source.types[b]
    if D.target.types[a] != H:
        raise ValueError("cancelled pair must have equal orbit types")
    W = cat.weyl_data(H)
    u = {W.pos[c]: v for c, v in D[(b, a)].items()}
    uinv = rw_inverse(W, u, p)
    if uinv is None:
        raise ValueError("connecting entry is not a unit")
    uinv_e = {int(W.cosets[w]): v for w, v in uinv.items()}
    ent = {k: dict(e) for k, e in D.entries.items()}
    col_a = D.col_entries(a)
    row_b = D.row_entries(b)
    for bp, e1 in col_a.items():
        if bp == b:
            continue
        left = cat.compose_entry(e1, H, H, uinv_e, p)
        for ap, e2 in row_b.items():
            if ap == a:
                continue
            corr = cat.compose_entry(left, H, D.target.types[ap], e2, p)
            acc = ent.setdefault((bp, ap), {})
            for c, v in corr.items():
                acc[c] = acc.get(c, 0) - v
    keep_d = [i for i in range(D.source.rank) if i != b]
    keep_dm = [j for j in range(D.target.rank) if j != a]
    newD = OrbitMatrix(cat, D.source, D.target, ent, p).submatrix(keep_d, keep_dm)
    mods = list(C.modules)
    mods[degree] = mods[degree].select(keep_d)
    mods[degree - 1] = mods[degree - 1].select(keep_dm)
    bds = list(C.boundaries)
    bds[degree - 1] = newD
    if degree + 1 <= C.top:
        up = bds[degree]
        bds[degree] = up.submatrix(list(range(up.source.rank)), keep_d)
    if degree - 1 >= 1:
        down = bds[degree - 2]
        bds[degree - 2] = down.submatrix(keep_dm, list(range(down.target.rank)))
    aug = C.augmentation
    if degree - 1 == 0:
        aug = [v for j, v in enumerate(aug) if j != a]
    # drop empty top degrees
    while mods and mods[-1].rank == 0:
        mods.pop()
        if bds:
            bds.pop()
    return FreeChainComplex(cat, mods, bds, aug if mods else [], C.coeffs)


def _rw_from_entry(W, e: dict) -> dict:
    return {W.pos[c]: v for c, v in e.items()}


def _find_unit_row(C: FreeChainComplex, degree: int, b: int, targets: list[int], rng: np.random.Generator,
                   tries: int) -> tuple[int, dict] | None:
    """A column k and coefficients c_j (j != k) with v_k + sum_j v_j c_j a unit.

    Returns (k, {j: c_j as R[W] dict}); an empty dict means v_k is
    already a unit.
    """
    D = C.boundary(degree)
    H = D.source.types[b]
    W = C.cat.weyl_data(H)
    p = C.coeffs.p
    v = {j: _rw_from_entry(W, D[(b, j)]) for j in targets}
    for k in targets:
        if v[k] and rw_inverse(W, v[k], p) is not None:
            return k, {}
    nz = [j for j in targets if v[j]]
    if not nz:
        return None

    def candidate(k, cs):
        tot = dict(v[k])
        for j, c in cs.items():
            for w, x in rw_mul(W, v[j], c, p).items():
                tot[w] = (tot.get(w, 0) + x) % p
        return {w: x for w, x in tot.items() if x}

    n = W.order
    others_for = {k: [j for j in nz if j != k] for k in targets}
    # exhaustive search when the space is tiny
    for k in targets:
        js = others_for[k]
        if len(js) and p ** (n * len(js)) <= 4096:
            for flat in product(range(p), repeat=n * len(js)):
                cs = {j: {w: flat[a * n + w] for w in range(n) if flat[a * n + w]} for a, j in enumerate(js)}
                cand = candidate(k, cs)
                if cand and rw_inverse(W, cand, p) is not None:
                    return k, {j: c for j, c in cs.items() if c}
    for _ in range(tries):
        k = targets[int(rng.integers(len(targets)))]
        js = others_for[k]
        if not js:
            continue
        cs = {}
        for j in js:
            coeffs = rng.integers(0, p, size=n)
            cs[j] = {w: int(x) for w, x in enumerate(coeffs) if x}
        cand = candidate(k, cs)
        if cand and rw_inverse(W, cand, p) is not None:
            return k, {j: c for j, c in cs.items() if c}
    return None


def _signature(C: FreeChainComplex) -> dict:
    return HomologyTable(C).table()


def tighten(C: FreeChainComplex, seed: int = 0, debug_verify_moves: bool = False, tries: int = 2000
            ) -> TightenOutcome:
    """Cancel basis pairs until dim C(H) = n(H) at every class H."""
    if not C.coeffs.is_field:
        raise WrongRing("tightening is implemented over Z/p only")
    n = is_homology_sphere(C)
    rng = np.random.default_rng(seed)
    trace: list[Move] = []
    ref = _signature(C) if debug_verify_moves else None
    cat, lat = C.cat, C.lattice
    order = sorted(cat.objects, key=lambda c: (-lat.class_order(c), c))
    leq = lat.class_leq
    for c in order:
        h = cat.sub(c)
        while True:
            d = max((i for i, F in enumerate(C.modules) if rank_at(cat, F, h)), default=-1)
            if d <= n[c]:
                break
            if d == 0:
                return TightenOutcome(None, Obstruction(c, 0, "degree 0 above the sphere degree"), trace)
            # larger orbit types may not live above n(H)
            for i in range(n[c] + 1, d + 1):
                if any(t != c and leq[c, t] for t in C.modules[i].types):
                    return TightenOutcome(None, Obstruction(c, i, "larger orbit types above the sphere degree "
                                                                  "(monotonicity fails)"), trace)
            D = C.boundary(d)
            rows = [i for i, t in enumerate(D.source.types) if t == c]
            cols = [j for j, t in enumerate(D.target.types) if t == c]
            S = D.submatrix(rows, cols)
            Sh = evaluate_matrix(S, h)
            if exactalg.rank(Sh, C.coeffs) < Sh.shape[0]:
                return TightenOutcome(None, Obstruction(c, d, "top boundary of the isotypic layer is not "
                                                              "injective (H_d(S_H C) != 0)"), trace)
            b = rows[0]
            found = _find_unit_row(C, d, b, cols, rng, tries)
            if found is None:
                return TightenOutcome(None, Obstruction(c, d, "no unit entry after basis change"), trace)
            k, cs = found
            phi_json = None
            if cs:
                Fm = C.modules[d - 1]
                W = cat.weyl_data(c)
                ide = {(i, i): {0: 1} for i in range(Fm.rank)}
                ph = dict(ide)
                phi_inv = dict(ide)
                for j, cj in cs.items():
                    ce = {int(W.cosets[w]): x for w, x in cj.items()}
                    ph[(j, k)] = ce
                    phi_inv[(j, k)] = {x: -y for x, y in ce.items()}
                phi = OrbitMatrix(cat, Fm, Fm, ph, C.coeffs.p)
                C = change_basis(C, d - 1, phi, OrbitMatrix(cat, Fm, Fm, phi_inv, C.coeffs.p))
                phi_json = phi.to_json()
            labels = (C.modules[d].labels[b], C.modules[d - 1].labels[k])
            C = cancel_pair(C, d, b, k)
            trace.append(Move(c, d, labels, phi_json))
            if debug_verify_moves and _signature(C) != ref:
                raise MoveBrokeHomology(f"move {len(trace)} at class {c}, degree {d} changed homology")
    return TightenOutcome(C, None, trace)


# ---------------------------------------------------------------------------
# Mayer-Vietoris lemma
# ---------------------------------------------------------------------------


@dataclass
class MayerVietorisReport:
    cls: int
    vacuous: bool
    tight_above: bool
    KH: list[int] = field(default_factory=list)
    M: int | None = None
    subsets_checked: int = 0
    sums_are_spheres: bool = True
    maps_iso: bool = True
    sum_to_CH_iso: bool = True
    vanishing: bool = True

    @property
    def ok(self) -> bool:
        return self.vacuous or (self.tight_above and self.M is not None and self.sums_are_spheres
                                and self.maps_iso and self.sum_to_CH_iso and self.vanishing)


def _is_unit_matrix(M: np.ndarray, coeffs: Coefficients) -> bool:
    return M.shape == (1, 1) and _is_unit(M[0, 0], coeffs)


def verify_mayer_vietoris_lemma(C: FreeChainComplex, cls_id: int, n: SuperClassFunction | None = None,
                                max_subsets: int = 64) -> MayerVietorisReport:
    """Check the sum-of-images statement and H_{n+1}(S_H C) = 0 at class ``cls_id``."""
    n = n or is_homology_sphere(C)
    lat, cat = C.lattice, C.cat
    h = cat.sub(cls_id)
    dims = dim_function(C)
    tight_above = all(dims[k] == n[k] for k in cat.objects if k != cls_id and lat.class_leq[cls_id, k])
    nh = n[cls_id]
    KH = [k for k in _overgroups(C, h) if n.at(k) == nh]
    rep = MayerVietorisReport(cls_id, vacuous=(not KH or nh < 0), tight_above=tight_above, KH=KH)
    if rep.vacuous:
        return rep
    M = KH[0]
    for k in KH[1:]:
        M = lat.generated_subgroup(M, k)
    if M not in KH:
        rep.M = None
        return rep
    rep.M = M
    subsets = [KH[:i] for i in range(1, len(KH) + 1)] + [[k] for k in KH]
    subsets += [list(s) for s in combinations(KH, 2)][: max(0, max_subsets - len(subsets))]
    for ks in subsets:
        res = sum_of_images_homology(C, h, ks, m=M, degree=nh)
        nonzero = [(deg, g) for deg, g in zip(range(-1, C.top + 1), res.homology) if not g.is_zero()]
        sphere = len(nonzero) == 1 and nonzero[0][0] == nh and nonzero[0][1].is_free_rank_one()
        rep.sums_are_spheres &= sphere
        rep.maps_iso &= res.from_M is not None and _is_unit_matrix(res.from_M, C.coeffs)
        rep.subsets_checked += 1
    # full sum -> C(H) on H_n
    full = [sorted(set().union(*[set(image_coordinates(C, h, k)[i]) for k in KH])) for i in range(len(C.modules))]
    E = C.evaluated(h)
    S = E.restricted(full)
    src = S.reduced_homology(nh)
    tgt = E.reduced_homology(nh)
    if nh == -1:
        inc = C.coeffs.identity(1)
    else:
        inc = C.coeffs.zeros(E.dims[nh], len(full[nh]))
        for b, c in enumerate(full[nh]):
            inc[c, b] = 1
    rep.sum_to_CH_iso = _is_unit_matrix(exactalg.induced_map(inc, src, tgt), C.coeffs)
    Q = splitting_quotient(C, cls_id)
    if nh + 1 <= C.top:
        rep.vanishing = Q.unreduced_homology(nh + 1).is_zero() if Q.dims[nh + 1] else True
    return rep


def trace_json(trace: list[Move]) -> str:
    return json.dumps([m.to_json() for m in trace], sort_keys=True)


# ---------------------------------------------------------------------------
# constructed complexes that fail the AHR conditions
# ---------------------------------------------------------------------------


def _cyclic_restriction_failure(q: int, p: int) -> FreeChainComplex:
    """C_q over Z/p with p prime to q: two fixed points and a free edge orbit.

    C(G) = S^0 = C(1), but the edge orbit bounds u - v, so the restriction
    H_0(C(G)) -> H_0(C(1)) is zero.
    """
    from .groups import cyclic
    cat = OrbitCategory.of(cyclic(q))
    lat = cat.lattice
    top = len(lat.classes) - 1
    coset_of, _ = lat.cosets(lat.rep(0))
    g = lat.group.generators[0]
    g = int(coset_of[lat.group.index[g]])
    c0 = FreeOrbitModule((top, top, 0), ("u", "v", "w"))
    c1 = FreeOrbitModule((0,), ("e",))
    d1 = OrbitMatrix(cat, c1, c0, {(0, 0): {0: 1}, (0, 1): {0: -1}, (0, 2): {g: 1, 0: -1}}, p)
    return FreeChainComplex(cat, [c0, c1], [d1], [1, 1, 1], Coefficients(p))


def _klein_truncated_family(p: int = 3) -> FreeChainComplex:
    """C2 x C2 over the rank <= 1 family: points of each order-two type and one free edge orbit.

    n = 0 at 1 and at every order-two subgroup, but the join of two of
    them is the whole group, which is outside the family.
    """
    from .groups import klein_four
    G = klein_four()
    cat = OrbitCategory.of(G, "rank_le:1")
    lat = cat.lattice
    h2 = lat.rep(3)
    g = next(x for x in range(G.order) if not lat.membership[h2, x])
    coset_of, _ = lat.cosets(h2)
    c0 = FreeOrbitModule((1, 2, 3), ("u0", "u1", "u2"))
    c1 = FreeOrbitModule((0,), ("e",))
    d1 = OrbitMatrix(cat, c1, c0, {(0, 0): {0: 1}, (0, 1): {0: -1}, (0, 2): {0: 1, int(coset_of[g]): -1}}, p)
    return FreeChainComplex(cat, [c0, c1], [d1], [1, 1, 1], Coefficients(p))


def non_ahr_examples() -> dict[str, FreeChainComplex]:
    """Homology spheres violating condition (ii) or (iii), keyed by a short name."""
    return {
        "C2/Z3 zero restriction": _cyclic_restriction_failure(2, 3),
        "C2/Z5 zero restriction": _cyclic_restriction_failure(2, 5),
        "C3/Z2 zero restriction": _cyclic_restriction_failure(3, 2),
        "C2xC2/Z3 rank<=1 truncation": _klein_truncated_family(3),
    }
