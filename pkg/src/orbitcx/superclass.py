"""Borel-Smith conditions, the equality-propagation engine and linear-sphere dimension functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .chaincx import SuperClassFunction
from .groups import Family, GSet, SubgroupLattice, _factor

KINDS = ("i", "ii", "iii", "iv")


@dataclass(frozen=True)
class BSInstance:
    """One Borel-Smith configuration, as subgroup ids.

    ``mids`` holds the p + 1 intermediate subgroups L_i of a type (ii)
    instance; ``n`` is the top subgroup N of types (iii) and (iv).
    """

    kind: str
    p: int
    L: int
    K: int
    n: int | None = None
    mids: tuple[int, ...] = ()

    def describe(self, lat: SubgroupLattice) -> str:
        cl = lat.class_of
        s = f"({self.kind}) L={cl[self.L]} K={cl[self.K]}"
        if self.n is not None:
            s += f" N={cl[self.n]}"
        if self.mids:
            s += " L_i=" + ",".join(str(cl[m]) for m in self.mids)
        return s

    def to_json(self, lat: SubgroupLattice) -> dict:
        cl = lat.class_of
        out = {"kind": self.kind, "p": self.p, "L": cl[self.L], "K": cl[self.K]}
        if self.n is not None:
            out["N"] = cl[self.n]
        if self.mids:
            out["L_i"] = [cl[m] for m in self.mids]
        return out


def _orders(lat: SubgroupLattice) -> np.ndarray:
    return np.array([s.order for s in lat.subgroups], dtype=np.int64)


def _canonical(lat: SubgroupLattice, ids: Sequence[int]) -> tuple[int, ...]:
    """Least image of a subgroup tuple under simultaneous conjugation."""
    imgs = np.stack([lat.conj[i] for i in ids], axis=1)  # (|G|, len(ids))
    return min(map(tuple, imgs.tolist()))


def _normal_pairs(lat: SubgroupLattice, indices: Iterable[int]):
    """(L, K) with L normal in K and [K:L] in ``indices``."""
    orders = _orders(lat)
    idx = set(indices)
    for k in range(len(lat)):
        for l in np.nonzero(lat.contains[k])[0]:
            l = int(l)
            if orders[k] % orders[l] == 0 and orders[k] // orders[l] in idx and lat.is_normal_in(l, k):
                yield l, k


def enumerate_bs_instances(lat: SubgroupLattice, p: int, dedup: bool = True) -> list[BSInstance]:
    orders = _orders(lat)
    out: list[BSInstance] = []
    seen: set = set()

    def add(inst: BSInstance, key_ids):
        if dedup:
            key = (inst.kind, _canonical(lat, key_ids))
            if key in seen:
                return
            seen.add(key)
        out.append(inst)

    pairs = list(_normal_pairs(lat, (p, p * p, 4, 8) if p == 2 else (p, p * p)))
    for l, k in pairs:
        q = orders[k] // orders[l]
        if q == p and p != 2:
            add(BSInstance("i", p, l, k), (l, k))
        elif q == p * p and lat.subquotient_type(k, l).kind == "CpxCp":
            mids = tuple(int(m) for m in np.nonzero(lat.contains[k])[0]
                         if orders[m] == p * orders[l] and lat.contains[m, l])
            add(BSInstance("ii", p, l, k, mids=mids), (l, k))
    if p == 2:
        for l, nn in pairs:
            q = orders[nn] // orders[l]
            if q not in (4, 8):
                continue
            t = lat.subquotient_type(nn, l).kind
            if (q, t) not in ((4, "C4"), (8, "Q8")):
                continue
            for k in np.nonzero(lat.contains[nn])[0]:
                k = int(k)
                if orders[k] == 2 * orders[l] and lat.contains[k, l] and lat.is_normal_in(k, nn):
                    add(BSInstance("iii" if q == 4 else "iv", 2, l, k, n=nn), (l, k, nn))
    out.sort(key=lambda s: (KINDS.index(s.kind), s.L, s.K, s.n or 0))
    return out


@dataclass
class BSViolation:
    instance: BSInstance
    lhs: int
    rhs: int | str


@dataclass
class BSReport:
    p: int
    instances: list[BSInstance]
    violations: list[BSViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self, lat: SubgroupLattice) -> dict:
        return {
            "p": self.p,
            "instances": len(self.instances),
            "ok": self.ok,
            "violations": [{"instance": v.instance.to_json(lat), "lhs": v.lhs, "rhs": v.rhs}
                           for v in self.violations],
        }


def check_instance(n: SuperClassFunction, inst: BSInstance) -> BSViolation | None:
    diff = n.at(inst.L) - n.at(inst.K)
    if inst.kind == "ii":
        rhs = sum(n.at(m) - n.at(inst.K) for m in inst.mids)
        return None if diff == rhs else BSViolation(inst, diff, rhs)
    if inst.kind in ("i", "iii"):
        return None if diff % 2 == 0 else BSViolation(inst, diff, "even")
    return None if diff % 4 == 0 else BSViolation(inst, diff, "divisible by 4")


def borel_smith_check(n: SuperClassFunction, p: int, instances: list[BSInstance] | None = None) -> BSReport:
    """Check n against every Borel-Smith instance at p; off-family values enter as -1."""
    if instances is None:
        instances = enumerate_bs_instances(n.lattice, p)
    viol = [v for v in (check_instance(n, s) for s in instances) if v is not None]
    return BSReport(p, instances, viol)


# ---------------------------------------------------------------------------
# inference from the type (ii) equalities
# ---------------------------------------------------------------------------


@dataclass
class ForcedStep:
    cls: int
    value: Fraction
    instance: BSInstance | None  # None for values pinned by the family or found by elimination

    def describe(self, lat: SubgroupLattice, names: dict[int, str] | None = None) -> str:
        name = (names or {}).get(self.cls, f"class {self.cls} (order {lat.class_order(self.cls)})")
        how = f" from {self.instance.describe(lat)}" if self.instance else " by elimination"
        return f"n({name}) = {self.value}{how}"


@dataclass
class InferenceResult:
    forced: dict[int, Fraction]
    chain: list[ForcedStep]
    infeasible: bool
    reason: str = ""

    def to_json(self, lat: SubgroupLattice, names: dict[int, str] | None = None) -> dict:
        return {
            "infeasible": self.infeasible,
            "reason": self.reason,
            "forced": {str(c): str(v) for c, v in sorted(self.forced.items())},
            "chain": [s.describe(lat, names) for s in self.chain],
        }


def _type_ii_rows(lat: SubgroupLattice, instances: list[BSInstance]) -> list[tuple[dict[int, int], BSInstance]]:
    """f(L) + p f(K) - sum_i f(L_i) = 0, keyed by class."""
    rows = []
    cl = lat.class_of
    for s in instances:
        if s.kind != "ii":
            continue
        row: dict[int, int] = {}
        for c, a in [(cl[s.L], 1), (cl[s.K], s.p)] + [(cl[m], -1) for m in s.mids]:
            row[c] = row.get(c, 0) + a
        rows.append(({c: a for c, a in row.items() if a}, s))
    return rows


def bs_infer(lat: SubgroupLattice, p: int, fam: Family, require_trivial_nonnegative: bool = True
             ) -> InferenceResult:
    """Values of n forced by the type (ii) equalities with off-family classes pinned to -1.

    Unit propagation runs first so that the chain of forced values reads as
    a proof; rational elimination then finds whatever else is determined.
    """
    C = len(lat.classes)
    known: dict[int, Fraction] = {c: Fraction(-1) for c in range(C) if c not in fam}
    chain: list[ForcedStep] = []
    rows = _type_ii_rows(lat, enumerate_bs_instances(lat, p))

    def contradiction(msg):
        return InferenceResult(dict(known), chain, True, msg)

    def check_trivial():
        if require_trivial_nonnegative and 0 in known and known[0] < 0:
            return contradiction(f"n(1) = {known[0]} contradicts n(1) >= 0")
        return None

    changed = True
    while changed:
        changed = False
        for row, inst in rows:
            free = [c for c in row if c not in known]
            if len(free) != 1:
                if not free and sum(a * known[c] for c, a in row.items()) != 0:
                    return contradiction(f"inconsistent equality {inst.describe(lat)}")
                continue
            c = free[0]
            val = -Fraction(sum(a * known[d] for d, a in row.items() if d != c)) / row[c]
            known[c] = val
            chain.append(ForcedStep(c, val, inst))
            changed = True
            bad = check_trivial()
            if bad:
                return bad
    # rational elimination over the remaining unknowns
    unknown = [c for c in range(C) if c not in known]
    col = {c: i for i, c in enumerate(unknown)}
    A = []
    for row, _ in rows:
        r = [Fraction(0)] * (len(unknown) + 1)
        for c, a in row.items():
            if c in col:
                r[col[c]] += a
            else:
                r[-1] -= a * known[c]
        if any(r):
            A.append(r)
    piv_rows = _rref(A, len(unknown))
    for r in piv_rows:
        nz = [i for i in range(len(unknown)) if r[i] != 0]
        if not nz:
            return contradiction("the type (ii) equalities are inconsistent")
        if len(nz) == 1:
            c = unknown[nz[0]]
            known[c] = r[-1] / r[nz[0]]
            chain.append(ForcedStep(c, known[c], None))
    bad = check_trivial()
    if bad:
        return bad
    return InferenceResult({c: v for c, v in known.items() if c in fam}, chain, False)


def _rref(A: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    A = [r[:] for r in A]
    out = []
    r0 = 0
    for j in range(ncols):
        piv = next((i for i in range(r0, len(A)) if A[i][j] != 0), None)
        if piv is None:
            continue
        A[r0], A[piv] = A[piv], A[r0]
        inv = 1 / A[r0][j]
        A[r0] = [x * inv for x in A[r0]]
        for i in range(len(A)):
            if i != r0 and A[i][j] != 0:
                f = A[i][j]
                A[i] = [x - f * y for x, y in zip(A[i], A[r0])]
        r0 += 1
    out = A[:r0]
    # rows 0 = c with c != 0 signal inconsistency
    out += [r for r in A[r0:] if r[-1] != 0]
    return out


# ---------------------------------------------------------------------------
# linear spheres
# ---------------------------------------------------------------------------


def linear_sphere_dim_function(lat: SubgroupLattice, orbits: Sequence[int] | GSet, copies: int = 1
                               ) -> SuperClassFunction:
    """n(H) = copies * #H-orbits - 1 on the permutation module of a G-set.

    ``orbits`` lists subgroup ids K, one orbit G/K each, or is a GSet.
    """
    if copies < 1:
        raise ValueError("copies must be positive")
    omega = orbits if isinstance(orbits, GSet) else GSet.from_cosets(lat, list(orbits))
    vals = {c: copies * omega.count_orbits(lat.subgroups[lat.rep(c)].elements) - 1
            for c in range(len(lat.classes))}
    return SuperClassFunction.from_dict(lat, vals)


def combine(n: SuperClassFunction, m: SuperClassFunction) -> SuperClassFunction:
    """Dimension function of the join S(V + W)."""
    return SuperClassFunction(n.lattice, tuple(a + b + 1 for a, b in zip(n.values, m.values)))


@dataclass
class MonotonePGroupReport:
    ok: bool
    checked: int
    violations: list[tuple[int, int]]  # (L, K) subgroup ids


def check_monotone_p_group_lemma(n: SuperClassFunction, p: int) -> MonotonePGroupReport:
    """n(L) >= n(K) whenever L is normal in K with K/L a p-group."""
    lat = n.lattice
    orders = _orders(lat)
    checked, bad = 0, []
    for k in range(len(lat)):
        for l in np.nonzero(lat.contains[k])[0]:
            l = int(l)
            q = int(orders[k] // orders[l])
            if q == 1 or len(_factor(q)) != 1 or _factor(q)[0][0] != p or not lat.is_normal_in(l, k):
                continue
            checked += 1
            if n.at(l) < n.at(k):
                bad.append((l, k))
    return MonotonePGroupReport(not bad, checked, bad)


def sylow_center_class(lat: SubgroupLattice, p: int) -> int:
    """Class of Z(P) for a Sylow p-subgroup P."""
    G = lat.group
    orders = _orders(lat)
    top = max(o for o in orders if o % p == 0 and len(_factor(int(o))) == 1)
    P = int(next(i for i in range(len(lat)) if orders[i] == top))
    elts = lat.subgroups[P].elements
    cen = [x for x in elts if all(G.mul[x, y] == G.mul[y, x] for y in elts)]
    return lat.class_of[lat.id_of_elements(cen)]
