"""The orbit category Or_F(G) and free modules over it.

A free module is a list of basis elements, each with an orbit type (a
conjugacy class of subgroups in the family); the basis element of type
(H) stands for R[G/H^?] with H the class representative.

Morphisms are stored in Yoneda form.  The entry of an :class:`OrbitMatrix`
at ``(i, j)`` is an R-combination of G-maps G/H_i -> G/K_j, each G-map
``eH_i |-> gK_j`` recorded by the index of the coset gK_j.  Matrices act
on row vectors: ``compose(A, B)`` is "first A, then B" and

    evaluate_matrix(compose(A, B), L) == evaluate_matrix(A, L) @ evaluate_matrix(B, L).

Evaluating at a subgroup L uses the basis of L-fixed cosets yB of each
basis element (in coset order); a G-map with coset gK sends yH to ygK.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .groups import (Family, Group, SubgroupLattice, enumerate_subgroups, family as make_family,
                     group_from_generators)

Entry = dict  # coset index -> coefficient


class ObjectOutsideFamily(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


class BasisOutsideSubfamily(ValueError):
    pass


class NotIsotypic(ValueError):
    pass


class FamilyViolation(ValueError):
    pass


def _norm(e: dict, p: int | None) -> dict:
    if p is None:
        return {c: v for c, v in e.items() if v}
    return {c: v % p for c, v in e.items() if v % p}


@dataclass
class WeylData:
    """End(R[G/H^?]) = R[W_G(H)] in coset coordinates.

    ``cosets[w]`` is the coset index (in G/H) of Weyl element ``w``;
    element 0 is the identity and ``mul[a, b]`` is "a then b".
    """

    h: int
    cosets: np.ndarray
    reps: np.ndarray
    pos: dict
    mul: np.ndarray

    @property
    def order(self) -> int:
        return len(self.cosets)

    def inverse(self, a: int) -> int:
        return int(np.nonzero(self.mul[a] == 0)[0][0])


class OrbitCategory:
    """Or_F(G) together with caches for fixed cosets and G-maps."""

    def __init__(self, lattice: SubgroupLattice, fam: Family | None = None):
        self.lattice = lattice
        self.group: Group = lattice.group
        self.family = fam if fam is not None else make_family(lattice, "all")
        self._fixed: dict = {}
        self._weyl: dict = {}

    @classmethod
    def of(cls, group: Group, spec="all") -> "OrbitCategory":
        lat = enumerate_subgroups(group)
        return cls(lat, make_family(lat, spec))

    def with_family(self, fam: Family) -> "OrbitCategory":
        out = OrbitCategory(self.lattice, fam)
        out._fixed = self._fixed
        out._weyl = self._weyl
        return out

    @property
    def objects(self) -> list[int]:
        return self.family.sorted()

    def sub(self, cls_id: int) -> int:
        return self.lattice.rep(cls_id)

    def check_object(self, L: int) -> None:
        if not self.family.contains_subgroup(L):
            raise ObjectOutsideFamily(f"subgroup {L} (class {self.lattice.class_of[L]}) is not in the family")

    def fixed(self, b: int, L: int) -> tuple[np.ndarray, np.ndarray]:
        """(indices of cosets of subgroup b fixed by L, position lookup of size |G/b|)."""
        key = (b, L)
        if key not in self._fixed:
            fc = self.lattice.fixed_cosets(L, b)
            pos = np.full(len(self.lattice.cosets(b)[1]), -1, dtype=np.int64)
            pos[fc] = np.arange(len(fc))
            self._fixed[key] = (fc, pos)
        return self._fixed[key]

    def nfixed(self, cls_id: int, L: int) -> int:
        return len(self.fixed(self.sub(cls_id), L)[0])

    def weyl_data(self, cls_id: int) -> WeylData:
        if cls_id not in self._weyl:
            h = self.sub(cls_id)
            coset_of, reps = self.lattice.cosets(h)
            fc, pos = self.fixed(h, h)
            r = reps[fc]
            mul = pos[coset_of[self.group.mul[np.ix_(r, r)]]]
            self._weyl[cls_id] = WeylData(h, fc, r, {int(c): i for i, c in enumerate(fc)}, mul)
        return self._weyl[cls_id]

    def compose_entry(self, e1: Entry, mid_cls: int, tgt_cls: int, e2: Entry, p: int | None = None) -> Entry:
        """Composite of G/H -e1-> G/K -e2-> G/M on coset combinations."""
        if not e1 or not e2:
            return {}
        _, reps_k = self.lattice.cosets(self.sub(mid_cls))
        coset_m, reps_m = self.lattice.cosets(self.sub(tgt_cls))
        mul = self.group.mul
        out: dict[int, int] = {}
        for c1, a in e1.items():
            g1 = reps_k[c1]
            for c2, b in e2.items():
                c = int(coset_m[mul[g1, reps_m[c2]]])
                out[c] = out.get(c, 0) + a * b
        return _norm(out, p)

    def augment_entry(self, e: Entry) -> int:
        """Image of an entry under G/K -> G/G: the sum of its coefficients."""
        return sum(e.values())


@dataclass(frozen=True)
class FreeOrbitModule:
    """Free module: one basis element R[G/H^?] per entry of ``types``."""

    types: tuple[int, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(len(self.types))))
        if len(self.labels) != len(self.types):
            raise ValueError("one label per basis element")

    @property
    def rank(self) -> int:
        return len(self.types)

    def __add__(self, other: "FreeOrbitModule") -> "FreeOrbitModule":
        return FreeOrbitModule(self.types + other.types, self.labels + other.labels)

    def select(self, idx: Sequence[int]) -> "FreeOrbitModule":
        return FreeOrbitModule(tuple(self.types[i] for i in idx), tuple(self.labels[i] for i in idx))

    def check(self, cat: OrbitCategory) -> None:
        for t in self.types:
            if t not in cat.family:
                raise ObjectOutsideFamily(f"basis type {t} is not in the family")

    def to_json(self) -> dict:
        return {"basis": [{"type": t, "label": l} for t, l in zip(self.types, self.labels)]}

    @classmethod
    def from_json(cls, data: dict) -> "FreeOrbitModule":
        basis = data["basis"]
        return cls(tuple(int(b["type"]) for b in basis), tuple(str(b.get("label", i)) for i, b in enumerate(basis)))


@dataclass
class OrbitMatrix:
    """A morphism of free modules in Yoneda form (see module docstring)."""

    cat: OrbitCategory = field(repr=False)
    source: FreeOrbitModule
    target: FreeOrbitModule
    entries: dict = field(default_factory=dict)
    modulus: int | None = None

    def __post_init__(self):
        clean = {}
        for key, e in self.entries.items():
            e = _norm(e, self.modulus)
            if e:
                clean[key] = e
        self.entries = clean

    @classmethod
    def zero(cls, cat, source, target, modulus=None) -> "OrbitMatrix":
        return cls(cat, source, target, {}, modulus)

    @classmethod
    def identity(cls, cat, module: FreeOrbitModule, modulus=None) -> "OrbitMatrix":
        return cls(cat, module, module, {(i, i): {0: 1} for i in range(module.rank)}, modulus)

    @property
    def shape(self) -> tuple[int, int]:
        return self.source.rank, self.target.rank

    def __getitem__(self, key) -> Entry:
        return self.entries.get(key, {})

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other) -> bool:
        return (isinstance(other, OrbitMatrix) and self.source.types == other.source.types
                and self.target.types == other.target.types and self.entries == other.entries)

    def validate(self) -> None:
        """Every G-map must lie in the right morphism set."""
        lat = self.cat.lattice
        for (i, j), e in self.entries.items():
            h, k = self.cat.sub(self.source.types[i]), self.cat.sub(self.target.types[j])
            allowed = set(lat.fixed_cosets(h, k).tolist())
            bad = set(e) - allowed
            if bad:
                raise ValueError(f"entry ({i},{j}) uses cosets {sorted(bad)} that are not G-maps")

    def __add__(self, other: "OrbitMatrix") -> "OrbitMatrix":
        if self.shape != other.shape:
            raise ShapeMismatch("cannot add matrices of different shape")
        out = {k: dict(v) for k, v in self.entries.items()}
        for key, e in other.entries.items():
            tgt = out.setdefault(key, {})
            for c, v in e.items():
                tgt[c] = tgt.get(c, 0) + v
        return OrbitMatrix(self.cat, self.source, self.target, out, self.modulus)

    def scale(self, a: int) -> "OrbitMatrix":
        return OrbitMatrix(self.cat, self.source, self.target,
                           {k: {c: a * v for c, v in e.items()} for k, e in self.entries.items()}, self.modulus)

    def __neg__(self) -> "OrbitMatrix":
        return self.scale(-1)

    def __sub__(self, other: "OrbitMatrix") -> "OrbitMatrix":
        return self + (-other)

    def reduce(self, p: int | None) -> "OrbitMatrix":
        return OrbitMatrix(self.cat, self.source, self.target, self.entries, p)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "OrbitMatrix":
        rpos = {r: a for a, r in enumerate(rows)}
        cpos = {c: b for b, c in enumerate(cols)}
        ent = {(rpos[i], cpos[j]): e for (i, j), e in self.entries.items() if i in rpos and j in cpos}
        return OrbitMatrix(self.cat, self.source.select(rows), self.target.select(cols), ent, self.modulus)

    def row_entries(self, i: int) -> dict[int, Entry]:
        return {j: e for (a, j), e in self.entries.items() if a == i}

    def col_entries(self, j: int) -> dict[int, Entry]:
        return {i: e for (i, b), e in self.entries.items() if b == j}

    def to_json(self) -> dict:
        return {
            "rows": self.source.rank,
            "cols": self.target.rank,
            "entries": [{"row": i, "col": j, "coeffs": [{"coset": c, "c": int(v)} for c, v in sorted(e.items())]}
                        for (i, j), e in sorted(self.entries.items())],
        }

    @classmethod
    def from_json(cls, cat, source, target, data: dict, modulus=None) -> "OrbitMatrix":
        if data.get("rows", source.rank) != source.rank or data.get("cols", target.rank) != target.rank:
            raise ShapeMismatch("matrix shape does not match its modules")
        ent: dict = {}
        for item in data.get("entries", []):
            e = ent.setdefault((int(item["row"]), int(item["col"])), {})
            for t in item["coeffs"]:
                e[int(t["coset"])] = e.get(int(t["coset"]), 0) + int(t["c"])
        out = cls(cat, source, target, ent, modulus)
        out.validate()
        return out


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def evaluate(cat: OrbitCategory, F: FreeOrbitModule, L: int) -> list[tuple[int, int]]:
    """Basis of F(L): pairs (basis element, fixed coset index)."""
    cat.check_object(L)
    out = []
    for b, t in enumerate(F.types):
        fc, _ = cat.fixed(cat.sub(t), L)
        out.extend((b, int(c)) for c in fc)
    return out


def rank_at(cat: OrbitCategory, F: FreeOrbitModule, L: int) -> int:
    cat.check_object(L)
    return sum(cat.nfixed(t, L) for t in F.types)


def _offsets(cat: OrbitCategory, F: FreeOrbitModule, L: int) -> np.ndarray:
    sizes = [cat.nfixed(t, L) for t in F.types]
    return np.concatenate([[0], np.cumsum(sizes, dtype=np.int64)]).astype(np.int64)


def evaluate_matrix(A: OrbitMatrix, L: int) -> np.ndarray:
    """The R-matrix of A at L (rows: source basis of evaluate, cols: target)."""
    cat = A.cat
    cat.check_object(L)
    so, to = _offsets(cat, A.source, L), _offsets(cat, A.target, L)
    M = np.zeros((so[-1], to[-1]), dtype=np.int64)
    mul = cat.group.mul
    lat = cat.lattice
    for (i, j), e in A.entries.items():
        hi = cat.sub(A.source.types[i])
        fc_i, _ = cat.fixed(hi, L)
        if not len(fc_i):
            continue
        Y = lat.cosets(hi)[1][fc_i]
        kj = cat.sub(A.target.types[j])
        _, pos_j = cat.fixed(kj, L)
        coset_j, reps_j = lat.cosets(kj)
        rows = so[i] + np.arange(len(fc_i))
        for c, v in e.items():
            cols = to[j] + pos_j[coset_j[mul[Y, reps_j[c]]]]
            np.add.at(M, (rows, cols), v)
    if A.modulus is not None:
        M %= A.modulus
    return M


def compose(A: OrbitMatrix, B: OrbitMatrix) -> OrbitMatrix:
    """A then B."""
    if A.target.types != B.source.types:
        raise ShapeMismatch("target of the first matrix is not the source of the second")
    cat = A.cat
    p = A.modulus if A.modulus is not None else B.modulus
    by_row: dict[int, list] = {}
    for (j, k), e in B.entries.items():
        by_row.setdefault(j, []).append((k, e))
    out: dict = {}
    for (i, j), e1 in A.entries.items():
        for k, e2 in by_row.get(j, ()):
            prod = cat.compose_entry(e1, A.target.types[j], B.target.types[k], e2, p)
            if prod:
                acc = out.setdefault((i, k), {})
                for c, v in prod.items():
                    acc[c] = acc.get(c, 0) + v
    return OrbitMatrix(cat, A.source, B.target, out, p)


def augmentation_compose(A: OrbitMatrix, eps: Sequence[int], p: int | None = None) -> list[int]:
    """Coefficients of A followed by an augmentation ``eps`` of A's target."""
    out = [0] * A.source.rank
    for (i, j), e in A.entries.items():
        out[i] += sum(e.values()) * eps[j]
    return [v % p for v in out] if p else out


def evaluate_augmentation(cat: OrbitCategory, F: FreeOrbitModule, eps: Sequence[int], L: int) -> np.ndarray:
    """The row vector of F(L) -> R given per-basis augmentation coefficients."""
    return np.array([eps[b] for b, _ in evaluate(cat, F, L)], dtype=np.int64)


def gmap_matrix(cat: OrbitCategory, F: FreeOrbitModule, h: int, k: int, g: int) -> np.ndarray:
    """Induced map F(K) -> F(H) of the G-map G/H -> G/K, eH |-> gK.

    Row convention: rows index F(K), columns F(H); the point yB goes to gyB.
    Requires g^-1 H g <= K.
    """
    lat, mul = cat.lattice, cat.group.mul
    if not lat.is_subgroup(lat.conjugate(h, cat.group.inv[g]), k):
        raise ValueError("not a G-map")
    so, to = _offsets(cat, F, k), _offsets(cat, F, h)
    M = np.zeros((so[-1], to[-1]), dtype=np.int64)
    for b, t in enumerate(F.types):
        B = cat.sub(t)
        fc_k, _ = cat.fixed(B, k)
        if not len(fc_k):
            continue
        coset_of, reps = lat.cosets(B)
        _, pos_h = cat.fixed(B, h)
        img = pos_h[coset_of[mul[g, reps[fc_k]]]]
        M[so[b] + np.arange(len(fc_k)), to[b] + img] = 1
    return M


def restriction_matrix(cat: OrbitCategory, F: FreeOrbitModule, h: int, k: int) -> np.ndarray:
    """r^K_H: F(K) -> F(H) for H <= K (inclusion of fixed points)."""
    if not cat.lattice.is_subgroup(h, k):
        raise ValueError(f"subgroup {h} is not contained in {k}")
    return gmap_matrix(cat, F, h, k, cat.group.identity)


def weyl_generators(cat: OrbitCategory, h: int) -> list[int]:
    """Elements of N_G(H) whose images generate W_G(H), chosen greedily."""
    lat, G = cat.lattice, cat.group
    N = lat.subgroups[lat.normalizer(h)].elements
    cur = np.zeros(G.order, dtype=bool)
    cur[list(lat.subgroups[h].elements)] = True
    gens: list[int] = []
    from . import _kernels
    for x in N:
        if not cur[x]:
            gens.append(int(x))
            cur = _kernels.closure_mask(G.mul, np.array(list(lat.subgroups[h].elements) + gens))
    return gens


def weyl_action_matrix(cat: OrbitCategory, F: FreeOrbitModule, h: int, n: int) -> np.ndarray:
    """Action of n in N_G(H) on F(H): yB |-> nyB (row convention)."""
    return gmap_matrix(cat, F, h, h, n)


# ---------------------------------------------------------------------------
# family change
# ---------------------------------------------------------------------------


def restrict_family(F: FreeOrbitModule, sub: Family) -> FreeOrbitModule:
    """res to a subfamily; basis types outside it are an error on free modules."""
    bad = [t for t in F.types if t not in sub]
    if bad:
        raise BasisOutsideSubfamily(f"basis types {sorted(set(bad))} are outside the subfamily")
    return F


def inc_family(F: FreeOrbitModule, big: Family) -> FreeOrbitModule:
    bad = [t for t in F.types if t not in big]
    if bad:
        raise BasisOutsideSubfamily(f"basis types {sorted(set(bad))} are outside the larger family")
    return F


def restrict_matrix_family(A: OrbitMatrix, cat: OrbitCategory) -> OrbitMatrix:
    restrict_family(A.source, cat.family)
    restrict_family(A.target, cat.family)
    return OrbitMatrix(cat, A.source, A.target, A.entries, A.modulus)


def support(cat: OrbitCategory, F: FreeOrbitModule) -> frozenset[int]:
    """Classes L in the family with F(L) nonzero."""
    return frozenset(c for c in cat.objects if rank_at(cat, F, cat.sub(c)))


# ---------------------------------------------------------------------------
# change of group: restriction, deflation, inflation
# ---------------------------------------------------------------------------


@dataclass
class _NewOrbit:
    old: int  # old basis index
    base: int  # old coset index of the base point
    stab: int  # stabilizer subgroup id in the new lattice
    cls: int
    s: int  # new element with s R s^-1 = stab
    where: dict  # old coset index -> new element q with q.base = point


class GroupChange:
    """Transport of free modules along a homomorphism ``hom: new -> old``.

    ``hom[q]`` is the old-group element by which new element q acts on
    old points; ``keep(t)`` decides whether basis elements of old type t
    survive (used by deflation, which keeps only N-fixed orbits).
    """

    def __init__(self, old: OrbitCategory, new: OrbitCategory, hom: np.ndarray, keep=None):
        self.old, self.new, self.hom = old, new, np.asarray(hom, dtype=np.int64)
        self.keep = keep or (lambda t: True)
        self._orbits: dict[int, list[_NewOrbit]] = {}

    def orbits_of_type(self, t: int) -> list[_NewOrbit]:
        if t in self._orbits:
            return self._orbits[t]
        out: list[_NewOrbit] = []
        if self.keep(t):
            B = self.old.sub(t)
            coset_of, reps = self.old.lattice.cosets(B)
            # act[q, c] = coset of hom(q) * rep_c
            act = coset_of[self.old.group.mul[np.ix_(self.hom, reps)]]
            seen = np.full(len(reps), False)
            nlat = self.new.lattice
            for c0 in range(len(reps)):
                if seen[c0]:
                    continue
                where: dict[int, int] = {}
                for q in range(act.shape[0]):
                    where.setdefault(int(act[q, c0]), q)
                seen[list(where)] = True
                stab = nlat.id_of_mask(act[:, c0] == c0)
                cls = nlat.class_of[stab]
                R = nlat.rep(cls)
                out.append(_NewOrbit(-1, c0, stab, cls, nlat.conjugator(R, stab), where))
        self._orbits[t] = out
        return out

    def module(self, F: FreeOrbitModule) -> tuple[FreeOrbitModule, list[_NewOrbit]]:
        types, labels, orbs = [], [], []
        for b, t in enumerate(F.types):
            os_ = self.orbits_of_type(t)
            for k, o in enumerate(os_):
                o2 = _NewOrbit(b, o.base, o.stab, o.cls, o.s, o.where)
                if o.cls not in self.new.family:
                    raise FamilyViolation(f"orbit type {o.cls} is outside the target family")
                types.append(o.cls)
                labels.append(F.labels[b] if len(os_) == 1 else f"{F.labels[b]}.{k}")
                orbs.append(o2)
        return FreeOrbitModule(tuple(types), tuple(labels)), orbs

    def matrix(self, A: OrbitMatrix) -> OrbitMatrix:
        src, sorbs = self.module(A.source)
        tgt, torbs = self.module(A.target)
        by_old: dict[int, list[int]] = {}
        for idx, o in enumerate(torbs):
            by_old.setdefault(o.old, []).append(idx)
        oldlat, newlat = self.old.lattice, self.new.lattice
        omul, nmul, ninv = self.old.group.mul, self.new.group.mul, self.new.group.inv
        ent: dict = {}
        for a, o in enumerate(sorbs):
            Bi = self.old.sub(A.source.types[o.old])
            coset_i, reps_i = oldlat.cosets(Bi)
            # old point corresponding to the coset eR of the new orbit: s^-1 . base
            x = int(coset_i[omul[self.hom[ninv[o.s]], reps_i[o.base]]])
            y = reps_i[x]
            for j, e in A.row_entries(o.old).items():
                Bj = self.old.sub(A.target.types[j])
                coset_j, reps_j = oldlat.cosets(Bj)
                for c, v in e.items():
                    z = int(coset_j[omul[y, reps_j[c]]])
                    for bidx in by_old.get(j, ()):
                        t = torbs[bidx]
                        if z in t.where:
                            q = t.where[z]
                            Rt = newlat.rep(t.cls)
                            coset_new, _ = newlat.cosets(Rt)
                            nc = int(coset_new[nmul[q, t.s]])
                            acc = ent.setdefault((a, bidx), {})
                            acc[nc] = acc.get(nc, 0) + v
                            break
                    else:  # pragma: no cover - images of kept points are kept
                        raise FamilyViolation("image point left the transported module")
        return OrbitMatrix(self.new, src, tgt, ent, A.modulus)


def subgroup_as_group(lat: SubgroupLattice, k: int) -> tuple[Group, np.ndarray]:
    """Subgroup k as a permutation group, with its elements' indices in G."""
    G = lat.group
    elems = [G.elements[i] for i in lat.subgroups[k].elements]
    K = Group(G.degree, tuple(elems), sorted(elems), name=f"{G.name}[{k}]")
    emb = np.array([G.index[g] for g in K.elements], dtype=np.int64)
    return K, emb


def restriction_to_subgroup(cat: OrbitCategory, k: int) -> GroupChange:
    """res^G_K with the all-subgroups family on K."""
    K, emb = subgroup_as_group(cat.lattice, k)
    return GroupChange(cat, OrbitCategory(enumerate_subgroups(K)), emb)


def restrict_to_subgroup(cat: OrbitCategory, F: FreeOrbitModule, k: int) -> tuple[OrbitCategory, FreeOrbitModule]:
    ch = restriction_to_subgroup(cat, k)
    return ch.new, ch.module(F)[0]


@dataclass
class Quotient:
    """G/N realised as the action of G on the cosets of N."""

    group: Group
    lattice: SubgroupLattice
    proj: np.ndarray  # G element -> quotient element
    lift: np.ndarray  # quotient element -> least preimage in G


def quotient(lat: SubgroupLattice, n: int) -> Quotient:
    from .groups import NotNormal
    if not lat.is_normal_in(n, lat.whole):
        raise NotNormal(f"subgroup {n} is not normal")
    G = lat.group
    coset_of, reps = lat.cosets(n)
    perms = [tuple(int(x) for x in coset_of[G.mul[g, reps]]) for g in range(G.order)]
    gens = sorted({perms[G.index[s]] for s in G.generators}) if G.generators else []
    Q = group_from_generators(len(reps), gens, name=f"{G.name}/{n}")
    proj = np.array([Q.index[p] for p in perms], dtype=np.int64)
    lift = np.full(Q.order, -1, dtype=np.int64)
    for g in range(G.order - 1, -1, -1):
        lift[proj[g]] = g
    return Quotient(Q, enumerate_subgroups(Q), proj, lift)


def deflation(cat: OrbitCategory, n: int) -> GroupChange:
    """Def^G_{G/N}: orbit G/H survives iff N <= H (then (G/H)^N = G/H)."""
    if cat.family.classes != frozenset(range(len(cat.lattice.classes))):
        raise FamilyViolation("deflation is implemented for the all-subgroups family")
    Qd = quotient(cat.lattice, n)
    lat = cat.lattice
    return GroupChange(cat, OrbitCategory(Qd.lattice), Qd.lift, keep=lambda t: lat.is_subgroup(n, lat.rep(t)))


def deflate(cat: OrbitCategory, F: FreeOrbitModule, n: int) -> tuple[OrbitCategory, FreeOrbitModule]:
    ch = deflation(cat, n)
    return ch.new, ch.module(F)[0]


def inflation(cat: OrbitCategory, n: int, qcat: OrbitCategory | None = None) -> GroupChange:
    """Inf^G_{G/N}: (G/N)/(K/N) |-> G/K; ``qcat`` must be built on quotient(lat, n)."""
    Qd = quotient(cat.lattice, n)
    if qcat is None:
        qcat = OrbitCategory(Qd.lattice)
    elif qcat.group.order != Qd.group.order:
        raise FamilyViolation("quotient category does not match G/N")
    return GroupChange(qcat, cat, Qd.proj)


# ---------------------------------------------------------------------------
# isotypic layers, S_H and E_H
# ---------------------------------------------------------------------------


def isotypic_filtration(cat: OrbitCategory, F: FreeOrbitModule, cls_id: int):
    """Index lists (types >= (H), types > (H), types == (H))."""
    leq = cat.lattice.class_leq
    up = [i for i, t in enumerate(F.types) if leq[cls_id, t]]
    strict = [i for i in up if F.types[i] != cls_id]
    iso = [i for i in up if F.types[i] == cls_id]
    return up, strict, iso


@dataclass
class WModuleComplex:
    """A complex of free R[W]-modules with R[W]-valued matrices.

    ``ranks[i]`` free generators in degree i; ``boundaries[i]`` maps degree
    i+1 to degree i as a dict ``(row, col) -> {w: coeff}`` in the row
    convention, with W multiplication from :class:`WeylData`.
    """

    weyl: WeylData
    ranks: list[int]
    boundaries: list[dict]
    modulus: int | None = None

    def regular_matrix(self, entries: dict, rows: int, cols: int) -> np.ndarray:
        """Expand to an R-matrix on the basis (generator, w)."""
        W = self.weyl
        n = W.order
        M = np.zeros((rows * n, cols * n), dtype=np.int64)
        for (i, j), e in entries.items():
            for w, v in e.items():
                # generator i at x maps to generator j at x*w
                M[i * n + np.arange(n), j * n + W.mul[np.arange(n), w]] += v
        return M % self.modulus if self.modulus else M

    def evaluated(self) -> list[np.ndarray]:
        return [self.regular_matrix(b, self.ranks[i + 1], self.ranks[i]) for i, b in enumerate(self.boundaries)]


def splitting_functor(cat: OrbitCategory, modules: Sequence[FreeOrbitModule], boundaries: Sequence[OrbitMatrix],
                      cls_id: int) -> WModuleComplex:
    """S_H of an isotypic complex of type (H)."""
    for F in modules:
        if any(t != cls_id for t in F.types):
            raise NotIsotypic(f"basis types other than {cls_id} present")
    W = cat.weyl_data(cls_id)
    bds = []
    for A in boundaries:
        bds.append({key: {W.pos[c]: v for c, v in e.items()} for key, e in A.entries.items()})
    return WModuleComplex(W, [F.rank for F in modules], bds, boundaries[0].modulus if boundaries else None)


def extension_functor(cat: OrbitCategory, wc: WModuleComplex, cls_id: int, labels=None) -> tuple[list, list]:
    """E_H: rebuild the isotypic modules and OrbitMatrices from W-matrices."""
    W = wc.weyl
    mods = [FreeOrbitModule((cls_id,) * r) for r in wc.ranks]
    mats = []
    for i, b in enumerate(wc.boundaries):
        ent = {key: {int(W.cosets[w]): v for w, v in e.items()} for key, e in b.items()}
        mats.append(OrbitMatrix(cat, mods[i + 1], mods[i], ent, wc.modulus))
    return mods, mats


# ---------------------------------------------------------------------------
# group algebra R[W]
# ---------------------------------------------------------------------------


def rw_mul(W: WeylData, a: dict, b: dict, p: int) -> dict:
    out: dict[int, int] = {}
    for x, u in a.items():
        for y, v in b.items():
            z = int(W.mul[x, y])
            out[z] = (out.get(z, 0) + u * v) % p
    return {k: v for k, v in out.items() if v}


def rw_left_matrix(W: WeylData, a: dict, p: int) -> np.ndarray:
    """Matrix of b |-> a*b on coefficient vectors (column convention)."""
    n = W.order
    M = np.zeros((n, n), dtype=np.int64)
    for x, u in a.items():
        # a*b has coefficient u*b_y at x*y
        M[W.mul[x, np.arange(n)], np.arange(n)] += u
    return M % p


def rw_inverse(W: WeylData, a: dict, p: int) -> dict | None:
    """Two-sided inverse in Z/p[W], or None when ``a`` is not a unit."""
    from . import exactalg
    M = rw_left_matrix(W, a, p)
    coeffs = exactalg.Coefficients(p)
    if exactalg.rank(M, coeffs) < W.order:
        return None
    e = np.zeros(W.order, dtype=np.int64)
    e[0] = 1
    x = exactalg.solve_linear(M, e, coeffs)
    return {int(i): int(v) for i, v in enumerate(np.asarray(x).reshape(-1)) if v}

