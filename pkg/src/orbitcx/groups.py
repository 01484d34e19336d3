"""Finite permutation groups, their subgroup lattices, G-sets and G-maps.

Groups are materialised: every element is stored, together with a full
multiplication table.  This is only sensible at desk scale (orders up to
a few hundred) and the order bound guards against accidents.

Conventions
-----------
* A permutation is a tuple of images on ``{0, ..., n-1}``.
* Products compose right to left: ``(a * b)(x) = a(b(x))``.
* Elements are sorted lexicographically by image tuple, so element 0 is
  the identity and sorted index tuples compare like sorted element lists.
* Subgroups are sorted by ``(order, sorted element indices)``; the
  position in that order is the subgroup's canonical id.  The
  representative of a conjugacy class is its member of least id.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _kernels

Perm = tuple[int, ...]

DEFAULT_ORDER_BOUND = 1000


class OrderBoundExceeded(ValueError):
    pass


class NotNormal(ValueError):
    pass


def perm_mul(a: Perm, b: Perm) -> Perm:
    return tuple(a[i] for i in b)


def perm_inv(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def _check_perm(p: Sequence[int], degree: int) -> Perm:
    p = tuple(int(x) for x in p)
    if len(p) != degree or sorted(p) != list(range(degree)):
        raise ValueError(f"{p!r} is not a permutation of degree {degree}")
    return p


class Group:
    """A materialised permutation group with multiplication table."""

    def __init__(self, degree: int, generators: Sequence[Perm], elements: Sequence[Perm], name: str = ""):
        self.degree = degree
        self.generators = tuple(generators)
        self.elements: tuple[Perm, ...] = tuple(elements)
        self.name = name
        self.index = {g: i for i, g in enumerate(self.elements)}
        n = len(self.elements)
        E = np.array(self.elements, dtype=np.int64).reshape(n, degree)
        # comp[a, b, x] = E[a, E[b, x]]
        comp = E[:, E] if degree else np.zeros((n, n, 0), dtype=np.int64)
        weights = degree ** np.arange(degree - 1, -1, -1, dtype=np.int64) if degree else np.zeros(0, np.int64)
        codes = E @ weights if degree else np.zeros(n, dtype=np.int64)
        lookup = {int(c): i for i, c in enumerate(codes)}
        prod_codes = comp @ weights if degree else np.zeros((n, n), dtype=np.int64)
        self.mul = np.vectorize(lookup.__getitem__, otypes=[np.int64])(prod_codes) if n else np.zeros((0, 0), np.int64)
        self.inv = np.array([self.index[perm_inv(g)] for g in self.elements], dtype=np.int64)
        self.identity = self.index[tuple(range(degree))]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        label = self.name or f"degree {self.degree}"
        return f"Group({label}, order={self.order})"

    @cached_property
    def conj_table(self) -> np.ndarray:
        """``conj_table[g, x]`` is the index of ``g x g^-1``."""
        return self.mul[self.mul, self.inv[:, None]]

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.mul[x, g]
            k += 1
        return k

    def to_json(self) -> dict:
        return {"degree": self.degree, "generators": [list(g) for g in self.generators], "name": self.name}


def group_from_generators(degree: int, generators: Iterable[Sequence[int]], bound: int = DEFAULT_ORDER_BOUND,
                          name: str = "") -> Group:
    """Close ``generators`` under composition and materialise the group."""
    gens = tuple(_check_perm(g, degree) for g in generators)
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = perm_mul(s, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > bound:
                        raise OrderBoundExceeded(f"group order exceeds bound {bound}")
        frontier = nxt
    return Group(degree, gens, sorted(seen), name=name)


def group_from_json(data: dict, bound: int = DEFAULT_ORDER_BOUND) -> Group:
    return group_from_generators(int(data["degree"]), data.get("generators", []), bound=bound,
                                 name=data.get("name", ""))


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def cyclic(n: int) -> Group:
    if n == 1:
        return group_from_generators(1, [], name="C1")
    return group_from_generators(n, [tuple((i + 1) % n for i in range(n))], name=f"C{n}")


def klein_four() -> Group:
    return group_from_generators(4, [(1, 0, 3, 2), (2, 3, 0, 1)], name="C2xC2")


def c3xc3() -> Group:
    return group_from_generators(6, [(1, 2, 0, 3, 4, 5), (0, 1, 2, 4, 5, 3)], name="C3xC3")


def symmetric3() -> Group:
    return group_from_generators(3, [(1, 0, 2), (1, 2, 0)], name="S3")


def quaternion8() -> Group:
    """Q8 in its left regular representation on {±1, ±i, ±j, ±k}."""
    # unit quaternions as (sign, axis) with axis 0=1, 1=i, 2=j, 3=k
    table = {(1, 1): (-1, 0), (2, 2): (-1, 0), (3, 3): (-1, 0),
             (1, 2): (1, 3), (2, 3): (1, 1), (3, 1): (1, 2),
             (2, 1): (-1, 3), (3, 2): (-1, 1), (1, 3): (-1, 2)}

    def qmul(a, b):
        (sa, xa), (sb, xb) = a, b
        if xa == 0:
            return (sa * sb, xb)
        if xb == 0:
            return (sa * sb, xa)
        s, x = table[(xa, xb)]
        return (sa * sb * s, x)

    units = [(s, x) for x in range(4) for s in (1, -1)]
    pos = {u: i for i, u in enumerate(units)}
    gens = [tuple(pos[qmul(u, v)] for v in units) for u in [(1, 1), (1, 2)]]
    return group_from_generators(8, gens, name="Q8")


def qd(p: int) -> Group:
    """Qd(p) = (Z/p x Z/p) x| SL_2(p) acting on the affine plane AG(2, p).

    The point ``(x, y)`` has index ``p*x + y``.  Generators: the translation
    by (1, 0) and the linear maps [[1,1],[0,1]] and [[1,0],[1,1]], which
    generate SL_2(p).
    """
    if p not in (2, 3):
        raise ValueError("Qd(p) is only supported for p <= 3 at desk scale")
    pts = [(x, y) for x in range(p) for y in range(p)]
    idx = {v: i for i, v in enumerate(pts)}
    trans = tuple(idx[((x + 1) % p, y)] for x, y in pts)
    a1 = tuple(idx[((x + y) % p, y)] for x, y in pts)
    a2 = tuple(idx[(x, (x + y) % p)] for x, y in pts)
    return group_from_generators(p * p, [trans, a1, a2], name=f"Qd({p})")


def catalog() -> dict[str, Group]:
    """The desk-scale groups used for corpus generation and property tests."""
    return {
        "C2": cyclic(2),
        "C3": cyclic(3),
        "C4": cyclic(4),
        "C2xC2": klein_four(),
        "S3": symmetric3(),
        "Q8": quaternion8(),
        "C3xC3": c3xc3(),
    }


# ---------------------------------------------------------------------------
# subgroups
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Subgroup:
    id: int
    elements: tuple[int, ...]
    members: np.ndarray = field(repr=False)
    class_id: int = -1

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g: int) -> bool:
        return bool(self.members[g])


class GMap(NamedTuple):
    """A G-map G/H -> G/K, eH |-> gK, stored by the coset index of gK."""

    source: int  # subgroup id H
    target: int  # subgroup id K
    coset: int  # index into lattice.cosets(K)
    rep: int  # least element of the coset


class SubquotientType(NamedTuple):
    kind: str  # "Cp", "CpxCp", "C4", "Q8", "Other"
    p: int | None = None


class SubgroupLattice:
    """All subgroups of a group with conjugacy classes and order relations."""

    def __init__(self, group: Group, masks: list[np.ndarray]):
        self.group = group
        keyed = sorted((tuple(np.nonzero(m)[0].tolist()), m) for m in masks)
        keyed.sort(key=lambda t: (len(t[0]), t[0]))
        self._key_to_id = {}
        subs = []
        for i, (elts, m) in enumerate(keyed):
            self._key_to_id[m.tobytes()] = i
            subs.append(Subgroup(i, elts, m))
        S, N = len(subs), group.order
        M = np.array([s.members for s in subs], dtype=bool).reshape(S, N)
        self.membership = M
        # conj[s, g] = id of g s g^-1
        conj = np.empty((S, N), dtype=np.int64)
        ct = group.conj_table
        for g in range(N):
            img = np.zeros((S, N), dtype=bool)
            rows, cols = np.nonzero(M)
            img[rows, ct[g, cols]] = True
            for s in range(S):
                conj[s, g] = self._key_to_id[img[s].tobytes()]
        self.conj = conj
        class_of = [-1] * S
        classes: list[tuple[int, ...]] = []
        for s in range(S):
            if class_of[s] < 0:
                members = tuple(sorted(set(conj[s].tolist())))
                for t in members:
                    class_of[t] = len(classes)
                classes.append(members)
        self.classes = classes
        self.class_of = class_of
        self.subgroups = [Subgroup(s.id, s.elements, s.members, class_of[s.id]) for s in subs]
        Mi = M.astype(np.int64)
        # contains[k, h]: subgroup h is contained in subgroup k
        self.contains = (Mi[:, None, :] >= Mi[None, :, :]).all(axis=2) if S * S * N < 5e7 else (
            (Mi @ Mi.T) == Mi.sum(axis=1)[None, :])
        C = len(classes)
        leq = np.zeros((C, C), dtype=bool)
        for a in range(C):
            for b in range(C):
                kb = classes[b][0]
                leq[a, b] = any(self.contains[kb, h] for h in classes[a])
        self.class_leq = leq
        self._cosets: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    # -- basic lookups ------------------------------------------------------

    def __len__(self) -> int:
        return len(self.subgroups)

    def __getitem__(self, i: int) -> Subgroup:
        return self.subgroups[i]

    def id_of_mask(self, mask: np.ndarray) -> int:
        return self._key_to_id[np.asarray(mask, dtype=bool).tobytes()]

    def id_of_elements(self, elements: Iterable[int]) -> int:
        m = np.zeros(self.group.order, dtype=bool)
        m[list(elements)] = True
        return self.id_of_mask(m)

    def rep(self, class_id: int) -> int:
        return self.classes[class_id][0]

    def class_order(self, class_id: int) -> int:
        return self.subgroups[self.rep(class_id)].order

    @property
    def trivial(self) -> int:
        return 0

    @property
    def whole(self) -> int:
        return len(self.subgroups) - 1

    def is_subgroup(self, h: int, k: int) -> bool:
        """True when subgroup ``h`` is contained in subgroup ``k``."""
        return bool(self.contains[k, h])

    def conjugate(self, h: int, g: int) -> int:
        return int(self.conj[h, g])

    def class_leq_ids(self, h: int, k: int) -> bool:
        """(H) <= (K) for subgroup ids."""
        return bool(self.class_leq[self.class_of[h], self.class_of[k]])

    def conjugator(self, h: int, k: int) -> int:
        """Some element g with g h g^-1 == k; raises if not conjugate."""
        hits = np.nonzero(self.conj[h] == k)[0]
        if hits.size == 0:
            raise ValueError(f"subgroups {h} and {k} are not conjugate")
        return int(hits[0])

    # -- cosets and G-maps ---------------------------------------------------

    def cosets(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Left cosets gK: (coset index of every element, least element per coset)."""
        if k not in self._cosets:
            G = self.group
            K = np.array(self.subgroups[k].elements, dtype=np.int64)
            coset_of = np.full(G.order, -1, dtype=np.int64)
            reps = []
            for x in range(G.order):
                if coset_of[x] < 0:
                    coset_of[G.mul[x, K]] = len(reps)
                    reps.append(x)
            self._cosets[k] = (coset_of, np.array(reps, dtype=np.int64))
        return self._cosets[k]

    def fixed_cosets(self, h: int, k: int) -> np.ndarray:
        """Indices of the cosets yK fixed by H, i.e. the points of (G/K)^H."""
        coset_of, reps = self.cosets(k)
        H = np.array(self.subgroups[h].elements, dtype=np.int64)
        imgs = coset_of[self.group.mul[np.ix_(H, reps)]]
        return np.nonzero((imgs == np.arange(len(reps))[None, :]).all(axis=0))[0]

    def gmaps(self, h: int, k: int) -> list[GMap]:
        """All G-maps G/H -> G/K in coset order."""
        _, reps = self.cosets(k)
        return [GMap(h, k, int(c), int(reps[c])) for c in self.fixed_cosets(h, k)]

    def compose_gmaps(self, f: GMap, g: GMap) -> GMap:
        """The composite G/H --f--> G/K --g--> G/M."""
        if f.target != g.source:
            raise ValueError("G-maps are not composable")
        coset_of, reps = self.cosets(g.target)
        c = int(coset_of[self.group.mul[f.rep, g.rep]])
        return GMap(f.source, g.target, c, int(reps[c]))

    # -- structure -------------------------------------------------------------

    def normalizer(self, h: int) -> int:
        return self.id_of_mask(self.conj[h] == h)

    def weyl(self, h: int) -> Group:
        """W_G(H) = N_G(H)/H acting faithfully on the cosets of H in N_G(H).

        Coset 0 is H itself.
        """
        G = self.group
        n_id = self.normalizer(h)
        N = self.subgroups[n_id].elements
        coset_of, _ = self.cosets(h)
        labels = sorted({int(coset_of[x]) for x in N})
        pos = {c: i for i, c in enumerate(labels)}
        reps = {int(coset_of[x]): x for x in reversed(N)}
        gens = set()
        for x in N:
            gens.add(tuple(pos[int(coset_of[G.mul[x, reps[c]]])] for c in labels))
        return group_from_generators(len(labels), sorted(gens), name=f"W({h})")

    def generated_subgroup(self, k: int, l: int) -> int:
        gens = np.union1d(self.subgroups[k].elements, self.subgroups[l].elements)
        return self.id_of_mask(_kernels.closure_mask(self.group.mul, gens))

    def is_normal_in(self, l: int, k: int) -> bool:
        """L is a normal subgroup of K."""
        if not self.is_subgroup(l, k):
            return False
        return all(self.conj[l, g] == l for g in self.subgroups[k].elements)

    def subquotient_type(self, k: int, l: int) -> SubquotientType:
        """Recognise K/L among C_p, C_p x C_p, C_4, Q_8."""
        if not self.is_normal_in(l, k):
            raise NotNormal(f"subgroup {l} is not normal in {k}")
        G = self.group
        K = self.subgroups[k].elements
        Lm = self.subgroups[l].members
        q = len(K) // self.subgroups[l].order
        if q == 1:
            return SubquotientType("Other")

        def order_mod(x):
            m, y = 1, x
            while not Lm[y]:
                y = G.mul[y, x]
                m += 1
            return m

        orders = [order_mod(x) for x in K]
        abelian = all(Lm[G.mul[G.mul[a, b], G.mul[G.inv[a], G.inv[b]]]] for a in K for b in K)
        f = _factor(q)
        if len(f) == 1 and f[0][1] == 1:
            return SubquotientType("Cp", q)
        if len(f) == 1 and f[0][1] == 2:
            p = f[0][0]
            if abelian and max(orders) == p:
                return SubquotientType("CpxCp", p)
            if q == 4 and max(orders) == 4:
                return SubquotientType("C4", 2)
            return SubquotientType("Other")
        if q == 8 and not abelian:
            # cosets of order 2, counted once per coset
            involutions = sum(1 for o in orders if o == 2) // self.subgroups[l].order
            if involutions == 1:
                return SubquotientType("Q8", 2)
        return SubquotientType("Other")

    @cached_property
    def p_ranks(self) -> dict[int, list[int]]:
        """p-rank of every subgroup for each prime dividing |G|."""
        G = self.group
        out = {}
        for p, _ in _factor(G.order):
            elem_ab = []
            for s in self.subgroups:
                f = _factor(s.order)
                ok = s.order == 1 or (len(f) == 1 and f[0][0] == p and all(
                    G.mul[x, x] == G.identity if p == 2 else G.element_order(x) in (1, p) for x in s.elements))
                if ok and s.order > 1:
                    ok = all(G.mul[a, b] == G.mul[b, a] for a in s.elements for b in s.elements)
                elem_ab.append(int(round(math.log(s.order, p))) if ok else -1)
            ranks = []
            for s in self.subgroups:
                sub = np.nonzero(self.contains[s.id])[0]
                ranks.append(max(elem_ab[t] for t in sub))
            out[p] = ranks
        return out

    def rank(self, h: int) -> int:
        return max((r[h] for r in self.p_ranks.values()), default=0)

    def to_json(self) -> dict:
        subs = [{"id": s.id, "elements": [list(self.group.elements[e]) for e in s.elements],
                 "class": s.class_id, "order": s.order} for s in self.subgroups]
        inc = [[int(h), int(k)] for k in range(len(self)) for h in np.nonzero(self.contains[k])[0] if h != k]
        return {"subgroups": subs, "inclusions": inc}


def _factor(n: int) -> list[tuple[int, int]]:
    out, d = [], 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in _factor(n)]


_LATTICE_CACHE: dict[int, SubgroupLattice] = {}


def enumerate_subgroups(G: Group, bound: int = DEFAULT_ORDER_BOUND) -> SubgroupLattice:
    """Breadth-first closure: start from cyclic subgroups, join with cyclics.

    Only one member per conjugacy class is joined further; all conjugates
    of every new subgroup are recorded immediately.  Lattices are cached
    per group object.
    """
    if G.order > bound:
        raise OrderBoundExceeded(f"group order {G.order} exceeds bound {bound}")
    if id(G) in _LATTICE_CACHE and _LATTICE_CACHE[id(G)].group is G:
        return _LATTICE_CACHE[id(G)]
    mul, ct = G.mul, G.conj_table
    found: dict[bytes, tuple[np.ndarray, tuple[int, ...]]] = {}

    def add_class(mask, gens):
        new = []
        members = np.nonzero(mask)[0]
        for g in range(G.order):
            m = np.zeros(G.order, dtype=bool)
            m[ct[g, members]] = True
            key = m.tobytes()
            if key not in found:
                found[key] = (m, tuple(int(ct[g, x]) for x in gens))
                new.append(key)
        return new

    cyclic_gens = []
    queue = []
    for x in range(G.order):
        m = _kernels.closure_mask(mul, [x])
        if m.tobytes() not in found:
            add_class(m, (x,))
            queue.append(m.tobytes())
        cyclic_gens.append((x, m))
    # distinct cyclic subgroups, one generator each
    cyc = {}
    for x, m in cyclic_gens:
        cyc.setdefault(m.tobytes(), (x, m))
    cyc_list = list(cyc.values())
    while queue:
        key = queue.pop(0)
        mask, gens = found[key]
        for x, cm in cyc_list:
            if not (cm & ~mask).any():
                continue
            jg = gens + (x,)
            jm = _kernels.closure_mask(mul, list(jg))
            if jm.tobytes() not in found:
                add_class(jm, jg)
                queue.append(jm.tobytes())
    lat = SubgroupLattice(G, [v[0] for v in found.values()])
    _LATTICE_CACHE[id(G)] = lat
    return lat


def normalizer(lat: SubgroupLattice, h: int) -> Subgroup:
    return lat[lat.normalizer(h)]


def weyl(lat: SubgroupLattice, h: int) -> Group:
    return lat.weyl(h)


def gmaps(lat: SubgroupLattice, h: int, k: int) -> list[GMap]:
    return lat.gmaps(h, k)


def generated_subgroup(lat: SubgroupLattice, k: int, l: int) -> Subgroup:
    return lat[lat.generated_subgroup(k, l)]


def subquotient_type(lat: SubgroupLattice, k: int, l: int) -> SubquotientType:
    return lat.subquotient_type(k, l)


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Family:
    """A set of conjugacy classes closed under taking subgroups."""

    lattice: SubgroupLattice = field(repr=False, compare=False, hash=False)
    classes: frozenset[int]

    def __contains__(self, class_id: int) -> bool:
        return class_id in self.classes

    def contains_subgroup(self, h: int) -> bool:
        return self.lattice.class_of[h] in self.classes

    def sorted(self) -> list[int]:
        return sorted(self.classes)

    def is_closed(self) -> bool:
        leq = self.lattice.class_leq
        return all(a in self.classes for b in self.classes for a in np.nonzero(leq[:, b])[0])


def downward_closure(lat: SubgroupLattice, classes: Iterable[int]) -> frozenset[int]:
    out = set()
    for b in classes:
        out.update(int(a) for a in np.nonzero(lat.class_leq[:, b])[0])
    return frozenset(out)


def family(lat: SubgroupLattice, spec) -> Family:
    """Build a family from a spec.

    ``spec`` is ``"all"``, ``("p_subgroups", p)``, ``("rank_le", r)`` or
    ``("explicit", [class ids])``; strings ``"p:3"``, ``"rank_le:1"`` and
    ``"explicit:0,2"`` are accepted too.
    """
    if isinstance(spec, str):
        spec = parse_family_spec(spec)
    kind = spec if isinstance(spec, str) else spec[0]
    C = len(lat.classes)
    if kind == "all":
        cls = frozenset(range(C))
    elif kind == "p_subgroups":
        p = int(spec[1])
        cls = frozenset(c for c in range(C) if _is_p_power(lat.class_order(c), p))
    elif kind == "rank_le":
        r = int(spec[1])
        cls = frozenset(c for c in range(C) if lat.rank(lat.rep(c)) <= r)
    elif kind == "explicit":
        cls = downward_closure(lat, [int(c) for c in spec[1]])
    else:
        raise ValueError(f"unknown family spec {spec!r}")
    fam = Family(lat, cls)
    assert fam.is_closed()
    return fam


def parse_family_spec(text: str):
    text = text.strip()
    if text == "all":
        return "all"
    kind, _, arg = text.partition(":")
    if kind in ("p", "p_subgroups"):
        return ("p_subgroups", int(arg))
    if kind in ("rank_le", "rank"):
        return ("rank_le", int(arg))
    if kind == "explicit":
        return ("explicit", [int(x) for x in arg.split(",") if x.strip()])
    raise ValueError(f"unknown family spec {text!r}")


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


# ---------------------------------------------------------------------------
# G-sets
# ---------------------------------------------------------------------------


class GSet:
    """A finite G-set given by the permutation each element induces."""

    def __init__(self, group: Group, action: np.ndarray):
        action = np.asarray(action, dtype=np.int64)
        if action.shape[0] != group.order:
            raise ValueError("need one permutation per group element")
        self.group = group
        self.action = action

    @property
    def size(self) -> int:
        return int(self.action.shape[1])

    def act(self, g: int, x: int) -> int:
        return int(self.action[g, x])

    def is_action(self) -> bool:
        G = self.group
        ok = (self.action[G.identity] == np.arange(self.size)).all()
        for a in range(G.order):
            ok &= bool((self.action[G.mul[a]] == self.action[a][self.action]).all())
        return bool(ok)

    def orbits(self) -> list[list[int]]:
        seen = np.zeros(self.size, dtype=bool)
        out = []
        for x in range(self.size):
            if not seen[x]:
                orb = sorted(set(self.action[:, x].tolist()))
                seen[orb] = True
                out.append(orb)
        return out

    def stabilizer(self, lat: SubgroupLattice, x: int) -> int:
        return lat.id_of_mask(self.action[:, x] == x)

    def orbit_decomposition(self, lat: SubgroupLattice) -> list[tuple[int, list[int]]]:
        """(stabilizer class, points of the orbit) for each orbit."""
        return [(lat.class_of[self.stabilizer(lat, orb[0])], orb) for orb in self.orbits()]

    def count_orbits(self, elements: Sequence[int]) -> int:
        """Number of orbits of the subgroup with the given elements."""
        parent = list(range(self.size))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for g in elements:
            for x, y in enumerate(self.action[g]):
                ra, rb = find(x), find(int(y))
                if ra != rb:
                    parent[ra] = rb
        return len({find(x) for x in range(self.size)})

    def fixed_points(self, elements: Sequence[int]) -> list[int]:
        A = self.action[list(elements)]
        return [int(x) for x in np.nonzero((A == np.arange(self.size)[None, :]).all(axis=0))[0]]

    def union(self, other: "GSet") -> "GSet":
        return GSet(self.group, np.hstack([self.action, other.action + self.size]))

    @classmethod
    def from_cosets(cls, lat: SubgroupLattice, subgroup_ids: Sequence[int]) -> "GSet":
        """Disjoint union of the coset spaces G/K (left multiplication)."""
        G = lat.group
        blocks = []
        offset = 0
        for k in subgroup_ids:
            coset_of, reps = lat.cosets(k)
            blocks.append(coset_of[G.mul[:, reps]] + offset)
            offset += len(reps)
        if not blocks:
            return cls(G, np.zeros((G.order, 0), dtype=np.int64))
        return cls(G, np.hstack(blocks))

    @classmethod
    def regular(cls, lat: SubgroupLattice) -> "GSet":
        return cls.from_cosets(lat, [lat.trivial])

    @classmethod
    def trivial(cls, lat: SubgroupLattice, k: int = 1) -> "GSet":
        return cls.from_cosets(lat, [lat.whole] * k)


def parse_gset_spec(lat: SubgroupLattice, text: str) -> GSet:
    """Parse ``regular``, ``trivial:k``, ``cosets:c1,c2`` joined by ``+``.

    Coset specs name conjugacy class ids; the class representative is used.
    """
    ids: list[int] = []
    for part in text.split("+"):
        part = part.strip()
        kind, _, arg = part.partition(":")
        if kind == "regular":
            ids.append(lat.trivial)
        elif kind == "trivial":
            ids.extend([lat.whole] * (int(arg) if arg else 1))
        elif kind == "cosets":
            ids.extend(lat.rep(int(c)) for c in arg.split(",") if c.strip())
        else:
            raise ValueError(f"unknown G-set spec {part!r}")
    return GSet.from_cosets(lat, ids)


def lattice_json(lat: SubgroupLattice) -> str:
    return json.dumps(lat.to_json(), sort_keys=True)

