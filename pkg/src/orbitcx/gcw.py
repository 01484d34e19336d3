"""Equivariant simplicial complexes and their cellular chains over Or_F(G).

Simplex boundaries of G-sets are subdivided once so that every cell
stabilizer fixes its cell pointwise; the cells of the subdivision are
flags of simplices, oriented by increasing dimension.  The group then
maps oriented cells to oriented cells without signs, so the cellular
chain modules are free on cell orbits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .chaincx import FreeChainComplex
from .exactalg import Coefficients
from .groups import (Group, GSet, SubgroupLattice, catalog, enumerate_subgroups, family as make_family,
                     group_from_json, parse_gset_spec, prime_divisors)
from .orbitcat import FreeOrbitModule, OrbitCategory, OrbitMatrix


class TooSmall(ValueError):
    pass


class IsotropyOutsideFamily(ValueError):
    def __init__(self, cls_id: int):
        super().__init__(f"cell stabilizer class {cls_id} is not in the family")
        self.cls_id = cls_id


@dataclass
class GSimplicialComplex:
    """Simplices (sorted vertex tuples) closed under faces, with a G-action on vertices."""

    vertices: GSet
    simplices: list[tuple[int, ...]]

    def __post_init__(self):
        self.simplices = sorted({tuple(sorted(s)) for s in self.simplices}, key=lambda s: (len(s), s))
        self.index = {s: i for i, s in enumerate(self.simplices)}

    @property
    def group(self) -> Group:
        return self.vertices.group

    def is_closed(self) -> bool:
        return all(f in self.index for s in self.simplices for k in range(1, len(s))
                   for f in combinations(s, k))

    def is_invariant(self) -> bool:
        act = self.vertices.action
        return all(tuple(sorted(act[g, list(s)].tolist())) in self.index
                   for g in range(self.group.order) for s in self.simplices)

    def simplex_action(self) -> np.ndarray:
        """act[g, i] = index of g applied to simplex i."""
        act = self.vertices.action
        out = np.empty((self.group.order, len(self.simplices)), dtype=np.int64)
        for i, s in enumerate(self.simplices):
            imgs = np.sort(act[:, list(s)], axis=1)
            for g in range(self.group.order):
                out[g, i] = self.index[tuple(imgs[g].tolist())]
        return out

    def to_json(self) -> dict:
        G = self.group
        return {
            "group": G.to_json(),
            "vertices": self.vertices.size,
            "vertexAction": [self.vertices.action[G.index[s]].tolist() for s in G.generators],
            "simplices": [list(s) for s in self.simplices],
        }

    @classmethod
    def from_json(cls, data: dict) -> "GSimplicialComplex":
        G = group_from_json(data["group"])
        n = int(data["vertices"])
        gen_imgs = [tuple(int(x) for x in a) for a in data["vertexAction"]]
        # extend the generator action to every element by walking words
        act = {G.identity: tuple(range(n))}
        frontier = [G.identity]
        gens = [G.index[s] for s in G.generators]
        while frontier:
            nxt = []
            for x in frontier:
                for gi, img in zip(gens, gen_imgs):
                    y = int(G.mul[gi, x])
                    if y not in act:
                        act[y] = tuple(img[v] for v in act[x])
                        nxt.append(y)
            frontier = nxt
        A = np.array([act[g] for g in range(G.order)], dtype=np.int64).reshape(G.order, n)
        gs = GSet(G, A)
        if not gs.is_action():
            raise ValueError("vertex action is not a group action")
        return cls(gs, [tuple(s) for s in data["simplices"]])


def simplex_boundary(omega: GSet) -> GSimplicialComplex:
    """All proper nonempty subsets of the points of ``omega``."""
    n = omega.size
    if n < 2:
        raise TooSmall("a simplex boundary needs at least two vertices")
    simp = [s for k in range(1, n) for s in combinations(range(n), k)]
    return GSimplicialComplex(omega, simp)


@dataclass
class AdmissibleGCW:
    """Cells of a subdivided complex: flags of simplices, by dimension."""

    base: GSimplicialComplex
    cells: list[list[tuple[int, ...]]]  # cells[k] = flags of length k+1 (simplex indices)
    simplex_act: np.ndarray = field(repr=False)

    @property
    def group(self) -> Group:
        return self.base.group

    @property
    def dim(self) -> int:
        return len(self.cells) - 1

    def act(self, g: int, cell: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(int(self.simplex_act[g, s]) for s in cell)

    def is_admissible(self) -> bool:
        """A group element fixing a flag fixes each of its simplices."""
        for cells in self.cells:
            for c in cells:
                for g in range(self.group.order):
                    img = self.act(g, c)
                    if set(img) == set(c) and img != c:
                        return False
        return True

    def total_cells(self) -> int:
        return sum(len(c) for c in self.cells)


def barycentric_subdivision(X: GSimplicialComplex) -> AdmissibleGCW:
    sizes = [len(s) for s in X.simplices]
    # faces relation: up[i] = simplices strictly containing simplex i
    sets = [frozenset(s) for s in X.simplices]
    up = [[j for j in range(len(sets)) if sizes[j] > sizes[i] and sets[i] < sets[j]] for i in range(len(sets))]
    flags: list[list[tuple[int, ...]]] = []

    def extend(flag):
        k = len(flag) - 1
        while len(flags) <= k:
            flags.append([])
        flags[k].append(tuple(flag))
        for j in up[flag[-1]]:
            extend(flag + [j])

    for i in range(len(sets)):
        extend([i])
    for f in flags:
        f.sort()
    return AdmissibleGCW(X, flags, X.simplex_action())


@dataclass
class _CellOrbit:
    rep: tuple[int, ...]
    stab: int
    cls: int
    s: int  # s R s^-1 = stab, R the class representative
    where: dict  # cell -> g with g.rep = cell


def cell_orbits(X: AdmissibleGCW, lat: SubgroupLattice, k: int) -> list[_CellOrbit]:
    G = X.group
    seen: set = set()
    out = []
    for c in X.cells[k]:
        if c in seen:
            continue
        where: dict = {}
        stab = np.zeros(G.order, dtype=bool)
        for g in range(G.order):
            img = X.act(g, c)
            where.setdefault(img, g)
            stab[g] = img == c
        seen.update(where)
        sid = lat.id_of_mask(stab)
        cls = lat.class_of[sid]
        out.append(_CellOrbit(c, sid, cls, lat.conjugator(lat.rep(cls), sid), where))
    return out


def to_orbit_chain_complex(X: AdmissibleGCW, cat: OrbitCategory, coeffs: Coefficients) -> FreeChainComplex:
    """Cellular chains of X as a free complex over Or_F(G).

    The basis element of a cell orbit with stabilizer class (R) is the cell
    sitting at the coset eR; a cell g.rep sits at coset g s R.
    """
    lat, G = cat.lattice, cat.group
    orbits = [cell_orbits(X, lat, k) for k in range(X.dim + 1)]
    for orbs in orbits:
        for o in orbs:
            if o.cls not in cat.family:
                raise IsotropyOutsideFamily(o.cls)
    locate = []
    for orbs in orbits:
        table = {}
        for idx, o in enumerate(orbs):
            for cell, g in o.where.items():
                table[cell] = (idx, g)
        locate.append(table)
    mods = [FreeOrbitModule(tuple(o.cls for o in orbs), tuple(str(o.rep) for o in orbs)) for orbs in orbits]
    bds = []
    for k in range(1, X.dim + 1):
        ent: dict = {}
        for a, o in enumerate(orbits[k]):
            base = X.act(int(G.inv[o.s]), o.rep)  # the cell at coset eR
            for i in range(len(base)):
                face = base[:i] + base[i + 1:]
                b, q = locate[k - 1][face]
                t = orbits[k - 1][b]
                coset_of, _ = lat.cosets(lat.rep(t.cls))
                c = int(coset_of[G.mul[q, t.s]])
                e = ent.setdefault((a, b), {})
                e[c] = e.get(c, 0) + (-1) ** i
        bds.append(OrbitMatrix(cat, mods[k], mods[k - 1], ent, coeffs.p))
    aug = [1] * (mods[0].rank if mods else 0)
    return FreeChainComplex(cat, mods, bds, aug, coeffs)


@dataclass
class FixedData:
    counts: list[int]  # fixed cells per dimension
    dim: int


def fixed_subcomplex(X: AdmissibleGCW, elements: Sequence[int]) -> FixedData:
    counts = []
    for cells in X.cells:
        counts.append(sum(1 for c in cells if all(X.act(g, c) == c for g in elements)))
    dim = max((k for k, n in enumerate(counts) if n), default=-1)
    return FixedData(counts, dim)


def fixed_flags(X: AdmissibleGCW, elements: Sequence[int]) -> list[list[tuple[int, ...]]]:
    return [[c for c in cells if all(X.act(g, c) == c for g in elements)] for cells in X.cells]


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------


# (group name, G-set spec) pairs; coset specs use class ids of the catalog lattices
CORPUS_SPECS: list[tuple[str, str]] = [
    ("C2", "regular"),
    ("C2", "regular+trivial:1"),
    ("C2", "regular+regular"),
    ("C3", "regular"),
    ("C3", "regular+trivial:1"),
    ("C4", "regular"),
    ("C4", "cosets:1+trivial:1"),
    ("C2xC2", "regular"),
    ("C2xC2", "cosets:1,2"),
    ("C2xC2", "regular+trivial:1"),
    ("S3", "cosets:1"),
    ("S3", "cosets:1+trivial:1"),
    ("Q8", "cosets:1"),
    ("Q8", "cosets:2,3"),
    ("Q8", "cosets:1+trivial:1"),
    ("C3xC3", "cosets:1+trivial:1"),
]


@dataclass
class CorpusItem:
    group_name: str
    gset_spec: str
    p: int
    omega: GSet
    X: AdmissibleGCW
    complex: FreeChainComplex

    @property
    def name(self) -> str:
        return f"{self.group_name}[{self.gset_spec}]/Z{self.p}"


def boundary_sphere(cat: OrbitCategory, omega: GSet, coeffs: Coefficients) -> tuple[AdmissibleGCW, FreeChainComplex]:
    X = barycentric_subdivision(simplex_boundary(omega))
    return X, to_orbit_chain_complex(X, cat, coeffs)


def build_corpus(specs: Sequence[tuple[str, str]] = CORPUS_SPECS, max_points: int = 5) -> list[CorpusItem]:
    """Subdivided simplex boundaries over Z/p for every p dividing |G|."""
    groups = catalog()
    cats: dict[str, OrbitCategory] = {}
    out = []
    for name, spec in specs:
        G = groups[name]
        if name not in cats:
            cats[name] = OrbitCategory(enumerate_subgroups(G))
        cat = cats[name]
        omega = parse_gset_spec(cat.lattice, spec)
        if omega.size > max_points:
            continue
        X = barycentric_subdivision(simplex_boundary(omega))
        for p in prime_divisors(G.order):
            C = to_orbit_chain_complex(X, cat, Coefficients(p))
            out.append(CorpusItem(name, spec, p, omega, X, C))
    return out


def complex_file(C: FreeChainComplex) -> str:
    return json.dumps(C.to_json(), sort_keys=True, indent=1)


def family_for(cat: OrbitCategory, spec) -> OrbitCategory:
    return cat.with_family(make_family(cat.lattice, spec))
