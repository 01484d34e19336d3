"""Finite augmented chain complexes of free modules over the orbit category.

``modules[i]`` is C_i for i = 0..d and ``boundaries[i-1]`` is the
OrbitMatrix of d_i: C_i -> C_{i-1}.  The augmentation stores one
coefficient per basis element of C_0 (the value of the basis generator
in the constant module R).

Evaluated complexes are handed to :mod:`orbitcx.exactalg` in the column
convention, i.e. as transposes of :func:`orbitcat.evaluate_matrix`.
Reduced homology puts R in degree -1 with the augmentation as d_0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import exactalg
from .exactalg import Coefficients, HomologyGroup
from .groups import SubgroupLattice, family as make_family, group_from_json
from .orbitcat import (FreeOrbitModule, OrbitCategory, OrbitMatrix, augmentation_compose, compose,
                       evaluate_matrix, isotypic_filtration, rank_at, restriction_matrix, weyl_action_matrix,
                       weyl_generators)


class NotASphere(ValueError):
    def __init__(self, cls_id: int, degree: int, message: str = ""):
        super().__init__(message or f"not a homology sphere at class {cls_id}, degree {degree}")
        self.cls_id = cls_id
        self.degree = degree


class NotSubconjugate(ValueError):
    pass


# ---------------------------------------------------------------------------
# super class functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SuperClassFunction:
    """Integer function on conjugacy classes of subgroups, -1 by default."""

    lattice: SubgroupLattice = field(repr=False, compare=False, hash=False)
    values: tuple[int, ...]

    @classmethod
    def from_dict(cls, lattice: SubgroupLattice, values: dict) -> "SuperClassFunction":
        return cls(lattice, tuple(int(values.get(c, -1)) for c in range(len(lattice.classes))))

    @classmethod
    def constant(cls, lattice: SubgroupLattice, v: int) -> "SuperClassFunction":
        return cls(lattice, (v,) * len(lattice.classes))

    def __getitem__(self, cls_id: int) -> int:
        return self.values[cls_id]

    def at(self, h: int) -> int:
        """Value at a subgroup id."""
        return self.values[self.lattice.class_of[h]]

    def support(self) -> frozenset[int]:
        return frozenset(c for c, v in enumerate(self.values) if v != -1)

    def __add__(self, other: "SuperClassFunction") -> "SuperClassFunction":
        return SuperClassFunction(self.lattice, tuple(a + b for a, b in zip(self.values, other.values)))

    def to_json(self) -> dict:
        return {"values": {str(c): v for c, v in enumerate(self.values)}}

    @classmethod
    def from_json(cls, lattice: SubgroupLattice, data: dict) -> "SuperClassFunction":
        vals = data["values"]
        if isinstance(vals, list):
            vals = dict(enumerate(vals))
        return cls.from_dict(lattice, {int(k): int(v) for k, v in vals.items()})


# ---------------------------------------------------------------------------
# complexes
# ---------------------------------------------------------------------------


@dataclass
class EvaluatedComplex:
    """C(L) as plain matrices: ``d[i]`` is d_i (column convention), d[0] = augmentation."""

    L: int
    dims: list[int]
    d: list[np.ndarray]
    coeffs: Coefficients

    def d_at(self, i: int) -> np.ndarray:
        """d_i for i in -1..top+1, with zero maps outside the stored range."""
        top = len(self.dims) - 1
        if i == -1:
            return self.coeffs.zeros(0, 1)
        if i == top + 1:
            return self.coeffs.zeros(self.dims[top] if top >= 0 else 1, 0)
        return self.d[i]

    def dim_at(self, i: int) -> int:
        return 1 if i == -1 else self.dims[i]

    def reduced_homology(self, degree: int) -> HomologyGroup:
        return exactalg.homology_at(self.d_at(degree + 1), self.d_at(degree), self.coeffs, dim=self.dim_at(degree))

    def unreduced_homology(self, degree: int) -> HomologyGroup:
        this = self.coeffs.zeros(0, self.dims[0]) if degree == 0 else self.d_at(degree)
        return exactalg.homology_at(self.d_at(degree + 1), this, self.coeffs, dim=self.dims[degree])

    def restricted(self, coords: Sequence[Sequence[int]], augmented: bool = True) -> "EvaluatedComplex":
        """The coordinate sub- or quotient complex on the given index sets per degree."""
        d = []
        for i in range(len(self.dims)):
            cols = list(coords[i])
            if i == 0:
                M = self.d[0][:, cols] if augmented else self.coeffs.zeros(1, len(cols))
            else:
                M = self.d[i][np.ix_(list(coords[i - 1]), cols)]
            d.append(self.coeffs.matrix(M) if M.size else self.coeffs.zeros(*M.shape))
        return EvaluatedComplex(self.L, [len(c) for c in coords], d, self.coeffs)


class FreeChainComplex:
    """A finite free augmented chain complex over R Or_F(G)."""

    def __init__(self, cat: OrbitCategory, modules: Sequence[FreeOrbitModule], boundaries: Sequence[OrbitMatrix],
                 augmentation: Sequence[int], coeffs: Coefficients):
        if len(boundaries) != max(len(modules) - 1, 0):
            raise ValueError("need one boundary matrix per positive degree")
        self.cat = cat
        self.coeffs = coeffs
        self.modules = list(modules)
        self.boundaries = [b.reduce(coeffs.p) for b in boundaries]
        for i, b in enumerate(self.boundaries):
            if b.source.types != self.modules[i + 1].types or b.target.types != self.modules[i].types:
                raise exactalg.NotAComplex(f"boundary d_{i + 1} does not match the modules")
        p = coeffs.p
        self.augmentation = [int(a) % p if p else int(a) for a in augmentation]
        if modules and len(self.augmentation) != modules[0].rank:
            raise ValueError("one augmentation coefficient per basis element of C_0")
        for F in self.modules:
            F.check(cat)
        self._eval: dict[int, EvaluatedComplex] = {}

    @property
    def top(self) -> int:
        return len(self.modules) - 1

    @property
    def lattice(self) -> SubgroupLattice:
        return self.cat.lattice

    def boundary(self, i: int) -> OrbitMatrix:
        return self.boundaries[i - 1]

    def total_rank(self) -> int:
        return sum(F.rank for F in self.modules)

    def evaluated(self, L: int) -> EvaluatedComplex:
        if L not in self._eval:
            cf = self.coeffs
            dims = [rank_at(self.cat, F, L) for F in self.modules]
            d = []
            if self.modules:
                eps = np.array([self.augmentation[b] for b, t in enumerate(self.modules[0].types)
                                for _ in range(self.cat.nfixed(t, L))], dtype=np.int64).reshape(1, -1)
                d.append(cf.matrix(eps) if eps.size else cf.zeros(1, 0))
            for i, A in enumerate(self.boundaries, start=1):
                M = evaluate_matrix(A, L).T
                d.append(cf.matrix(M) if M.size else cf.zeros(*M.shape))
            self._eval[L] = EvaluatedComplex(L, dims, d, cf)
        return self._eval[L]

    def copy_with(self, modules, boundaries, augmentation) -> "FreeChainComplex":
        return FreeChainComplex(self.cat, modules, boundaries, augmentation, self.coeffs)

    # -- serialisation -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "group": self.cat.group.to_json(),
            "family": sorted(self.cat.family.classes),
            "coefficients": str(self.coeffs),
            "modules": [F.to_json() for F in self.modules],
            "boundaries": [b.to_json() for b in self.boundaries],
            "augmentation": list(self.augmentation),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict, cat: OrbitCategory | None = None) -> "FreeChainComplex":
        if cat is None:
            G = group_from_json(data["group"])
            from .groups import enumerate_subgroups
            lat = enumerate_subgroups(G)
            fam = data.get("family", "all")
            fam = make_family(lat, ("explicit", fam)) if isinstance(fam, list) else make_family(lat, fam)
            cat = OrbitCategory(lat, fam)
        coeffs = Coefficients.parse(data.get("coefficients", "Z"))
        mods = [FreeOrbitModule.from_json(m) for m in data["modules"]]
        bds = [OrbitMatrix.from_json(cat, mods[i + 1], mods[i], b, coeffs.p) for i, b in enumerate(data["boundaries"])]
        return cls(cat, mods, bds, data.get("augmentation", []), coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, FreeChainComplex) and self.to_json() == other.to_json()


def zero_complex(cat: OrbitCategory, coeffs: Coefficients) -> FreeChainComplex:
    return FreeChainComplex(cat, [], [], [], coeffs)


# ---------------------------------------------------------------------------
# validation and dimension functions
# ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    boundary_failures: list[int] = field(default_factory=list)  # i with d_i d_{i+1} != 0
    augmentation_failure: bool = False
    not_surjective: list[int] = field(default_factory=list)  # support classes with eps(H) not onto R

    @property
    def ok(self) -> bool:
        """d^2 = 0 and eps d_1 = 0."""
        return not self.boundary_failures and not self.augmentation_failure

    @property
    def strict_ok(self) -> bool:
        return self.ok and not self.not_surjective


def validate(C: FreeChainComplex) -> ValidationReport:
    rep = ValidationReport()
    for i in range(1, C.top):
        if not compose(C.boundary(i + 1), C.boundary(i)).is_zero():
            rep.boundary_failures.append(i)
    if C.top >= 1:
        eps = augmentation_compose(C.boundary(1), C.augmentation, C.coeffs.p)
        rep.augmentation_failure = any(eps)
    for c in support(C):
        e = C.evaluated(C.cat.sub(c)).d[0]
        vals = [int(x) for x in np.asarray(e).reshape(-1)]
        if C.coeffs.is_field:
            onto = any(v % C.coeffs.p for v in vals)
        else:
            from math import gcd
            g = 0
            for v in vals:
                g = gcd(g, v)
            onto = g == 1
        if not onto:
            rep.not_surjective.append(c)
    return rep


def support(C: FreeChainComplex) -> list[int]:
    return [c for c in C.cat.objects if any(rank_at(C.cat, F, C.cat.sub(c)) for F in C.modules)]


def dim_function(C: FreeChainComplex) -> SuperClassFunction:
    vals = {}
    for c in C.cat.objects:
        L = C.cat.sub(c)
        vals[c] = max((i for i, F in enumerate(C.modules) if rank_at(C.cat, F, L)), default=-1)
    return SuperClassFunction.from_dict(C.lattice, vals)


def hdim_at(C: FreeChainComplex, L: int) -> int:
    E = C.evaluated(L)
    for i in range(C.top, -1, -1):
        if E.dims[i] and not E.unreduced_homology(i).is_zero():
            return i
    return -1


def hdim_function(C: FreeChainComplex) -> SuperClassFunction:
    return SuperClassFunction.from_dict(C.lattice, {c: hdim_at(C, C.cat.sub(c)) for c in C.cat.objects})


# ---------------------------------------------------------------------------
# homology
# ---------------------------------------------------------------------------


class HomologyTable:
    """Reduced homology of C(L), degrees -1..top, computed lazily per subgroup."""

    def __init__(self, C: FreeChainComplex):
        self.C = C
        self._groups: dict[tuple[int, int], HomologyGroup] = {}

    def group(self, L: int, degree: int) -> HomologyGroup:
        key = (L, degree)
        if key not in self._groups:
            self._groups[key] = self.C.evaluated(L).reduced_homology(degree)
        return self._groups[key]

    def at(self, L: int) -> list[HomologyGroup]:
        return [self.group(L, k) for k in range(-1, self.C.top + 1)]

    def signature(self, L: int) -> tuple:
        """Nonzero degrees with (rank, torsion): comparable across complexes."""
        return tuple((k, g.rank, g.torsion) for k, g in zip(range(-1, self.C.top + 1), self.at(L)) if not g.is_zero())

    def table(self) -> dict[int, tuple]:
        return {c: self.signature(self.C.cat.sub(c)) for c in self.C.cat.objects}

    def weyl_action(self, L: int, degree: int) -> list[np.ndarray]:
        """Matrices of Weyl generators of W_G(L) on reduced homology in ``degree``."""
        grp = self.group(L, degree)
        out = []
        for n in weyl_generators(self.C.cat, L):
            if degree == -1:
                f = self.C.coeffs.identity(1)
            else:
                f = weyl_action_matrix(self.C.cat, self.C.modules[degree], L, n).T
            out.append(exactalg.induced_map(f, grp, grp))
        return out

    def restriction(self, h: int, k: int, degree: int) -> np.ndarray:
        """r^K_H on reduced homology in ``degree``."""
        return restriction_on_homology(self.C, h, k, degree, self)


def homology_table(C: FreeChainComplex) -> HomologyTable:
    return HomologyTable(C)


def is_homology_sphere(C: FreeChainComplex, table: HomologyTable | None = None) -> SuperClassFunction:
    """The sphere-degree function n, or NotASphere at the first bad (class, degree)."""
    table = table or HomologyTable(C)
    vals = {}
    for c in C.cat.objects:
        L = C.cat.sub(c)
        found = None
        for k, g in zip(range(-1, C.top + 1), table.at(L)):
            if g.is_zero():
                continue
            if g.is_free_rank_one() and found is None:
                found = k
            else:
                raise NotASphere(c, k)
        if found is None:
            raise NotASphere(c, -1, f"class {c} has no homology at all")
        vals[c] = found
    return SuperClassFunction.from_dict(C.lattice, vals)


@dataclass
class OrientationReport:
    oriented: bool
    failures: list[tuple[int, int]]  # (class, Weyl generator element)


def is_oriented(C: FreeChainComplex, table: HomologyTable | None = None) -> OrientationReport:
    table = table or HomologyTable(C)
    n = is_homology_sphere(C, table)
    fails = []
    for c in C.cat.objects:
        L = C.cat.sub(c)
        gens = weyl_generators(C.cat, L)
        for g, M in zip(gens, table.weyl_action(L, n[c])):
            one = C.coeffs.identity(M.shape[0])
            if not C.coeffs.is_zero(np.asarray(C.coeffs.matrix(M)) - one):
                fails.append((c, g))
    return OrientationReport(not fails, fails)


# ---------------------------------------------------------------------------
# image subcomplexes
# ---------------------------------------------------------------------------


def _check_pair(C: FreeChainComplex, h: int, k: int) -> None:
    if not C.lattice.is_subgroup(h, k):
        raise NotSubconjugate(f"subgroup {h} is not contained in {k}")


def image_coordinates(C: FreeChainComplex, h: int, k: int) -> list[list[int]]:
    """Coordinates of C^K_H = im(r^K_H) inside C(H), per degree.

    r^K_H maps basis points to basis points, so its image is a coordinate
    subcomplex; the index sets are read off the restriction matrices.
    """
    _check_pair(C, h, k)
    out = []
    for F in C.modules:
        R = restriction_matrix(C.cat, F, h, k)
        out.append(sorted(int(j) for j in np.nonzero(R.any(axis=0))[0]))
    return out


def image_subcomplex(C: FreeChainComplex, h: int, k: int) -> EvaluatedComplex:
    return C.evaluated(h).restricted(image_coordinates(C, h, k))


def restriction_on_homology(C: FreeChainComplex, h: int, k: int, degree: int,
                            table: HomologyTable | None = None) -> np.ndarray:
    _check_pair(C, h, k)
    table = table or HomologyTable(C)
    src, tgt = table.group(k, degree), table.group(h, degree)
    if degree == -1:
        f = C.coeffs.identity(1)
    else:
        f = restriction_matrix(C.cat, C.modules[degree], h, k).T
    return exactalg.induced_map(f, src, tgt)


def _span_dim(cols: np.ndarray, coeffs: Coefficients) -> int:
    return exactalg.rank(cols, coeffs) if cols.size else 0


@dataclass
class IntersectionReport:
    M: int
    dims: list[int]  # dim of C^K_H ∩ C^L_H per degree
    m_in_family: bool
    equal_to_CM: bool | None  # None when the intersection is zero and M is outside F


def intersect_images(C: FreeChainComplex, h: int, k: int, l: int) -> IntersectionReport:
    """Degreewise intersection of C^K_H and C^L_H, checked against C^M_H.

    Intersections are computed as subspaces (dim U + dim V - dim(U+V)),
    not by intersecting coordinate sets, so the comparison with C^M_H is a
    genuine check.
    """
    lat, cf = C.lattice, C.coeffs
    m = lat.generated_subgroup(k, l)
    ck, cl = image_coordinates(C, h, k), image_coordinates(C, h, l)
    in_fam = C.cat.family.contains_subgroup(m)
    cm = image_coordinates(C, h, m) if in_fam else None
    dims, equal = [], True
    field = cf if cf.is_field else Coefficients(2)
    for i, F in enumerate(C.modules):
        n = rank_at(C.cat, F, h)
        eye = np.eye(n, dtype=np.int64)
        U, V = eye[:, ck[i]], eye[:, cl[i]]
        du, dv = len(ck[i]), len(cl[i])
        dsum = _span_dim(np.hstack([U, V]), field)
        dint = du + dv - dsum
        dims.append(dint)
        if cm is not None:
            W = eye[:, cm[i]]
            # C^M_H inside both images and of the intersection's dimension
            inside = (_span_dim(np.hstack([U, W]), field) == du and _span_dim(np.hstack([V, W]), field) == dv)
            equal &= inside and len(cm[i]) == dint
    nonzero = any(dims)
    if cm is None:
        return IntersectionReport(m, dims, False, None if not nonzero else False)
    return IntersectionReport(m, dims, True, equal)


def sum_coordinates(C: FreeChainComplex, h: int, ks: Iterable[int]) -> list[list[int]]:
    sets = [set() for _ in C.modules]
    for k in ks:
        for i, c in enumerate(image_coordinates(C, h, k)):
            sets[i].update(c)
    return [sorted(s) for s in sets]


@dataclass
class SumOfImages:
    homology: list[HomologyGroup]  # reduced, degrees -1..top
    from_M: np.ndarray | None  # inclusion-induced map H_n(C^M_H) -> H_n(sum)
    complex: EvaluatedComplex


def sum_of_images_homology(C: FreeChainComplex, h: int, ks: Sequence[int], m: int | None = None,
                           degree: int | None = None) -> SumOfImages:
    """Homology of sum_i C^{K_i}_H and, optionally, the map from C^M_H in ``degree``."""
    coords = sum_coordinates(C, h, ks)
    S = C.evaluated(h).restricted(coords)
    hom = [S.reduced_homology(k) for k in range(-1, C.top + 1)]
    f = None
    if m is not None and degree is not None:
        cm = image_coordinates(C, h, m)
        Mx = C.evaluated(h).restricted(cm)
        src = Mx.reduced_homology(degree)
        tgt = hom[degree + 1]
        if degree == -1:
            inc = C.coeffs.identity(1)
        else:
            pos = {c: a for a, c in enumerate(coords[degree])}
            inc = C.coeffs.zeros(len(coords[degree]), len(cm[degree]))
            for b, c in enumerate(cm[degree]):
                inc[pos[c], b] = 1
        f = exactalg.induced_map(inc, src, tgt)
    return SumOfImages(hom, f, S)


def splitting_quotient(C: FreeChainComplex, cls_id: int) -> EvaluatedComplex:
    """S_H C evaluated at H: the quotient of C(H) by C^{>(H)}(H), unaugmented."""
    h = C.cat.sub(cls_id)
    coords = []
    for F in C.modules:
        _, _, iso = isotypic_filtration(C.cat, F, cls_id)
        isoset = set(iso)
        idx, off = [], 0
        for b, t in enumerate(F.types):
            r = C.cat.nfixed(t, h)
            if b in isoset:
                idx.extend(range(off, off + r))
            off += r
        coords.append(idx)
    return C.evaluated(h).restricted(coords, augmented=False)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def add_contractible_summand(C: FreeChainComplex, cls_id: int, degree: int, label: str = "pad") -> FreeChainComplex:
    """C plus R[G/H^?] in degrees ``degree`` and ``degree - 1`` joined by the identity."""
    if degree < 1 or degree > C.top + 1:
        raise ValueError(f"degree must lie in 1..{C.top + 1}")
    mods = list(C.modules)
    if degree == C.top + 1:
        mods.append(FreeOrbitModule(()))
    new_mods = []
    for i, F in enumerate(mods):
        if i in (degree, degree - 1):
            F = F + FreeOrbitModule((cls_id,), (f"{label}{degree}.{i}",))
        new_mods.append(F)
    cat, p = C.cat, C.coeffs.p
    bds = []
    for i in range(1, len(new_mods)):
        src, tgt = new_mods[i], new_mods[i - 1]
        ent = dict(C.boundary(i).entries) if i <= C.top else {}
        if i == degree:
            ent[(src.rank - 1, tgt.rank - 1)] = {0: 1}
        bds.append(OrbitMatrix(cat, src, tgt, ent, p))
    aug = list(C.augmentation) + ([0] if degree == 1 else [])
    return FreeChainComplex(cat, new_mods, bds, aug, C.coeffs)


def direct_sum(C: FreeChainComplex, D: FreeChainComplex) -> FreeChainComplex:
    """Degreewise sum, augmentations side by side (not a sphere in general)."""
    top = max(C.top, D.top)
    empty = FreeOrbitModule(())

    def mod(X, i):
        return X.modules[i] if i <= X.top else empty

    mods = [mod(C, i) + mod(D, i) for i in range(top + 1)]
    bds = []
    for i in range(1, top + 1):
        ent = dict(C.boundary(i).entries) if i <= C.top else {}
        if i <= D.top:
            r0, c0 = mod(C, i).rank, mod(C, i - 1).rank
            for (a, b), e in D.boundary(i).entries.items():
                ent[(a + r0, b + c0)] = e
        bds.append(OrbitMatrix(C.cat, mods[i], mods[i - 1], ent, C.coeffs.p))
    return FreeChainComplex(C.cat, mods, bds, list(C.augmentation) + list(D.augmentation), C.coeffs)


def with_coefficients(C: FreeChainComplex, coeffs: Coefficients) -> FreeChainComplex:
    """Same complex over other coefficients (reduction mod p from Z)."""
    return FreeChainComplex(C.cat, C.modules, [OrbitMatrix(C.cat, b.source, b.target, b.entries, coeffs.p)
                                               for b in C.boundaries], C.augmentation, coeffs)


def change_basis(C: FreeChainComplex, degree: int, phi: OrbitMatrix, phi_inv: OrbitMatrix) -> FreeChainComplex:
    """Replace the basis of C_degree via an automorphism phi (row convention).

    d_degree becomes phi^-1 d (rows), d_{degree+1} becomes d phi (columns)
    and the augmentation transforms with phi^-1 when degree is 0.
    """
    bds = list(C.boundaries)
    if degree >= 1:
        bds[degree - 1] = compose(phi_inv, bds[degree - 1])
    if degree + 1 <= C.top:
        bds[degree] = compose(bds[degree], phi)
    aug = C.augmentation
    if degree == 0:
        aug = augmentation_compose(phi_inv, C.augmentation, C.coeffs.p)
    return FreeChainComplex(C.cat, C.modules, bds, aug, C.coeffs)
