"""Random free modules and orbit matrices for property tests."""

import numpy as np

from orbitcx.orbitcat import FreeOrbitModule, OrbitMatrix


def random_module(cat, rng, max_rank=3, min_rank=0):
    objs = cat.objects
    r = int(rng.integers(min_rank, max_rank + 1))
    return FreeOrbitModule(tuple(int(objs[rng.integers(len(objs))]) for _ in range(r)))


def random_entry(cat, src_cls, tgt_cls, rng, p, terms=2):
    """A random combination of G-maps G/B -> G/K (cosets gK fixed by B)."""
    lat = cat.lattice
    fc = lat.fixed_cosets(cat.sub(src_cls), cat.sub(tgt_cls))
    if not len(fc):
        return {}
    out = {}
    for _ in range(int(rng.integers(1, terms + 1))):
        c = int(fc[rng.integers(len(fc))])
        out[c] = out.get(c, 0) + int(rng.integers(1, p or 4))
    return out


def random_matrix(cat, src, tgt, rng, p, density=0.6):
    ent = {}
    for i, s in enumerate(src.types):
        for j, t in enumerate(tgt.types):
            if rng.random() < density:
                e = random_entry(cat, s, t, rng, p)
                if e:
                    ent[(i, j)] = e
    return OrbitMatrix(cat, src, tgt, ent, p)
