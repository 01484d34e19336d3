"""Hot inner loops: modular row reduction and subgroup closure.

Each kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical semantics.  The numba path is used when numba
imports and ``ORBITCX_DISABLE_NUMBA`` is unset (or ``0``); otherwise
the numpy path is used.  :func:`use_backend` switches at runtime, which
the tests and ``benchmarks/bench_kernels.py`` rely on.
"""

from __future__ import annotations

import os
from contextlib import contextmanager

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def decorator(func):
            return func

        return decorator


def _env_disabled() -> bool:
    return os.environ.get("ORBITCX_DISABLE_NUMBA", "0") not in ("", "0", "false", "False")


_state = {"backend": "numba" if (NUMBA_AVAILABLE and not _env_disabled()) else "numpy"}


def backend() -> str:
    return _state["backend"]


def set_backend(name: str) -> None:
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba is not installed")
    _state["backend"] = name


@contextmanager
def use_backend(name: str):
    old = _state["backend"]
    set_backend(name)
    try:
        yield
    finally:
        _state["backend"] = old


# ---------------------------------------------------------------------------
# row reduction over Z/p
# ---------------------------------------------------------------------------


@njit(cache=True)
def _inv_mod_nb(a, p):
    # extended Euclid; a is nonzero mod p
    t, newt = 0, 1
    r, newr = p, a % p
    while newr != 0:
        q = r // newr
        t, newt = newt, t - q * newt
        r, newr = newr, r - q * newr
    if t < 0:
        t += p
    return t


@njit(cache=True)
def _rref_nb(A, p):
    m, n = A.shape
    pivots = np.empty(min(m, n), dtype=np.int64)
    rank = 0
    for col in range(n):
        if rank == m:
            break
        piv = -1
        for i in range(rank, m):
            if A[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for j in range(n):
                tmp = A[rank, j]
                A[rank, j] = A[piv, j]
                A[piv, j] = tmp
        inv = _inv_mod_nb(A[rank, col], p)
        if inv != 1:
            for j in range(col, n):
                A[rank, j] = (A[rank, j] * inv) % p
        for i in range(m):
            if i != rank:
                f = A[i, col]
                if f != 0:
                    for j in range(col, n):
                        A[i, j] = (A[i, j] - f * A[rank, j]) % p
        pivots[rank] = col
        rank += 1
    return A, pivots[:rank]


def _rref_np(A: np.ndarray, p: int):
    m, n = A.shape
    pivots = []
    rank = 0
    for col in range(n):
        if rank == m:
            break
        nz = np.nonzero(A[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
        inv = pow(int(A[rank, col]), -1, p)
        A[rank, col:] = (A[rank, col:] * inv) % p
        f = A[:, col].copy()
        f[rank] = 0
        rows = np.nonzero(f)[0]
        if rows.size:
            A[rows, col:] = (A[rows, col:] - np.outer(f[rows], A[rank, col:])) % p
        pivots.append(col)
        rank += 1
    return A, np.array(pivots, dtype=np.int64)


def rref_mod_p(A: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row echelon form of ``A`` over Z/p.

    Pivot rule: columns left to right, first row with a nonzero entry.
    Returns a fresh array and the pivot column indices.
    """
    A = np.array(A, dtype=np.int64, copy=True) % p
    if A.size == 0:
        return A, np.zeros(0, dtype=np.int64)
    if _state["backend"] == "numba":
        R, piv = _rref_nb(A, np.int64(p))
        return R, piv.copy()
    return _rref_np(A, p)


# ---------------------------------------------------------------------------
# subgroup closure from a multiplication table
# ---------------------------------------------------------------------------


@njit(cache=True)
def _closure_nb(mul, gens):
    n = mul.shape[0]
    seen = np.zeros(n, dtype=np.bool_)
    queue = np.empty(n, dtype=np.int64)
    # identity is element 0 of the table only by convention of the caller;
    # find it as the element e with mul[e, e] == e
    e = 0
    for i in range(n):
        if mul[i, i] == i:
            e = i
            break
    seen[e] = True
    queue[0] = e
    head, tail = 0, 1
    while head < tail:
        x = queue[head]
        head += 1
        for k in range(gens.shape[0]):
            y = mul[x, gens[k]]
            if not seen[y]:
                seen[y] = True
                queue[tail] = y
                tail += 1
    return seen


def _closure_np(mul: np.ndarray, gens: np.ndarray) -> np.ndarray:
    n = mul.shape[0]
    e = int(np.nonzero(mul[np.arange(n), np.arange(n)] == np.arange(n))[0][0])
    seen = np.zeros(n, dtype=bool)
    seen[e] = True
    frontier = np.array([e], dtype=np.int64)
    while frontier.size:
        nxt = np.unique(mul[np.ix_(frontier, gens)].ravel()) if gens.size else frontier[:0]
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return seen


def closure_mask(mul: np.ndarray, gens) -> np.ndarray:
    """Boolean membership mask of the subgroup generated by ``gens``."""
    gens = np.asarray(gens, dtype=np.int64)
    if _state["backend"] == "numba":
        return _closure_nb(mul, gens)
    return _closure_np(mul, gens)
