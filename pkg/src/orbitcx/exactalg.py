"""Exact linear algebra over Z/p and Z.

Matrices follow the column convention: a map R^n -> R^m is an m x n
array.  Over Z/p they are ``int64`` arrays with entries in ``[0, p)``;
over Z they are object arrays of Python ints, so intermediate growth
in Smith normal form is never truncated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels


class WrongRing(ValueError):
    pass


class NotAComplex(ValueError):
    pass


class NotChainMap(ValueError):
    pass


class NoSolution(ValueError):
    pass


@dataclass(frozen=True)
class Coefficients:
    """Z/p when ``p`` is a prime, the integers when ``p`` is None."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and (self.p < 2 or any(self.p % d == 0 for d in range(2, int(self.p ** 0.5) + 1))):
            raise ValueError(f"{self.p} is not prime")

    @property
    def is_field(self) -> bool:
        return self.p is not None

    def __str__(self) -> str:
        return "Z" if self.p is None else f"Zmod:{self.p}"

    @classmethod
    def parse(cls, text: str) -> "Coefficients":
        text = text.strip()
        if text in ("Z", "ZZ"):
            return cls(None)
        if text.startswith("Zmod:"):
            return cls(int(text[5:]))
        raise ValueError(f"unknown coefficient ring {text!r}")

    def matrix(self, M) -> np.ndarray:
        """Coerce to this ring's matrix representation."""
        if self.p is None:
            A = np.array(M, dtype=object)
            if A.ndim == 2 and A.size:
                A = np.vectorize(int, otypes=[object])(A)
            return A
        return np.asarray(M, dtype=np.int64) % self.p

    def zeros(self, m: int, n: int) -> np.ndarray:
        if self.p is None:
            A = np.empty((m, n), dtype=object)
            A.fill(0)
            return A
        return np.zeros((m, n), dtype=np.int64)

    def identity(self, n: int) -> np.ndarray:
        A = self.zeros(n, n)
        for i in range(n):
            A[i, i] = 1
        return A

    def matmul(self, A, B) -> np.ndarray:
        if self.p is None:
            A = np.asarray(A, dtype=object)
            B = np.asarray(B, dtype=object)
            if A.shape[1] == 0:
                return self.zeros(A.shape[0], B.shape[1])
            return A.dot(B)
        return (np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64)) % self.p

    def is_zero(self, A) -> bool:
        A = np.asarray(A)
        return A.size == 0 or not np.any(A != 0) if self.p is None else not np.any(np.asarray(A) % self.p)


Z = Coefficients(None)


def _as2d(M, rows: int | None = None) -> np.ndarray:
    A = np.asarray(M)
    if A.ndim == 1:
        A = A.reshape(1, -1) if rows is None else A.reshape(rows, -1)
    return A


# ---------------------------------------------------------------------------
# field case
# ---------------------------------------------------------------------------


def rank_kernel_image(M, coeffs: Coefficients) -> tuple[int, np.ndarray, np.ndarray]:
    """Rank, kernel basis (columns) and image basis (columns) over Z/p.

    The kernel basis is the standard one read off the reduced row echelon
    form; the image basis is the pivot columns of ``M`` itself.
    """
    if not coeffs.is_field:
        raise WrongRing("rank_kernel_image needs field coefficients; use smith_normal_form over Z")
    p = coeffs.p
    A = coeffs.matrix(_as2d(M))
    m, n = A.shape
    R, piv = _kernels.rref_mod_p(A, p)
    rank = len(piv)
    free = [j for j in range(n) if j not in set(piv.tolist())]
    K = np.zeros((n, len(free)), dtype=np.int64)
    for c, j in enumerate(free):
        K[j, c] = 1
        for r, pc in enumerate(piv):
            K[pc, c] = (-R[r, j]) % p
    image = A[:, piv] if rank else np.zeros((m, 0), dtype=np.int64)
    return rank, K, image


def rank(M, coeffs: Coefficients) -> int:
    A = _as2d(M)
    if A.size == 0:
        return 0
    if coeffs.is_field:
        return len(_kernels.rref_mod_p(coeffs.matrix(A), coeffs.p)[1])
    D = smith_normal_form(A, track=False)[1]
    return sum(1 for i in range(min(D.shape)) if D[i, i] != 0)


def solve_linear(A, b, coeffs: Coefficients) -> np.ndarray:
    """A solution x of A x = b over Z/p with free variables set to 0."""
    if not coeffs.is_field:
        raise WrongRing("solve_linear needs field coefficients")
    p = coeffs.p
    A = coeffs.matrix(_as2d(A))
    vector = np.ndim(b) == 1
    b = coeffs.matrix(np.asarray(b)).reshape(A.shape[0], -1)
    m, n = A.shape
    R, piv = _kernels.rref_mod_p(np.hstack([A, b]), p)
    if any(c >= n for c in piv):
        raise NoSolution("inconsistent linear system")
    x = np.zeros((n, b.shape[1]), dtype=np.int64)
    for r, c in enumerate(piv):
        x[c] = R[r, n:]
    return x[:, 0] if vector else x


def solve_retraction(iota, coeffs: Coefficients, constraints=()) -> np.ndarray:
    """A left inverse r of ``iota`` (r @ iota = I) over Z/p.

    ``constraints`` is a sequence of pairs ``(P, Q)`` demanding
    ``r @ P == Q @ r``; with P, Q the action matrices of group generators
    on target and source this makes r equivariant.
    """
    if not coeffs.is_field:
        raise WrongRing("solve_retraction needs field coefficients")
    p = coeffs.p
    iota = coeffs.matrix(_as2d(iota))
    m, k = iota.shape
    blocks = [np.kron(np.eye(k, dtype=np.int64), iota.T)]
    rhs = [np.eye(k, dtype=np.int64).reshape(-1)]
    for P, Q in constraints:
        P = coeffs.matrix(P)
        Q = coeffs.matrix(Q)
        blocks.append((np.kron(np.eye(k, dtype=np.int64), P.T) - np.kron(Q, np.eye(m, dtype=np.int64))) % p)
        rhs.append(np.zeros(k * m, dtype=np.int64))
    x = solve_linear(np.vstack(blocks), np.concatenate(rhs).reshape(-1, 1), coeffs)
    return np.asarray(x).reshape(k, m) % p


def _left_inverse_rows(M: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Rows ``rows`` and matrix ``Pinv`` with Pinv @ M[rows] = I (full column rank M)."""
    n, k = M.shape
    if k == 0:
        return np.zeros(0, dtype=np.int64), np.zeros((0, 0), dtype=np.int64)
    _, rows = _kernels.rref_mod_p(M.T.copy(), p)
    P = M[rows]
    R, _ = _kernels.rref_mod_p(np.hstack([P, np.eye(k, dtype=np.int64)]), p)
    return rows, R[:, k:]


# ---------------------------------------------------------------------------
# integers
# ---------------------------------------------------------------------------


def smith_normal_form(M, track: bool = True):
    """Smith normal form over Z: returns ``(U, D, V)`` with ``D = U @ M @ V``.

    ``U`` and ``V`` are unimodular, ``D`` is diagonal with nonnegative
    entries, each dividing the next.  :func:`smith_normal_form_full` also
    returns the inverses ``(U, D, V, Uinv, Vinv)``.
    """
    U, D, V, _, _ = smith_normal_form_full(M, track=track)
    return U, D, V


def smith_normal_form_full(M, track: bool = True):
    A = [[int(x) for x in row] for row in np.asarray(M, dtype=object).reshape(_as2d(M).shape)]
    m = len(A)
    n = len(A[0]) if m else _as2d(M).shape[1]

    def eye(k):
        return [[1 if i == j else 0 for j in range(k)] for i in range(k)]

    U, Ui, V, Vi = (eye(m), eye(m), eye(n), eye(n)) if track else (None, None, None, None)

    # elementary operations, each mirrored on U, U^-1, V, V^-1
    def row_add(i, t, q):  # row_i += q * row_t
        if q == 0:
            return
        Ai, At = A[i], A[t]
        for j in range(n):
            if At[j]:
                Ai[j] += q * At[j]
        if track:
            Ur, Ut = U[i], U[t]
            for j in range(m):
                if Ut[j]:
                    Ur[j] += q * Ut[j]
            for r in Ui:  # col_t -= q col_i
                if r[i]:
                    r[t] -= q * r[i]

    def col_add(j, t, q):  # col_j += q * col_t
        if q == 0:
            return
        for r in A:
            if r[t]:
                r[j] += q * r[t]
        if track:
            for r in V:
                if r[t]:
                    r[j] += q * r[t]
            Vj, Vt = Vi[j], Vi[t]  # row_t -= q row_j
            for c in range(n):
                if Vj[c]:
                    Vt[c] -= q * Vj[c]

    def row_swap(i, t):
        if i == t:
            return
        A[i], A[t] = A[t], A[i]
        if track:
            U[i], U[t] = U[t], U[i]
            for r in Ui:
                r[i], r[t] = r[t], r[i]

    def col_swap(j, t):
        if j == t:
            return
        for r in A:
            r[j], r[t] = r[t], r[j]
        if track:
            for r in V:
                r[j], r[t] = r[t], r[j]
            Vi[j], Vi[t] = Vi[t], Vi[j]

    def row_neg(i):
        A[i] = [-x for x in A[i]]
        if track:
            U[i] = [-x for x in U[i]]
            for r in Ui:
                r[i] = -r[i]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                a = A[i][j]
                if a and (best is None or abs(a) < best[0]):
                    best = (abs(a), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        row_swap(t, best[1])
        col_swap(t, best[2])
        while True:
            piv = A[t][t]
            moved = False
            for i in range(t + 1, m):
                if A[i][t]:
                    row_add(i, t, -(A[i][t] // piv))
            for j in range(t + 1, n):
                if A[t][j]:
                    col_add(j, t, -(A[t][j] // piv))
            # a smaller remainder becomes the new pivot
            cand = [(abs(A[i][t]), i, "r") for i in range(t + 1, m) if A[i][t]]
            cand += [(abs(A[t][j]), j, "c") for j in range(t + 1, n) if A[t][j]]
            if cand:
                _, k, kind = min(cand)
                if kind == "r":
                    row_swap(t, k)
                else:
                    col_swap(t, k)
                moved = True
            if moved:
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, 1)
        if A[t][t] < 0:
            row_neg(t)
        t += 1

    def arr(rows, r, c):
        out = np.empty((r, c), dtype=object)
        for i in range(r):
            for j in range(c):
                out[i, j] = rows[i][j]
        return out

    D = arr(A, m, n)
    if not track:
        return None, D, None, None, None
    return arr(U, m, m), D, arr(V, n, n), arr(Ui, m, m), arr(Vi, n, n)


def snf_diagonal(M) -> list[int]:
    D = smith_normal_form_full(M, track=False)[1]
    return [int(D[i, i]) for i in range(min(D.shape))]


# ---------------------------------------------------------------------------
# homology
# ---------------------------------------------------------------------------


@dataclass
class HomologyGroup:
    """ker(d_this) / im(d_next) with chosen generators.

    ``cycles`` holds one representative cycle per generator (columns);
    free generators come first, then one per torsion coefficient.  Over
    Z/p ``rank`` is the dimension and ``torsion`` is empty.
    """

    coeffs: Coefficients
    rank: int
    torsion: tuple[int, ...]
    cycles: np.ndarray
    d_this: np.ndarray = field(repr=False)
    _coord_data: tuple = field(repr=False, default=())

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    def is_zero(self) -> bool:
        return self.ngens == 0

    def is_free_rank_one(self) -> bool:
        return self.rank == 1 and not self.torsion

    def coordinates(self, z) -> np.ndarray:
        """Coordinates of the class of cycle ``z`` on the chosen generators."""
        z = np.asarray(z).reshape(-1)
        if self.coeffs.is_field:
            p = self.coeffs.p
            rows, pinv, skip = self._coord_data
            if len(rows) == 0:
                return np.zeros(0, dtype=np.int64)
            c = (pinv @ (z.astype(np.int64)[rows] % p)) % p
            return c[skip:]
        Vi, r, U2, free_idx, tors_idx, divs = self._coord_data
        y = Vi.dot(np.asarray(z, dtype=object))[r:] if Vi.shape[0] else np.zeros(0, dtype=object)
        u = U2.dot(y) if U2.shape[0] else np.zeros(0, dtype=object)
        out = [int(u[i]) for i in free_idx] + [int(u[i]) % d for i, d in zip(tors_idx, divs)]
        return np.array(out, dtype=object)


def homology_at(d_next, d_this, coeffs: Coefficients, dim: int | None = None) -> HomologyGroup:
    """Homology ker(d_this)/im(d_next) at one spot of a complex.

    ``d_this`` maps the chain group C (``dim`` = its rank) down, ``d_next``
    maps into C.  Either may have zero rows/columns.
    """
    n = dim if dim is not None else (np.shape(d_this)[1] if np.ndim(d_this) == 2 else np.shape(d_next)[0])
    d_this = coeffs.matrix(np.asarray(d_this).reshape(-1, n) if np.size(d_this) else np.zeros((np.shape(d_this)[0] if np.ndim(d_this) == 2 else 0, n)))
    d_next = coeffs.matrix(np.asarray(d_next).reshape(n, -1) if np.size(d_next) else np.zeros((n, np.shape(d_next)[1] if np.ndim(d_next) == 2 else 0)))
    if d_this.shape[0] and d_next.shape[1] and not coeffs.is_zero(coeffs.matmul(d_this, d_next)):
        raise NotAComplex("boundary maps do not compose to zero")
    if coeffs.is_field:
        return _homology_field(d_next, d_this, coeffs, n)
    return _homology_z(d_next, d_this, coeffs, n)


def _homology_field(d_next, d_this, coeffs, n):
    p = coeffs.p
    _, K, _ = rank_kernel_image(d_this, coeffs) if d_this.shape[0] else (0, np.eye(n, dtype=np.int64), None)
    r_im, _, B = rank_kernel_image(d_next, coeffs) if d_next.shape[1] else (0, None, np.zeros((n, 0), np.int64))
    # complement of im inside ker, chosen by pivots of [B | K]
    M = np.hstack([B, K]) if K.shape[1] else B
    if M.shape[1]:
        _, piv = _kernels.rref_mod_p(M.copy(), p)
        chosen = [int(c) - B.shape[1] for c in piv if c >= B.shape[1]]
    else:
        chosen = []
    Zc = K[:, chosen] if chosen else np.zeros((n, 0), dtype=np.int64)
    rows, pinv = _left_inverse_rows(np.hstack([B, Zc]), p)
    return HomologyGroup(coeffs, len(chosen), (), Zc, d_this, (rows, pinv, B.shape[1]))


def _homology_z(d_next, d_this, coeffs, n):
    if d_this.shape[0]:
        _, D, V, _, Vi = smith_normal_form_full(d_this)
        r = sum(1 for i in range(min(D.shape)) if D[i, i] != 0)
    else:
        V, Vi, r = coeffs.identity(n), coeffs.identity(n), 0
    K = V[:, r:]
    k = n - r
    if d_next.shape[1] and k:
        Y = Vi.dot(d_next)[r:, :]
        U2, D2, _, U2i, _ = smith_normal_form_full(Y)
        diag = [int(D2[i, i]) for i in range(min(D2.shape))]
    else:
        U2, U2i, diag = coeffs.identity(k), coeffs.identity(k), []
    free_idx = [i for i in range(k) if i >= len(diag) or diag[i] == 0]
    tors_idx = [i for i in range(min(k, len(diag))) if diag[i] > 1]
    divs = tuple(diag[i] for i in tors_idx)
    gens = K.dot(U2i) if k else coeffs.zeros(n, 0)
    cols = free_idx + tors_idx
    cycles = gens[:, cols] if cols else coeffs.zeros(n, 0)
    return HomologyGroup(coeffs, len(free_idx), divs, cycles, d_this, (Vi, r, U2, free_idx, tors_idx, divs))


def induced_map(f, source: HomologyGroup, target: HomologyGroup) -> np.ndarray:
    """Matrix of the chain-level map ``f`` on the chosen homology generators.

    Over Z the rows for torsion generators are reduced modulo their order.
    """
    coeffs = target.coeffs
    f = coeffs.matrix(np.asarray(f).reshape(target.cycles.shape[0], source.cycles.shape[0]))
    out = coeffs.zeros(target.ngens, source.ngens)
    for j in range(source.ngens):
        z = coeffs.matmul(f, source.cycles[:, j:j + 1])[:, 0]
        if target.d_this.shape[0] and not coeffs.is_zero(coeffs.matmul(target.d_this, z.reshape(-1, 1))):
            raise NotChainMap("image of a cycle is not a cycle")
        out[:, j] = target.coordinates(z)
    return out


def euler_characteristic(dims) -> int:
    return sum((-1) ** i * d for i, d in enumerate(dims))
