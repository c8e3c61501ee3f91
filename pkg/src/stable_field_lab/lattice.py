"""Exact integer lattice algebra.

Matrices are plain nested lists of Python ints (row-major), so entries never
overflow.  A ``d x 0`` matrix is a list of ``d`` empty rows.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

IntegerMatrix = list  # list[list[int]]


# -- small matrix helpers ----------------------------------------------------

def shape(M: Sequence[Sequence]) -> tuple[int, int]:
    rows = len(M)
    cols = len(M[0]) if rows else 0
    return rows, cols


def identity(n: int) -> IntegerMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> IntegerMatrix:
    return [[0] * cols for _ in range(rows)]


def matmul(A, B):
    n, k = shape(A)
    k2, m = len(B), (len(B[0]) if B else 0)
    if k != k2 and not (k == 0 and k2 == 0):
        raise ValueError(f"shape mismatch {n}x{k} @ {k2}x{m}")
    if k == 0:
        return [[0] * m for _ in range(n)]
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def transpose(A, rows: Optional[int] = None):
    if not A:
        return [[] for _ in range(rows or 0)]
    return [list(col) for col in zip(*A)]


def columns(A) -> list[list]:
    """Columns of ``A`` as lists."""
    return [list(c) for c in zip(*A)] if A and A[0] else []


def from_columns(cols: Sequence[Sequence], rows: int) -> IntegerMatrix:
    if not cols:
        return [[] for _ in range(rows)]
    return [list(r) for r in zip(*cols)]


def hstack(A, B):
    return [list(a) + list(b) for a, b in zip(A, B)]


def field_rank(rows: Sequence[Sequence]) -> int:
    """Rank by exact Gaussian elimination over any field of exact scalars."""
    M = [list(r) for r in rows]
    if not M or not M[0]:
        return 0
    n_rows, n_cols = len(M), len(M[0])
    rank = 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if M[r][col] != 0), None)
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        inv = 1 / M[rank][col] if not isinstance(M[rank][col], int) else Fraction(1, M[rank][col])
        for r in range(rank + 1, n_rows):
            if M[r][col] != 0:
                factor = M[r][col] * inv
                M[r] = [x - factor * y for x, y in zip(M[r], M[rank])]
        rank += 1
        if rank == n_rows:
            break
    return rank


def field_solve(A, b):
    """Solve the square nonsingular system ``A x = b`` exactly."""
    n = len(A)
    M = [list(A[i]) + [b[i]] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular system")
        M[col], M[pivot] = M[pivot], M[col]
        p = M[col][col]
        p = Fraction(p) if isinstance(p, int) else p
        M[col] = [x / p for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                factor = M[r][col]
                M[r] = [x - factor * y for x, y in zip(M[r], M[col])]
    return [M[i][n] for i in range(n)]


def field_inverse(A):
    n = len(A)
    cols = [field_solve(A, [int(i == j) for i in range(n)]) for j in range(n)]
    return from_columns(cols, n)


def integer_inverse(U: IntegerMatrix) -> IntegerMatrix:
    """Inverse of a unimodular integer matrix."""
    inv = field_inverse(U)
    out = []
    for row in inv:
        out_row = []
        for x in row:
            x = Fraction(x)
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
            out_row.append(int(x))
        out.append(out_row)
    return out


def determinant(A) -> Fraction:
    n = len(A)
    if n == 0:
        return Fraction(1)
    M = [[Fraction(x) for x in row] for row in A]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            M[col], M[pivot] = M[pivot], M[col]
            det = -det
        det *= M[col][col]
        for r in range(col + 1, n):
            if M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return det


def clear_denominators(rows: Sequence[Sequence[Fraction]]) -> tuple[IntegerMatrix, int]:
    """Scale a rational matrix by the lcm of its denominators."""
    den = 1
    for row in rows:
        for x in row:
            den = math.lcm(den, Fraction(x).denominator)
    return [[int(Fraction(x) * den) for x in row] for row in rows], den


# -- Smith normal form --------------------------------------------------------

@dataclass(frozen=True)
class SnfResult:
    """``U @ M @ V == D`` with unimodular ``U``, ``V`` and diagonal ``D``."""

    U: IntegerMatrix
    D: IntegerMatrix
    V: IntegerMatrix

    @property
    def diagonal(self) -> list[int]:
        rows, cols = shape(self.D)
        return [self.D[i][i] for i in range(min(rows, cols))]

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)


def smith_normal_form(M: IntegerMatrix) -> SnfResult:
    """Smith normal form with transforms.

    Returns ``U, D, V`` such that ``U M V = D``, ``U`` and ``V`` unimodular and
    the diagonal of ``D`` a nonnegative divisibility chain with zeros last.
    """
    m, n = shape(M)
    if m == 0:
        raise ValueError("smith_normal_form needs a nonempty matrix")
    A = [[int(x) for x in row] for row in M]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        A[dst] = [x + q * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] != 0 and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            pivot = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // pivot))
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // pivot))
                    clean = clean and A[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % pivot),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return SnfResult(U=U, D=A, V=V)


def invariant_factors(M: IntegerMatrix) -> list[int]:
    """Nonzero invariant factors of ``M``."""
    if not M or not M[0]:
        return []
    return [x for x in smith_normal_form(M).diagonal if x != 0]


def lattice_rank(gens: IntegerMatrix) -> int:
    """Rank of the lattice spanned by the columns of ``gens``."""
    return len(invariant_factors(gens))


def integer_kernel(E: Sequence[Sequence], d: int) -> IntegerMatrix:
    """Basis (as columns) of the saturated lattice ``{n in Z^d : E n = 0}``.

    ``E`` may have rational entries.
    """
    if not E:
        return identity(d)
    Eint, _ = clear_denominators(E)
    snf = smith_normal_form(Eint)
    r = snf.rank
    return [row[r:] for row in snf.V]


def lattice_contains(basis: IntegerMatrix, vec: Sequence[int]) -> bool:
    """Whether ``vec`` is an integer combination of the columns of ``basis``."""
    if not basis or not basis[0]:
        return all(x == 0 for x in vec)
    snf = smith_normal_form(basis)
    w = [sum(u * x for u, x in zip(row, vec)) for row in snf.U]
    diag = snf.diagonal
    for j, x in enumerate(w):
        dj = diag[j] if j < len(diag) else 0
        if dj == 0:
            if x != 0:
                return False
        elif x % dj:
            return False
    return True


def lattice_equal(B1: IntegerMatrix, B2: IntegerMatrix) -> bool:
    return all(lattice_contains(B2, c) for c in columns(B1)) and all(
        lattice_contains(B1, c) for c in columns(B2)
    )


def congruence_sublattice(B: IntegerMatrix, modulus: int) -> IntegerMatrix:
    """Columns generating ``{x in Z^s : B x = 0 mod modulus}``."""
    rows, s = shape(B)
    if rows == 0 or all(x == 0 for row in B for x in row):
        return identity(s)
    snf = smith_normal_form(B)
    diag = snf.diagonal
    # with x = V z, the congruence splits into d_j z_j = 0 mod modulus
    scales = [modulus // math.gcd(modulus, diag[j]) if j < len(diag) and diag[j] else 1
              for j in range(s)]
    return [[v * c for v, c in zip(row, scales)] for row in snf.V]


# -- quotient groups -----------------------------------------------------------

@dataclass(frozen=True)
class QuotientDecomposition:
    """Structure of ``Z^d / K`` for a kernel lattice ``K``.

    ``projection`` is the unimodular change of basis ``U``: the coordinates
    ``U n`` of a point ``n`` split into torsion coordinates (first
    ``len(torsion_invariants)`` positions that are reduced mod the invariant
    factors; trivial factors already dropped) and free coordinates (last
    ``free_rank`` positions).
    """

    ambient_rank: int
    kernel_basis: IntegerMatrix
    free_rank: int
    torsion_invariants: list[int]
    free_lift_basis: IntegerMatrix
    projection: IntegerMatrix = field(repr=False)
    kernel_rank: int = 0
    _diagonal: tuple = field(default=(), repr=False)

    def coordinates(self, vec: Sequence[int]) -> tuple[list[int], list[int]]:
        """Image of ``vec`` in ``Z^p x prod Z/d_j`` as (free, torsion) parts."""
        w = [sum(u * x for u, x in zip(row, vec)) for row in self.projection]
        q = self.kernel_rank
        torsion = [w[j] % self._diagonal[j] for j in range(q) if self._diagonal[j] > 1]
        return w[q:], torsion


def quotient_decomposition(d: int, kernel_gens: IntegerMatrix) -> QuotientDecomposition:
    """Decompose ``Z^d / K`` into free and finite parts with a free lift."""
    if len(kernel_gens) != d:
        raise ValueError(f"kernel generators must have {d} rows, got {len(kernel_gens)}")
    if not kernel_gens or not kernel_gens[0] or all(x == 0 for r in kernel_gens for x in r):
        return QuotientDecomposition(
            ambient_rank=d,
            kernel_basis=[list(r) for r in kernel_gens] if kernel_gens else [[] for _ in range(d)],
            free_rank=d,
            torsion_invariants=[],
            free_lift_basis=identity(d),
            projection=identity(d),
            kernel_rank=0,
            _diagonal=(),
        )
    snf = smith_normal_form(kernel_gens)
    q = snf.rank
    diag = tuple(snf.diagonal[:q])
    U_inv = integer_inverse(snf.U)
    free_lift = [row[q:] for row in U_inv]
    return QuotientDecomposition(
        ambient_rank=d,
        kernel_basis=[list(r) for r in kernel_gens],
        free_rank=d - q,
        torsion_invariants=[x for x in diag if x > 1],
        free_lift_basis=free_lift,
        projection=snf.U,
        kernel_rank=q,
        _diagonal=diag,
    )


# -- covering verifier ----------------------------------------------------------

def _box_points(bound: int, d: int) -> np.ndarray:
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    if d == 0:
        return np.zeros((1, 0), dtype=np.int64)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def _basis_matrix(u, v) -> list[list[Fraction]]:
    vecs = [list(map(Fraction, x)) for x in list(u) + list(v)]
    if not vecs:
        raise ValueError("need at least one vector")
    d = len(vecs[0])
    if any(len(x) != d for x in vecs):
        raise ValueError("vectors must share one dimension")
    if len(vecs) != d:
        raise ValueError(f"need p + q = d vectors, got {len(vecs)} in dimension {d}")
    return from_columns(vecs, d)


def verify_covering(M: int, u, v, n: int, m: int) -> bool:
    """Check that the dyadic box ``[-n, n]^d`` at level ``m`` is covered.

    Every ``g`` in ``[-n1, n1] cap 2^-m Z^d`` must be ``y + sum a_i u_i +
    sum b_j v_j`` with ``y`` in ``[-M1, M1] cap 2^-m Z^d`` and every coefficient
    in ``[-Mn, Mn] cap 2^-m Z``.  Since the ``u``'s and ``v``'s form a basis,
    the coefficients are determined by ``y``; each candidate ``y`` costs one
    exact solve.
    """
    B = _basis_matrix(u, v)
    d = len(B)
    if determinant(B) == 0:
        raise ValueError("u and v vectors are rationally dependent")
    if M < 0 or n < 1 or m < 0:
        raise ValueError("need M >= 0, n >= 1, m >= 0")
    scale = 2 ** m
    inv = field_inverse(B)
    adj, delta = clear_denominators(inv)
    # scaled coordinates: G = 2^m g, Y = 2^m y, 2^m c = B^-1 (G - Y)
    limit = delta * scale * M * n
    G = _box_points(scale * n, d)
    Y = _box_points(scale * M, d)
    biggest = max(abs(x) for row in adj for x in row) * d * scale * (n + M)
    if biggest >= 2 ** 62:
        return _verify_covering_exact(adj, delta, limit, G, Y)
    A = np.array(adj, dtype=np.int64)
    AY = Y @ A.T
    AG = G @ A.T
    for w in AG:
        W = w - AY
        ok = np.all((W % delta == 0) & (np.abs(W) <= limit), axis=1)
        if not ok.any():
            return False
    return True


def _verify_covering_exact(adj, delta, limit, G, Y) -> bool:
    for g in G.tolist():
        found = False
        for y in Y.tolist():
            diff = [a - b for a, b in zip(g, y)]
            w = [sum(a * x for a, x in zip(row, diff)) for row in adj]
            if all(x % delta == 0 and abs(x) <= limit for x in w):
                found = True
                break
        if not found:
            return False
    return True


def covering_constant_search(u, v, n_probe: int, m_probe: int, M_max: int) -> Optional[int]:
    """Smallest ``M <= M_max`` covering every probe ``n <= n_probe, m <= m_probe``.

    Returns None when no such ``M`` exists in range.  That does not refute
    existence for larger ``M``.
    """
    B = _basis_matrix(u, v)
    if determinant(B) == 0:
        raise ValueError("u and v vectors are rationally dependent")
    for M in range(1, M_max + 1):
        if all(
            verify_covering(M, u, v, n, m)
            for n, m in itertools.product(range(1, n_probe + 1), range(m_probe + 1))
        ):
            return M
    return None
