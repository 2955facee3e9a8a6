"""Exact integer linear algebra: Smith normal form with unimodular
transforms, canonical Hermite row bases for lattices, integer kernels and
solvers.

Matrices are plain lists of lists of Python ints, so everything is
arbitrary precision; no modular shortcuts anywhere.
"""

from __future__ import annotations


def identity_matrix(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(A, B) -> list[list[int]]:
    if not A:
        return []
    if not B:
        return [[] for _ in A]
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def mat_vec(A, x) -> list[int]:
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def transpose(M) -> list[list[int]]:
    return [list(col) for col in zip(*M)] if M else []


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """g, s, t with g = s*a + t*b."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def smith_normal_form(M) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """U, S, V with U*M*V = S, S diagonal with S[0][0] | S[1][1] | ... and
    U, V unimodular.  The identity U*M*V == S is re-checked before
    returning."""
    m = len(M)
    n = len(M[0]) if m else 0
    S = [list(row) for row in M]
    U = identity_matrix(m)
    V = identity_matrix(n)

    def swap_rows(i, j):
        if i != j:
            S[i], S[j] = S[j], S[i]
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        if i != j:
            for row in S:
                row[i], row[j] = row[j], row[i]
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        if q:
            Sd, Ss = S[dst], S[src]
            for k in range(n):
                Sd[k] += q * Ss[k]
            Ud, Us = U[dst], U[src]
            for k in range(m):
                Ud[k] += q * Us[k]

    def add_col(dst, src, q):
        if q:
            for row in S:
                row[dst] += q * row[src]
            for row in V:
                row[dst] += q * row[src]

    t = 0
    limit = min(m, n)
    while t < limit:
        piv = None
        best = None
        for i in range(t, m):
            row = S[i]
            for j in range(t, n):
                v = row[j]
                if v:
                    a = abs(v)
                    if best is None or a < best:
                        best, piv = a, (i, j)
                        if a == 1:
                            break
            if best == 1:
                break
        if piv is None:
            break
        swap_rows(piv[0], t)
        swap_cols(piv[1], t)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]

        dirty = False
        for i in range(t + 1, m):
            if S[i][t]:
                add_row(i, t, -(S[i][t] // S[t][t]))
                if S[i][t]:
                    dirty = True
        for j in range(t + 1, n):
            if S[t][j]:
                add_col(j, t, -(S[t][j] // S[t][t]))
                if S[t][j]:
                    dirty = True
        if dirty:
            continue  # a smaller pivot surfaced; redo this corner

        p = S[t][t]
        clean = True
        for i in range(t + 1, m):
            row = S[i]
            if any(row[j] % p for j in range(t + 1, n)):
                add_row(t, i, 1)
                clean = False
                break
        if clean:
            t += 1

    if m and n:
        assert mat_mul(mat_mul(U, [list(r) for r in M]), V) == S
    return U, S, V


def bareiss_det(M) -> int:
    """Exact determinant by fraction-free elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def unimodular_inverse(A) -> list[list[int]]:
    """Exact inverse of a matrix with determinant +-1."""
    n = len(A)
    U, S, V = smith_normal_form(A)
    if any(abs(S[i][i]) != 1 for i in range(n)):
        raise ValueError("matrix is not unimodular")
    D = [[S[i][i] if i == j else 0 for j in range(n)] for i in range(n)]
    inv = mat_mul(mat_mul(V, D), U)
    assert mat_mul(A, inv) == identity_matrix(n)
    return inv


def hnf_rows(rows, width: int) -> tuple[tuple[int, ...], ...]:
    """Canonical Hermite basis of the lattice spanned by the given row
    vectors: echelon rows with positive pivots and entries above each pivot
    reduced into [0, pivot).  Equal lattices give equal output."""
    basis: list[list[int]] = []
    pivots: list[int] = []

    for vec in rows:
        v = list(vec)
        i = 0
        for j in range(width):
            if not v[j]:
                continue
            while i < len(basis) and pivots[i] < j:
                i += 1
            if i < len(basis) and pivots[i] == j:
                a, b = basis[i][j], v[j]
                if b % a == 0:
                    q = b // a
                    v = [v[k] - q * basis[i][k] for k in range(width)]
                else:
                    g, x, y = _xgcd(a, b)
                    new_row = [x * basis[i][k] + y * v[k] for k in range(width)]
                    v = [(a // g) * v[k] - (b // g) * basis[i][k] for k in range(width)]
                    if new_row[j] < 0:
                        new_row = [-e for e in new_row]
                    basis[i] = new_row
                assert v[j] == 0
            else:
                if v[j] < 0:
                    v = [-e for e in v]
                basis.insert(i, v)
                pivots.insert(i, j)
                v = None
                break
        # v is either absorbed to zero or inserted

    for i in range(len(basis)):
        p = pivots[i]
        piv = basis[i][p]
        for i2 in range(i):
            q = basis[i2][p] // piv
            if q:
                basis[i2] = [basis[i2][k] - q * basis[i][k] for k in range(width)]
    return tuple(tuple(r) for r in basis)


def lattices_equal(rows_a, rows_b, width: int) -> bool:
    return hnf_rows(rows_a, width) == hnf_rows(rows_b, width)


def kernel_basis(M) -> list[list[int]]:
    """Basis vectors of the right kernel {x : M x = 0} over Z."""
    m = len(M)
    n = len(M[0]) if m else 0
    if n == 0:
        return []
    if m == 0:
        return [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    U, S, V = smith_normal_form(M)
    rank = sum(1 for i in range(min(m, n)) if S[i][i])
    return [[V[r][j] for r in range(n)] for j in range(rank, n)]


def solve_integer(M, b) -> list[int] | None:
    """One integer solution of M x = b, or None if none exists."""
    m = len(M)
    n = len(M[0]) if m else 0
    if m == 0:
        return [0] * n
    U, S, V = smith_normal_form(M)
    c = mat_vec(U, b)
    x = [0] * n
    for i in range(m):
        d = S[i][i] if i < min(m, n) else 0
        if d:
            if c[i] % d:
                return None
            x[i] = c[i] // d
        elif c[i]:
            return None
    return mat_vec(V, x)
