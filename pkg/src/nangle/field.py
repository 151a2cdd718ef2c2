"""Exact dense linear algebra over a prime field F_p.

Matrices are stored as row-major numpy int64 arrays with every entry
reduced into [0, p).  All operations are exact; there is no floating
point anywhere in the pipeline.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

import numpy as np


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class PrimeField:
    """The field F_p for a prime modulus p < 2**31."""

    def __init__(self, p: int):
        if not isinstance(p, int) or not _is_prime(p):
            raise ValueError(f"modulus must be prime, got {p!r}")
        if p >= 2**31:
            raise ValueError(f"modulus too large: {p}")
        self.p = p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"F({self.p})"

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def units(self) -> List[int]:
        return list(range(1, self.p))

    # -- matrix constructors ------------------------------------------------

    def matrix(self, rows: Sequence[Sequence[int]]) -> "Matrix":
        a = np.array(rows, dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
        if a.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        return Matrix(self, a % self.p)

    def zeros(self, rows: int, cols: int) -> "Matrix":
        return Matrix(self, np.zeros((rows, cols), dtype=np.int64))

    def identity(self, n: int) -> "Matrix":
        return Matrix(self, np.eye(n, dtype=np.int64))

    def random_matrix(self, rows: int, cols: int, rng) -> "Matrix":
        data = [[rng.randrange(self.p) for _ in range(cols)] for _ in range(rows)]
        return Matrix(self, np.array(data, dtype=np.int64).reshape(rows, cols))


class Matrix:
    """Immutable dense matrix over a PrimeField."""

    __slots__ = ("field", "a")

    def __init__(self, field: PrimeField, a: np.ndarray):
        self.field = field
        a = np.asarray(a, dtype=np.int64)
        if a.ndim != 2:
            raise ValueError("matrix array must be two-dimensional")
        self.a = a

    # -- basic shape/access --------------------------------------------------

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and other.field == self.field
            and other.a.shape == self.a.shape
            and bool(np.array_equal(other.a, self.a))
        )

    def __hash__(self):
        return hash((self.field.p, self.a.shape, self.a.tobytes()))

    def __repr__(self):
        return f"Matrix(F{self.field.p}, {self.a.tolist()})"

    def tolist(self) -> List[List[int]]:
        return self.a.tolist()

    def key(self) -> tuple:
        return (self.a.shape, self.a.tobytes())

    def is_zero(self) -> bool:
        return not self.a.any()

    def is_identity(self) -> bool:
        return self.rows == self.cols and bool(np.array_equal(self.a, np.eye(self.rows, dtype=np.int64)))

    def copy(self) -> "Matrix":
        return Matrix(self.field, self.a.copy())

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "Matrix"):
        if self.field != other.field:
            raise ValueError("field mismatch")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.a.shape != other.a.shape:
            raise ValueError(f"shape mismatch {self.a.shape} vs {other.a.shape}")
        return Matrix(self.field, (self.a + other.a) % self.field.p)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.a.shape != other.a.shape:
            raise ValueError(f"shape mismatch {self.a.shape} vs {other.a.shape}")
        return Matrix(self.field, (self.a - other.a) % self.field.p)

    def __neg__(self) -> "Matrix":
        return Matrix(self.field, (-self.a) % self.field.p)

    def scale(self, c: int) -> "Matrix":
        return Matrix(self.field, (self.a * (c % self.field.p)) % self.field.p)

    def mul(self, other: "Matrix") -> "Matrix":
        """Matrix product self @ other (exact)."""
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.a.shape} by {other.a.shape}")
        p = self.field.p
        inner = self.cols
        # int64 product is safe when the worst-case accumulation fits.
        if inner == 0:
            return Matrix(self.field, np.zeros((self.rows, other.cols), dtype=np.int64))
        if (p - 1) * (p - 1) * inner < 2**62:
            return Matrix(self.field, (self.a @ other.a) % p)
        acc = np.zeros((self.rows, other.cols), dtype=np.int64)
        step = max(1, int(2**62 // ((p - 1) * (p - 1))))
        for k in range(0, inner, step):
            acc = (acc + self.a[:, k : k + step] @ other.a[k : k + step, :]) % p
        return Matrix(self.field, acc)

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.a.T.copy())

    # -- block assembly -------------------------------------------------------

    def hstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(self.field, np.hstack([self.a, other.a]))

    def vstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(self.field, np.vstack([self.a, other.a]))

    def column(self, j: int) -> "Matrix":
        return Matrix(self.field, self.a[:, j : j + 1].copy())

    def take_columns(self, idx: Sequence[int]) -> "Matrix":
        return Matrix(self.field, self.a[:, list(idx)].copy())


def block_matrix(field: PrimeField, blocks: Sequence[Sequence[Optional[Matrix]]],
                 row_dims: Sequence[int], col_dims: Sequence[int]) -> Matrix:
    """Assemble a block matrix; None blocks are zero."""
    total_r = sum(row_dims)
    total_c = sum(col_dims)
    out = np.zeros((total_r, total_c), dtype=np.int64)
    r0 = 0
    for i, rd in enumerate(row_dims):
        c0 = 0
        for j, cd in enumerate(col_dims):
            b = blocks[i][j]
            if b is not None:
                if b.a.shape != (rd, cd):
                    raise ValueError(f"block ({i},{j}) has shape {b.a.shape}, expected {(rd, cd)}")
                out[r0 : r0 + rd, c0 : c0 + cd] = b.a
            c0 += cd
        r0 += rd
    return Matrix(field, out)


def rref(m: Matrix) -> Tuple[Matrix, int, List[int]]:
    """Reduced row echelon form; returns (rref, rank, pivot columns)."""
    p = m.field.p
    a = m.a % p
    work = a.copy()
    rows, cols = work.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        col = work[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            work[[r, i]] = work[[i, r]]
        inv = pow(int(work[r, c]), p - 2, p)
        if inv != 1:
            work[r] = (work[r] * inv) % p
        col_full = work[:, c].copy()
        col_full[r] = 0
        nzr = np.nonzero(col_full)[0]
        if nzr.size:
            work[nzr] = (work[nzr] - np.outer(col_full[nzr], work[r])) % p
        pivots.append(c)
        r += 1
    return Matrix(m.field, work), len(pivots), pivots


def rank(m: Matrix) -> int:
    return rref(m)[1]


def kernel_basis(m: Matrix) -> Matrix:
    """Basis of {x : m x = 0}, as matrix columns."""
    r, rk, pivots = rref(m)
    cols = m.cols
    free = [c for c in range(cols) if c not in set(pivots)]
    p = m.field.p
    out = np.zeros((cols, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        out[f, k] = 1
        for row, pc in enumerate(pivots):
            out[pc, k] = (-int(r.a[row, f])) % p
    return Matrix(m.field, out)


def solve(a: Matrix, b: Matrix) -> Optional[Tuple[Matrix, Matrix]]:
    """Solve a x = b exactly.

    Returns (particular solution, kernel basis of a) or None when the
    system has no solution.  b may have several columns; the particular
    solution then solves all of them simultaneously.
    """
    if a.field != b.field:
        raise ValueError("field mismatch")
    if a.rows != b.rows:
        raise ValueError(f"dimension mismatch: a has {a.rows} rows, b has {b.rows}")
    aug = a.hstack(b)
    r, rk, pivots = rref(aug)
    if any(c >= a.cols for c in pivots):
        return None
    p = a.field.p
    x = np.zeros((a.cols, b.cols), dtype=np.int64)
    for row, pc in enumerate(pivots):
        x[pc, :] = r.a[row, a.cols :]
    return Matrix(a.field, x % p), kernel_basis(a)


def invert(m: Matrix) -> Optional[Matrix]:
    """Inverse of a square matrix, or None when singular."""
    if m.rows != m.cols:
        raise ValueError(f"cannot invert non-square matrix of shape {m.a.shape}")
    n = m.rows
    aug = m.hstack(m.field.identity(n))
    r, rk, pivots = rref(aug)
    if rk < n or any(c >= n for c in pivots[:n]):
        return None
    return Matrix(m.field, r.a[:, n:].copy())


def column_space_basis(m: Matrix) -> Matrix:
    """Columns of m forming a basis of the column space (pivot columns)."""
    _, _, pivots = rref(m)
    return m.take_columns(pivots)


def in_column_space(m: Matrix, v: Matrix) -> bool:
    return solve(m, v) is not None


def intersect_column_spaces(a: Matrix, b: Matrix) -> Matrix:
    """Basis (columns) of im(a) ∩ im(b)."""
    if a.field != b.field or a.rows != b.rows:
        raise ValueError("incompatible matrices")
    k = kernel_basis(a.hstack(b))
    top = k.a[: a.cols, :]
    inter = (a.a @ top) % a.field.p
    return column_space_basis(Matrix(a.field, inter))


def coordinates_in_basis(basis: Matrix, vecs: Matrix) -> Matrix:
    """Coordinates of the columns of vecs in the given column basis.

    Raises ValueError when some column is not in the span.
    """
    sol = solve(basis, vecs)
    if sol is None:
        raise ValueError("vector not in span of basis")
    return sol[0]
