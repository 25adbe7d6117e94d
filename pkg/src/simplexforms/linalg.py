"""Exact dense linear algebra over the rational field or Q(sqrt(m)).

Everything here is plain Gauss-Jordan with exact division; no pivoting
heuristics are needed because there is no rounding.  Matrices are small
(barycentric solves, Vandermonde and Gram matrices); the large rank and
kernel computations on polynomial coefficient vectors go through the
sparse incremental RowBasis instead.
"""

from __future__ import annotations

from .scalars import ONE, ZERO, Q, scalar_is_zero


class Matrix:
    """Immutable rectangular matrix of exact scalars."""

    __slots__ = ("entries", "rows", "cols")

    def __init__(self, entries):
        entries = tuple(tuple(row) for row in entries)
        if entries and any(len(row) != len(entries[0]) for row in entries):
            raise ValueError("ragged rows")
        self.entries = entries
        self.rows = len(entries)
        self.cols = len(entries[0]) if entries else 0

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Matrix":
        return cls([[ZERO] * cols for _ in range(rows)])

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"Matrix({[list(r) for r in self.entries]})"

    def row(self, i):
        return self.entries[i]

    def column(self, j):
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> "Matrix":
        return Matrix(zip(*self.entries)) if self.rows else Matrix([])

    def matmul(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        cols = other.transpose().entries
        return Matrix([[_dot(r, c) for c in cols] for r in self.entries])

    def matvec(self, vec):
        vec = tuple(vec)
        if self.cols != len(vec):
            raise ValueError("dimension mismatch")
        return [_dot(r, vec) for r in self.entries]

    def rref(self):
        """Reduced row echelon form: (matrix, pivot column tuple, rank)."""
        m = [list(r) for r in self.entries]
        pivots = []
        prow = 0
        for col in range(self.cols):
            if prow >= self.rows:
                break
            src = next((r for r in range(prow, self.rows) if not scalar_is_zero(m[r][col])), None)
            if src is None:
                continue
            m[prow], m[src] = m[src], m[prow]
            inv = ONE / m[prow][col]
            m[prow] = [x * inv for x in m[prow]]
            for r in range(self.rows):
                if r != prow and not scalar_is_zero(m[r][col]):
                    f = m[r][col]
                    m[r] = [x - f * y for x, y in zip(m[r], m[prow])]
            pivots.append(col)
            prow += 1
        return Matrix(m), tuple(pivots), len(pivots)

    def rank(self) -> int:
        return self.rref()[2]

    def solve(self, rhs):
        """A particular exact solution of self @ x = rhs, or None if inconsistent.

        Free variables are set to zero, so the output is deterministic.
        """
        rhs = list(rhs)
        if len(rhs) != self.rows:
            raise ValueError("dimension mismatch")
        aug = Matrix([list(row) + [rhs[i]] for i, row in enumerate(self.entries)])
        red, pivots, _ = aug.rref()
        if self.cols in pivots:
            return None
        sol = [ZERO] * self.cols
        for i, col in enumerate(pivots):
            sol[col] = red.entries[i][self.cols]
        return sol

    def kernel_basis(self):
        """Exact basis of the nullspace; empty iff the matrix is injective."""
        red, pivots, rank = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for fc in free:
            v = [ZERO] * self.cols
            v[fc] = ONE
            for i, pc in enumerate(pivots):
                v[pc] = -red.entries[i][fc]
            basis.append(v)
        return basis

    def det(self):
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        m = [list(r) for r in self.entries]
        n = self.rows
        out = ONE
        for col in range(n):
            src = next((r for r in range(col, n) if not scalar_is_zero(m[r][col])), None)
            if src is None:
                return ZERO
            if src != col:
                m[col], m[src] = m[src], m[col]
                out = -out
            out = out * m[col][col]
            inv = ONE / m[col][col]
            for r in range(col + 1, n):
                if not scalar_is_zero(m[r][col]):
                    f = m[r][col] * inv
                    m[r] = [x - f * y for x, y in zip(m[r], m[col])]
        return out

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        aug = Matrix([list(row) + list(Matrix.identity(self.rows).entries[i])
                      for i, row in enumerate(self.entries)])
        red, pivots, rank = aug.rref()
        if rank < self.rows or any(p >= self.rows for p in pivots[: self.rows]):
            raise ValueError("singular matrix")
        return Matrix([row[self.rows:] for row in red.entries])

    def leading_principal_minors(self):
        return [Matrix([row[: k + 1] for row in self.entries[: k + 1]]).det()
                for k in range(min(self.rows, self.cols))]


def _dot(a, b):
    total = ZERO
    for x, y in zip(a, b):
        if not (scalar_is_zero(x) or scalar_is_zero(y)):
            total = total + x * y
    return total


def from_int_rows(rows) -> Matrix:
    return Matrix([[Q(x) for x in row] for row in rows])


class RowBasis:
    """Incremental exact row reduction over sparse dict-keyed vectors.

    Rows are dicts column->scalar.  Feeding a row either extends the basis
    (independent) or returns the exact linear combination of previously fed
    rows that reproduces it.  Feeding every generator of a span therefore
    yields its rank, membership certificates, and (via the combinations of
    dependent rows) a kernel basis of the stacked coefficient matrix, all
    in one pass and without densifying.
    """

    def __init__(self):
        self._pivot_rows = {}   # pivot column -> (row dict, combo dict)
        self._pivot_order = []  # insertion order of pivot columns
        self.fed = 0

    @property
    def rank(self) -> int:
        return len(self._pivot_rows)

    def _eliminate(self, vec: dict, combo: dict):
        for col in self._pivot_order:
            coeff = vec.get(col)
            if coeff is None or scalar_is_zero(coeff):
                continue
            prow, pcombo = self._pivot_rows[col]
            for c, v in prow.items():
                nv = vec.get(c, ZERO) - coeff * v
                if scalar_is_zero(nv):
                    vec.pop(c, None)
                else:
                    vec[c] = nv
            for c, v in pcombo.items():
                nv = combo.get(c, ZERO) - coeff * v
                if scalar_is_zero(nv):
                    combo.pop(c, None)
                else:
                    combo[c] = nv
        return vec, combo

    def feed(self, vec: dict):
        """Add one row.  Returns (independent, combo).

        For a dependent row, combo maps indices of previously fed rows to
        the exact coefficients with row = sum(combo[i] * fed[i]).
        """
        idx = self.fed
        self.fed += 1
        vec = {c: v for c, v in vec.items() if not scalar_is_zero(v)}
        vec, combo = self._eliminate(vec, {})
        if not vec:
            return False, {c: -v for c, v in combo.items()}
        pcol = min(vec)
        inv = ONE / vec[pcol]
        vec = {c: v * inv for c, v in vec.items()}
        combo = {c: v * inv for c, v in combo.items()}
        combo[idx] = inv
        self._pivot_rows[pcol] = (vec, combo)
        self._pivot_order.append(pcol)
        return True, None

    def residual(self, vec: dict) -> dict:
        """The part of vec outside the current row space."""
        vec = {c: v for c, v in vec.items() if not scalar_is_zero(v)}
        vec, _ = self._eliminate(vec, {})
        return vec

    def coordinates(self, vec: dict):
        """Coefficients over the fed rows reproducing vec, or None."""
        vec = {c: v for c, v in vec.items() if not scalar_is_zero(v)}
        vec, combo = self._eliminate(vec, {})
        if vec:
            return None
        return {c: -v for c, v in combo.items()}
