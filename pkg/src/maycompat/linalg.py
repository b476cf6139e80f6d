"""Exact scalar rings and dense matrices over them.

Three scalar domains are supported: the integers, the rationals, and prime
fields.  Matrices are immutable, row-major, and act on column vectors, so a
matrix with ``rows`` rows and ``cols`` columns is a map from rank ``cols``
to rank ``rows``.

Every solver in the package is reduced to :func:`diagonalize`, which returns
invertible ``U``, ``V`` with ``U @ M @ V`` diagonal.  Over the integers this
is the Smith normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class RingError(ValueError):
    """Raised for scalars or operations that do not belong to a ring."""


class DimensionError(ValueError):
    """Raised when matrix shapes do not fit together."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    q = 3
    while q * q <= p:
        if p % q == 0:
            return False
        q += 2
    return True


@dataclass(frozen=True)
class Ring:
    """A commutative scalar ring: ``Z``, ``Q`` or ``Fp`` with ``p`` prime."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Fp"):
            raise RingError(f"unknown ring kind {self.kind!r}")
        if self.kind == "Fp":
            if self.p is None or not _is_prime(self.p):
                raise RingError(f"Fp needs a prime modulus, got {self.p!r}")
            if self.p >= 2**63:
                raise RingError("prime modulus must fit in a machine word")
        elif self.p is not None:
            raise RingError(f"ring {self.kind} takes no modulus")

    @classmethod
    def parse(cls, text: str) -> "Ring":
        """Parse ``Z``, ``Q``, ``Fp:7`` (also ``F7``)."""
        t = text.strip()
        if t in ("Z", "ZZ"):
            return INTEGERS
        if t in ("Q", "QQ"):
            return RATIONALS
        if t.startswith("Fp:"):
            return cls("Fp", int(t[3:]))
        if t.startswith("F") and t[1:].isdigit():
            return cls("Fp", int(t[1:]))
        raise RingError(f"cannot parse ring {text!r}")

    def __str__(self):
        return f"Fp:{self.p}" if self.kind == "Fp" else self.kind

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "Fp" else 0

    def __call__(self, x):
        """Coerce ``x`` into the ring."""
        if self.kind == "Z":
            if isinstance(x, bool):
                return int(x)
            if isinstance(x, int):
                return x
            if isinstance(x, Fraction) and x.denominator == 1:
                return x.numerator
            if isinstance(x, str):
                return self(Fraction(x))
            raise RingError(f"{x!r} is not an integer")
        if self.kind == "Q":
            if isinstance(x, (int, Fraction, str)):
                return Fraction(x)
            raise RingError(f"{x!r} is not rational")
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise RingError(f"{x} has no image in F_{self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        if isinstance(x, str):
            return self(Fraction(x))
        if isinstance(x, int):
            return x % self.p
        raise RingError(f"{x!r} cannot be read in F_{self.p}")

    def reduce(self, x):
        # fast path used by matrix kernels; x is already a Python int/Fraction
        if self.kind == "Fp":
            return x % self.p
        return x

    def is_unit(self, x) -> bool:
        if self.kind == "Z":
            return x in (1, -1)
        return x != 0

    def inverse(self, x):
        if not self.is_unit(x):
            raise RingError(f"{x} is not a unit in {self}")
        if self.kind == "Z":
            return x
        if self.kind == "Q":
            return 1 / Fraction(x)
        return pow(x, -1, self.p)

    def divides(self, a, b) -> bool:
        """Whether ``a`` divides ``b``."""
        if a == 0:
            return b == 0
        if self.kind == "Z":
            return b % a == 0
        return True

    def exact_div(self, b, a):
        """``b / a`` assuming ``a`` divides ``b``."""
        if self.kind == "Z":
            return b // a
        return self.mul(b, self.inverse(a))

    def mul(self, a, b):
        return self.reduce(a * b)

    def normal_unit(self, x):
        """Unit ``u`` such that ``u * x`` is the preferred associate of ``x``."""
        if self.kind == "Z":
            return -1 if x < 0 else 1
        return self.inverse(x) if x != 0 else self.one

    @property
    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    @property
    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def entry_to_json(self, x):
        if self.kind == "Fp":
            return int(x)
        return str(x)

    def entry_from_json(self, x):
        if self.kind == "Fp":
            if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < self.p:
                raise RingError(f"F_{self.p} entries must be integers in [0, p): {x!r}")
            return x
        if not isinstance(x, str):
            raise RingError(f"entries over {self} are decimal strings: {x!r}")
        return self(x)

    def to_json(self):
        return {"Fp": self.p} if self.kind == "Fp" else self.kind

    @classmethod
    def from_json(cls, obj) -> "Ring":
        if obj == "Z":
            return INTEGERS
        if obj == "Q":
            return RATIONALS
        if isinstance(obj, dict) and set(obj) == {"Fp"}:
            return cls("Fp", obj["Fp"])
        raise RingError(f"bad ring description {obj!r}")


INTEGERS = Ring("Z")
RATIONALS = Ring("Q")


def prime_field(p: int) -> Ring:
    return Ring("Fp", p)


class Matrix:
    """Dense immutable matrix over a :class:`Ring`."""

    __slots__ = ("ring", "rows", "cols", "data", "_hash")

    def __init__(self, ring: Ring, rows: int, cols: int, data: Iterable[Sequence], *, _trusted=False):
        self.ring = ring
        self.rows = rows
        self.cols = cols
        if _trusted:
            self.data = data
        else:
            data = tuple(tuple(ring(x) for x in row) for row in data)
            if len(data) != rows or any(len(r) != cols for r in data):
                raise DimensionError(f"entries do not form a {rows}x{cols} matrix")
            self.data = data
        self._hash = None

    # construction -----------------------------------------------------------------

    @classmethod
    def from_rows(cls, ring: Ring, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = list(rows)
        if cols is None:
            if not rows:
                raise DimensionError("column count is ambiguous for an empty row list")
            cols = len(rows[0])
        return cls(ring, len(rows), cols, rows)

    @classmethod
    def _raw(cls, ring, rows, cols, data):
        return cls(ring, rows, cols, data, _trusted=True)

    @classmethod
    def zeros(cls, ring: Ring, rows: int, cols: int) -> "Matrix":
        z = ring.zero
        return cls._raw(ring, rows, cols, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Matrix":
        return cls.scalar(ring, n, ring.one)

    @classmethod
    def scalar(cls, ring: Ring, n: int, c) -> "Matrix":
        c = ring(c)
        z = ring.zero
        return cls._raw(ring, n, n, tuple(tuple(c if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def diagonal(cls, ring: Ring, entries: Sequence) -> "Matrix":
        n = len(entries)
        z = ring.zero
        ent = [ring(e) for e in entries]
        return cls._raw(ring, n, n, tuple(tuple(ent[i] if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def block(cls, ring: Ring, blocks: Sequence[Sequence["Matrix"]]) -> "Matrix":
        """Assemble a block matrix; every block must be a Matrix of fitting shape."""
        row_heights = [row[0].rows for row in blocks]
        col_widths = [m.cols for m in blocks[0]] if blocks else []
        out = []
        for bi, row in enumerate(blocks):
            if len(row) != len(col_widths):
                raise DimensionError("ragged block matrix")
            for m, w in zip(row, col_widths):
                if m.rows != row_heights[bi] or m.cols != w:
                    raise DimensionError("block shapes do not line up")
            for i in range(row_heights[bi]):
                line = []
                for m in row:
                    line.extend(m.data[i])
                out.append(tuple(line))
        return cls._raw(ring, sum(row_heights), sum(col_widths), tuple(out))

    @classmethod
    def hstack(cls, ring: Ring, mats: Sequence["Matrix"], rows: int) -> "Matrix":
        if not mats:
            return cls.zeros(ring, rows, 0)
        return cls.block(ring, [list(mats)])

    @classmethod
    def vstack(cls, ring: Ring, mats: Sequence["Matrix"], cols: int) -> "Matrix":
        if not mats:
            return cls.zeros(ring, 0, cols)
        return cls.block(ring, [[m] for m in mats])

    # basic protocol -----------------------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, idx):
        i, j = idx
        return self.data[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.ring == other.ring and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.rows, self.cols, self.data))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in row) for row in self.data)
        return f"Matrix<{self.ring} {self.rows}x{self.cols}>[{body}]"

    def to_lists(self):
        return [list(r) for r in self.data]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def is_square(self) -> bool:
        return self.rows == self.cols

    # arithmetic -----------------------------------------------------------------

    def _check_same(self, other):
        if self.ring != other.ring:
            raise RingError(f"ring mismatch {self.ring} vs {other.ring}")
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same(other)
        red = self.ring.reduce
        return Matrix._raw(self.ring, self.rows, self.cols, tuple(
            tuple(red(a + b) for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __sub__(self, other):
        self._check_same(other)
        red = self.ring.reduce
        return Matrix._raw(self.ring, self.rows, self.cols, tuple(
            tuple(red(a - b) for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __neg__(self):
        red = self.ring.reduce
        return Matrix._raw(self.ring, self.rows, self.cols,
                           tuple(tuple(red(-a) for a in r) for r in self.data))

    def scale(self, c) -> "Matrix":
        c = self.ring(c)
        if c == 1:
            return self
        red = self.ring.reduce
        return Matrix._raw(self.ring, self.rows, self.cols,
                           tuple(tuple(red(c * a) for a in r) for r in self.data))

    def __matmul__(self, other):
        if self.ring != other.ring:
            raise RingError(f"ring mismatch {self.ring} vs {other.ring}")
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        red = self.ring.reduce
        zero = self.ring.zero
        cols = list(zip(*other.data)) if other.rows else [()] * other.cols
        out = []
        for r in self.data:
            nz = [(k, a) for k, a in enumerate(r) if a]
            if not nz:
                out.append((zero,) * other.cols)
                continue
            out.append(tuple(red(sum((a * c[k] for k, a in nz), zero)) for c in cols))
        return Matrix._raw(self.ring, self.rows, other.cols, tuple(out))

    @property
    def T(self) -> "Matrix":
        if self.rows == 0:
            return Matrix.zeros(self.ring, self.cols, 0)
        return Matrix._raw(self.ring, self.cols, self.rows, tuple(zip(*self.data)))

    def kron(self, other: "Matrix") -> "Matrix":
        """Kronecker product; row index ``i*other.rows + k``."""
        red = self.ring.reduce
        out = []
        for r in self.data:
            for s in other.data:
                out.append(tuple(red(a * b) for a in r for b in s))
        return Matrix._raw(self.ring, self.rows * other.rows, self.cols * other.cols, tuple(out))

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        return Matrix._raw(self.ring, r1 - r0, c1 - c0,
                           tuple(tuple(row[c0:c1]) for row in self.data[r0:r1]))

    def column(self, j: int) -> "Matrix":
        return self.submatrix(0, self.rows, j, j + 1)

    def trace(self):
        if not self.is_square():
            raise DimensionError("trace of a non-square matrix")
        return self.ring.reduce(sum((self.data[i][i] for i in range(self.rows)), self.ring.zero))

    def change_ring(self, ring: Ring) -> "Matrix":
        return Matrix(ring, self.rows, self.cols, self.data)

    def to_json(self):
        conv = self.ring.entry_to_json
        return [[conv(x) for x in row] for row in self.data]

    @classmethod
    def from_json(cls, ring: Ring, obj, rows: int, cols: int) -> "Matrix":
        if not isinstance(obj, list) or any(not isinstance(r, list) for r in obj):
            raise DimensionError("a matrix is a JSON array of rows")
        if rows and len(obj) != rows:
            raise DimensionError(f"expected {rows} rows, found {len(obj)}")
        if rows == 0 and obj not in ([],) and any(len(r) for r in obj):
            raise DimensionError("expected an empty matrix")
        data = tuple(tuple(ring.entry_from_json(x) for x in r) for r in obj) if rows else ()
        if any(len(r) != cols for r in data):
            raise DimensionError(f"expected {cols} columns per row")
        return cls._raw(ring, rows, cols, data)


# ----------------------------------------------------------------------------
# normal forms


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class _Work:
    """Mutable scratch copy of a matrix with tracked left and right transforms."""

    def __init__(self, M: Matrix):
        self.ring = M.ring
        self.m, self.n = M.rows, M.cols
        self.A = [list(r) for r in M.data]
        one, zero = self.ring.one, self.ring.zero
        self.U = [[one if i == j else zero for j in range(self.m)] for i in range(self.m)]
        self.V = [[one if i == j else zero for j in range(self.n)] for i in range(self.n)]

    def swap_rows(self, i, j):
        if i != j:
            self.A[i], self.A[j] = self.A[j], self.A[i]
            self.U[i], self.U[j] = self.U[j], self.U[i]

    def swap_cols(self, i, j):
        if i != j:
            for row in self.A:
                row[i], row[j] = row[j], row[i]
            for row in self.V:
                row[i], row[j] = row[j], row[i]

    def row_combo(self, i, j, a, b, c, d):
        # (row_i, row_j) <- (a row_i + b row_j, c row_i + d row_j); ad - bc a unit
        red = self.ring.reduce
        for M in (self.A, self.U):
            ri, rj = M[i], M[j]
            M[i] = [red(a * x + b * y) for x, y in zip(ri, rj)]
            M[j] = [red(c * x + d * y) for x, y in zip(ri, rj)]

    def col_combo(self, i, j, a, b, c, d):
        # (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
        red = self.ring.reduce
        for M in (self.A, self.V):
            for row in M:
                x, y = row[i], row[j]
                row[i] = red(a * x + b * y)
                row[j] = red(c * x + d * y)

    def scale_row(self, i, u):
        red = self.ring.reduce
        self.A[i] = [red(u * x) for x in self.A[i]]
        self.U[i] = [red(u * x) for x in self.U[i]]

    def result(self):
        r = self.ring
        return (Matrix._raw(r, self.m, self.m, tuple(map(tuple, self.U))),
                Matrix._raw(r, self.m, self.n, tuple(map(tuple, self.A))),
                Matrix._raw(r, self.n, self.n, tuple(map(tuple, self.V))))


def _snf_integer(M: Matrix):
    w = _Work(M)
    A = w.A
    m, n = w.m, w.n
    t = 0
    while t < min(m, n):
        # smallest nonzero |entry| in the trailing block as pivot
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        w.swap_rows(t, i)
        w.swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                b = A[i][t]
                if b:
                    a = A[t][t]
                    if b % a == 0:
                        w.row_combo(t, i, 1, 0, -(b // a), 1)
                    else:
                        g, x, y = _xgcd(a, b)
                        w.row_combo(t, i, x, y, -(b // g), a // g)
                        done = False
            for j in range(t + 1, n):
                b = A[t][j]
                if b:
                    a = A[t][t]
                    if b % a == 0:
                        w.col_combo(t, j, 1, 0, -(b // a), 1)
                    else:
                        g, x, y = _xgcd(a, b)
                        w.col_combo(t, j, x, y, -(b // g), a // g)
                        done = False
            if not done:
                continue
            a = A[t][t]
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % a:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            # fold the offending row in; the next sweep lowers the pivot
            w.row_combo(t, bad, 1, 1, 0, 1)
        if A[t][t] < 0:
            w.scale_row(t, -1)
        t += 1
    return w.result()


def _diag_field(M: Matrix):
    w = _Work(M)
    A = w.A
    ring = w.ring
    m, n = w.m, w.n
    t = 0
    while t < min(m, n):
        piv = None
        for j in range(t, n):
            for i in range(t, m):
                if A[i][j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        i, j = piv
        w.swap_rows(t, i)
        w.swap_cols(t, j)
        w.scale_row(t, ring.inverse(A[t][t]))
        for i in range(m):
            if i != t and A[i][t] != 0:
                c = A[i][t]
                w.row_combo(t, i, 1, 0, ring.reduce(-c), 1)
        for j in range(t + 1, n):
            if A[t][j] != 0:
                c = A[t][j]
                w.col_combo(t, j, 1, 0, ring.reduce(-c), 1)
        t += 1
    return w.result()


def diagonalize(M: Matrix):
    """Return ``(U, D, V)`` with ``U @ M @ V == D`` diagonal, ``U`` and ``V`` invertible.

    Over ``Z`` this is the Smith normal form: ``D`` has nonnegative diagonal
    ``d1 | d2 | ...``.  Over a field the nonzero diagonal entries are all 1.
    """
    if M.ring.kind == "Z":
        return _snf_integer(M)
    return _diag_field(M)


def smith_normal_form(M: Matrix):
    """Smith normal form ``U @ M @ V == D`` of an integer matrix."""
    if M.ring.kind != "Z":
        raise RingError("smith_normal_form is defined over Z; use diagonalize over fields")
    return _snf_integer(M)


def invariant_factors(M: Matrix) -> list:
    _, D, _ = diagonalize(M)
    return [D[i, i] for i in range(min(D.rows, D.cols)) if D[i, i] != 0]


def rank(M: Matrix) -> int:
    return len(invariant_factors(M))


def solve_linear(A: Matrix, b: Matrix) -> Matrix | None:
    """Solve ``A @ x == b`` for a column (or multi-column) ``b``; ``None`` if unsolvable."""
    if A.ring != b.ring:
        raise RingError("ring mismatch")
    if A.rows != b.rows:
        raise DimensionError(f"system has {A.rows} equations but right side has {b.rows} rows")
    ring = A.ring
    U, D, V = diagonalize(A)
    c = U @ b
    r = min(D.rows, D.cols)
    y = []
    for i in range(A.cols):
        di = D[i, i] if i < r else ring.zero
        row = []
        for k in range(b.cols):
            ck = c[i, k] if i < c.rows else ring.zero
            if di == 0:
                row.append(ring.zero)
            else:
                if not ring.divides(di, ck):
                    return None
                row.append(ring.exact_div(ck, di))
        y.append(row)
    for i in range(A.cols, A.rows):
        if any(c[i, k] != 0 for k in range(b.cols)):
            return None
    for i in range(min(A.cols, A.rows)):
        if (i >= r or D[i, i] == 0) and any(c[i, k] != 0 for k in range(b.cols)):
            return None
    Y = Matrix._raw(ring, A.cols, b.cols, tuple(tuple(r_) for r_ in y))
    return V @ Y


def nullspace(A: Matrix) -> Matrix:
    """Columns spanning ``{x : A x = 0}``; over ``Z`` they form a basis of the kernel lattice."""
    U, D, V = diagonalize(A)
    r = sum(1 for i in range(min(D.rows, D.cols)) if D[i, i] != 0)
    return V.submatrix(0, V.rows, r, V.cols)


def try_invert(M: Matrix) -> Matrix | None:
    """Two-sided inverse of a square matrix over its ring, or ``None``."""
    if not M.is_square():
        raise DimensionError("only square matrices can be inverted")
    if M.rows == 0:
        return M
    U, D, V = diagonalize(M)
    ring = M.ring
    diag = []
    for i in range(M.rows):
        if not ring.is_unit(D[i, i]):
            return None
        diag.append(ring.inverse(D[i, i]))
    return V @ Matrix.diagonal(ring, diag) @ U


def determinant(M: Matrix):
    """Determinant by fraction-free elimination (Bareiss)."""
    if not M.is_square():
        raise DimensionError("determinant of a non-square matrix")
    ring = M.ring
    n = M.rows
    if n == 0:
        return ring.one
    if ring.kind == "Fp":
        A = [list(r) for r in M.data]
        det = 1
        p = ring.p
        for t in range(n):
            piv = next((i for i in range(t, n) if A[i][t]), None)
            if piv is None:
                return 0
            if piv != t:
                A[t], A[piv] = A[piv], A[t]
                det = -det
            det = det * A[t][t] % p
            inv = pow(A[t][t], -1, p)
            for i in range(t + 1, n):
                c = A[i][t] * inv % p
                if c:
                    A[i] = [(x - c * y) % p for x, y in zip(A[i], A[t])]
        return det % p
    A = [list(r) for r in M.data]
    sign = 1
    prev = ring.one
    for t in range(n - 1):
        if A[t][t] == 0:
            piv = next((i for i in range(t + 1, n) if A[i][t] != 0), None)
            if piv is None:
                return ring.zero
            A[t], A[piv] = A[piv], A[t]
            sign = -sign
        for i in range(t + 1, n):
            for j in range(t + 1, n):
                num = A[i][j] * A[t][t] - A[i][t] * A[t][j]
                A[i][j] = num // prev if ring.kind == "Z" else num / prev
        prev = A[t][t]
    return ring(sign * A[n - 1][n - 1])
