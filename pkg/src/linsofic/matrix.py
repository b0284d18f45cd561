"""Dense exact matrices and permutations.

Entries are stored as field payloads in row-major tuples.  Heavy kernels
dispatch on the field: numpy over F_p (p < 2^31) from moderate sizes on,
certified multi-modular routines over Q, and plain Gaussian elimination with
first-nonzero pivoting everywhere else.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _modp, _qq
from . import polyarith as pa
from .errors import FieldError, PreconditionError, ShapeError, SingularMatrixError
from .fields import (
    GF,
    ExtensionField,
    Field,
    FieldElement,
    PrimeField,
    RationalField,
    RationalFunctionField,
    field_make,
)
from .poly import Polynomial

NUMPY_MIN_DIM = 16


def _backend(F: Field) -> str:
    if isinstance(F, PrimeField) and F.p < _modp.MAX_P:
        return "modp"
    if isinstance(F, RationalField):
        return "qq"
    return "generic"


# ---------------------------------------------------------------------------
# generic elimination on payload rows


def echelon(F: Field, rows, ncols: int):
    """Row echelon form with first-nonzero pivoting.

    Returns ``(E, pivot_cols, pivot_rows)`` where ``pivot_rows`` are the
    original indices of the rows that became pivots; the submatrix on
    ``pivot_rows x pivot_cols`` is nonsingular.
    """
    a = [list(r) for r in rows]
    m = len(a)
    order = list(range(m))
    is_zero, mul, sub, inv = F.is_zero, F.mul, F.sub, F.inv
    r = 0
    pivots = []
    for c in range(ncols):
        if r == m:
            break
        piv = None
        for i in range(r, m):
            if not is_zero(a[i][c]):
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
            order[r], order[piv] = order[piv], order[r]
        pr = a[r]
        pinv = inv(pr[c])
        for i in range(r + 1, m):
            row = a[i]
            f = row[c]
            if is_zero(f):
                continue
            f = mul(f, pinv)
            for j in range(c, ncols):
                x = pr[j]
                if not is_zero(x):
                    row[j] = sub(row[j], mul(f, x))
        pivots.append(c)
        r += 1
    return a, pivots, order[:r]


def _generic_det(F: Field, rows):
    a = [list(r) for r in rows]
    n = len(a)
    d = F.one
    for c in range(n):
        piv = None
        for i in range(c, n):
            if not F.is_zero(a[i][c]):
                piv = i
                break
        if piv is None:
            return F.zero
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = F.neg(d)
        pr = a[c]
        d = F.mul(d, pr[c])
        pinv = F.inv(pr[c])
        for i in range(c + 1, n):
            row = a[i]
            f = row[c]
            if F.is_zero(f):
                continue
            f = F.mul(f, pinv)
            for j in range(c, n):
                row[j] = F.sub(row[j], F.mul(f, pr[j]))
    return d


def _generic_inverse(F: Field, rows):
    n = len(rows)
    a = [list(r) + [F.one if i == j else F.zero for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        piv = None
        for i in range(c, n):
            if not F.is_zero(a[i][c]):
                piv = i
                break
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        pinv = F.inv(a[c][c])
        pr = a[c] = [F.mul(x, pinv) for x in a[c]]
        for i in range(n):
            if i == c:
                continue
            f = a[i][c]
            if F.is_zero(f):
                continue
            row = a[i]
            a[i] = [F.sub(x, F.mul(f, y)) if not F.is_zero(y) else x for x, y in zip(row, pr)]
    return [tuple(row[n:]) for row in a]


def _generic_matmul(F: Field, A, B, inner: int, ncols: int):
    add, mul, is_zero, zero = F.add, F.mul, F.is_zero, F.zero
    out = []
    for row in A:
        acc = [zero] * ncols
        for k in range(inner):
            x = row[k]
            if is_zero(x):
                continue
            brow = B[k]
            for j in range(ncols):
                y = brow[j]
                if not is_zero(y):
                    acc[j] = add(acc[j], mul(x, y))
        out.append(tuple(acc))
    return out


# ---------------------------------------------------------------------------


class Matrix:
    """Immutable dense matrix over an exact field."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: Field, rows: Iterable[Iterable]):
        conv = field.convert
        data = tuple(tuple(conv(x) for x in row) for row in rows)
        if not data or not data[0]:
            raise ShapeError("matrices must have at least one row and column")
        width = len(data[0])
        if any(len(r) != width for r in data):
            raise ShapeError("ragged rows")
        self.field = field
        self.nrows = len(data)
        self.ncols = width
        self.rows = data

    @classmethod
    def _raw(cls, field: Field, rows) -> "Matrix":
        m = object.__new__(cls)
        m.field = field
        m.rows = tuple(tuple(r) for r in rows)
        m.nrows = len(m.rows)
        m.ncols = len(m.rows[0])
        return m

    # constructors ----------------------------------------------------------
    @classmethod
    def identity(cls, F: Field, n: int) -> "Matrix":
        return cls.scalar(F, n, F.one)

    @classmethod
    def scalar(cls, F: Field, n: int, c) -> "Matrix":
        c = F.convert(c)
        z = F.zero
        return cls._raw(F, [[c if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, F: Field, nrows: int, ncols: int | None = None) -> "Matrix":
        ncols = nrows if ncols is None else ncols
        return cls._raw(F, [[F.zero] * ncols for _ in range(nrows)])

    @classmethod
    def diag(cls, F: Field, entries: Sequence) -> "Matrix":
        vals = [F.convert(x) for x in entries]
        n = len(vals)
        return cls._raw(F, [[vals[i] if i == j else F.zero for j in range(n)] for i in range(n)])

    @classmethod
    def jordan_block(cls, F: Field, alpha, size: int) -> "Matrix":
        a = F.convert(alpha)
        rows = []
        for i in range(size):
            row = [F.zero] * size
            row[i] = a
            if i + 1 < size:
                row[i + 1] = F.one
            rows.append(row)
        return cls._raw(F, rows)

    @classmethod
    def companion(cls, f: Polynomial) -> "Matrix":
        """Companion matrix with characteristic polynomial ``f`` (made monic)."""
        f = f.monic()
        F = f.field
        n = f.degree
        if n < 1:
            raise ShapeError("companion matrix needs degree >= 1")
        rows = [[F.zero] * n for _ in range(n)]
        for i in range(1, n):
            rows[i][i - 1] = F.one
        for i in range(n):
            rows[i][n - 1] = F.neg(f.coeffs[i])
        return cls._raw(F, rows)

    @classmethod
    def random(cls, F: Field, nrows: int, ncols: int, rng: random.Random) -> "Matrix":
        return cls._raw(F, [[F.random(rng) for _ in range(ncols)] for _ in range(nrows)])

    @classmethod
    def random_invertible(cls, F: Field, n: int, rng: random.Random) -> "Matrix":
        while True:
            A = cls.random(F, n, n, rng)
            if A.rank() == n:
                return A

    # access ----------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, ij) -> FieldElement:
        i, j = ij
        return FieldElement(self.field, self.rows[i][j])

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.field, self.rows))

    def __repr__(self):
        F = self.field
        body = "; ".join(" ".join(F.format(x) for x in row) for row in self.rows)
        return f"Matrix({F.name()}, {self.nrows}x{self.ncols}: [{body}])"

    def tolist(self) -> list[list[FieldElement]]:
        return [[FieldElement(self.field, x) for x in row] for row in self.rows]

    def map(self, field: Field, fn: Callable) -> "Matrix":
        return Matrix._raw(field, [[fn(x) for x in row] for row in self.rows])

    # arithmetic --------------------------------------------------------------
    def _check_same(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise TypeError(f"expected a Matrix, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldError(f"matrices over {self.field} and {other.field}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        add = self.field.add
        return Matrix._raw(
            self.field, [[add(x, y) for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot subtract {self.shape} and {other.shape}")
        sub = self.field.sub
        return Matrix._raw(
            self.field, [[sub(x, y) for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)]
        )

    def __neg__(self) -> "Matrix":
        neg = self.field.neg
        return Matrix._raw(self.field, [[neg(x) for x in r] for r in self.rows])

    def scale(self, c) -> "Matrix":
        F = self.field
        c = F.convert(c)
        return Matrix._raw(F, [[F.mul(c, x) for x in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, Matrix):
            return self @ other
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        if self.ncols != other.nrows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        F = self.field
        kind = _backend(F)
        if kind == "modp" and max(self.nrows, self.ncols, other.ncols) >= NUMPY_MIN_DIM:
            p = F.p
            out = _modp.matmul(_modp.as_array(self.rows, p), _modp.as_array(other.rows, p), p)
            return Matrix._raw(F, out.tolist())
        if kind == "qq" and max(self.nrows, self.ncols, other.ncols) >= _qq.SMALL:
            return Matrix._raw(F, _qq.matmul(self.rows, other.rows))
        return Matrix._raw(F, _generic_matmul(F, self.rows, other.rows, self.ncols, other.ncols))

    def __pow__(self, k: int) -> "Matrix":
        if not self.is_square:
            raise ShapeError("power of a non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        out = Matrix.identity(self.field, self.nrows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            k >>= 1
            if k:
                base = base @ base
        return out

    def transpose(self) -> "Matrix":
        return Matrix._raw(self.field, list(zip(*self.rows)))

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def inverse(self) -> "Matrix":
        if not self.is_square:
            raise ShapeError("only square matrices can be inverted")
        F = self.field
        kind = _backend(F)
        if kind == "modp" and self.nrows >= NUMPY_MIN_DIM:
            inv = _modp.inverse(_modp.as_array(self.rows, F.p), F.p)
            return Matrix._raw(F, inv.tolist())
        if kind == "qq":
            return Matrix._raw(F, _qq.inverse(self.rows))
        return Matrix._raw(F, _generic_inverse(F, self.rows))

    def inverse_transpose(self) -> "Matrix":
        return self.transpose().inverse()

    def det(self) -> FieldElement:
        if not self.is_square:
            raise ShapeError("determinant of a non-square matrix")
        F = self.field
        kind = _backend(F)
        if kind == "modp" and self.nrows >= NUMPY_MIN_DIM:
            return FieldElement(F, _modp.det(_modp.as_array(self.rows, F.p), F.p))
        if kind == "qq":
            return FieldElement(F, _qq.det(self.rows))
        return FieldElement(F, _generic_det(F, self.rows))

    def rank(self) -> int:
        F = self.field
        kind = _backend(F)
        if kind == "modp" and max(self.shape) >= NUMPY_MIN_DIM:
            return _modp.rank(_modp.as_array(self.rows, F.p), F.p)
        if kind == "qq":
            return _qq.rank(self.rows)
        return len(echelon(F, self.rows, self.ncols)[1])

    def kernel_dim(self) -> int:
        return self.ncols - self.rank()

    def is_invertible(self) -> bool:
        return self.is_square and self.rank() == self.nrows

    def is_identity(self) -> bool:
        F = self.field
        return self.is_square and all(
            (F.is_one(x) if i == j else F.is_zero(x))
            for i, row in enumerate(self.rows)
            for j, x in enumerate(row)
        )

    def scalar_minus(self, alpha) -> "Matrix":
        """``alpha * 1 - self``."""
        if not self.is_square:
            raise ShapeError("scalar_minus needs a square matrix")
        F = self.field
        a = F.convert(alpha)
        if _backend(F) == "modp" and self.nrows >= NUMPY_MIN_DIM:
            out = -_modp.as_array(self.rows, F.p)
            out[np.diag_indices(self.nrows)] += a
            return Matrix._raw(F, (out % F.p).tolist())
        rows = []
        for i, row in enumerate(self.rows):
            new = [F.neg(x) for x in row]
            new[i] = F.sub(a, row[i])
            rows.append(new)
        return Matrix._raw(F, rows)

    def kron(self, other: "Matrix") -> "Matrix":
        return kron(self, other)

    def direct_sum(self, other: "Matrix") -> "Matrix":
        return direct_sum(self, other)

    def conjugate(self, P: "Matrix") -> "Matrix":
        """``P self P^{-1}``."""
        return P @ self @ P.inverse()

    # serialization ---------------------------------------------------------
    def to_json(self) -> dict:
        F = self.field
        return {
            "field": F.descriptor(),
            "rows": self.nrows,
            "cols": self.ncols,
            "entries": [[F.encode(x) for x in row] for row in self.rows],
        }

    @classmethod
    def from_json(cls, obj: dict, field: Field | None = None) -> "Matrix":
        try:
            F = field if field is not None else field_make(obj["field"])
            rows = [[F.decode(x) for x in row] for row in obj["entries"]]
            nrows, ncols = obj["rows"], obj["cols"]
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed matrix object: {exc}") from exc
        if len(rows) != nrows or any(len(r) != ncols for r in rows):
            raise ShapeError("matrix entries do not match the declared shape")
        return cls._raw(F, rows)


# ---------------------------------------------------------------------------
# operations


def mat_arith(A: Matrix, B: Matrix, op: str) -> Matrix:
    if op == "mul":
        return A @ B
    if op == "add":
        return A + B
    if op == "sub":
        return A - B
    raise ValueError(f"unknown operation {op!r}")


def mat_inv(A: Matrix) -> Matrix:
    return A.inverse()


def mat_transpose(A: Matrix) -> Matrix:
    return A.transpose()


def mat_det(A: Matrix) -> FieldElement:
    return A.det()


def mat_rank(A: Matrix) -> tuple[int, int]:
    r = A.rank()
    return r, A.ncols - r


def kron(A: Matrix, B: Matrix) -> Matrix:
    """Kronecker product, ``(A (x) B)(v (x) w) = A v (x) B w``."""
    A._check_same(B)
    F = A.field
    mul, is_zero, zero = F.mul, F.is_zero, F.zero
    zrow = [zero] * B.ncols
    rows = []
    for arow in A.rows:
        for brow in B.rows:
            row = []
            for a in arow:
                if is_zero(a):
                    row.extend(zrow)
                else:
                    row.extend(mul(a, b) for b in brow)
            rows.append(row)
    return Matrix._raw(F, rows)


def direct_sum(A: Matrix, B: Matrix) -> Matrix:
    """Block diagonal ``[[A, 0], [0, B]]``."""
    A._check_same(B)
    F = A.field
    z = F.zero
    rows = [list(r) + [z] * B.ncols for r in A.rows]
    rows += [[z] * A.ncols + list(r) for r in B.rows]
    return Matrix._raw(F, rows)


def kron_power(A: Matrix, k: int) -> Matrix:
    out = A
    for _ in range(k - 1):
        out = kron(out, A)
    return out


@dataclass(frozen=True)
class Permutation:
    """Bijection of ``{0, ..., n-1}``; ``images[i] = pi(i)``.

    Composition ``(s * t)(i) = s(t(i))`` matches matrix products of
    permutation matrices.
    """

    images: tuple[int, ...]

    def __post_init__(self):
        imgs = tuple(int(x) for x in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise ValueError(f"{imgs} is not a permutation of range({len(imgs)})")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        img = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[a] = b
        return cls(tuple(img))

    @classmethod
    def random(cls, n: int, rng: random.Random) -> "Permutation":
        img = list(range(n))
        rng.shuffle(img)
        return cls(tuple(img))

    @classmethod
    def random_derangement(cls, n: int, rng: random.Random) -> "Permutation":
        if n < 2:
            raise ValueError("no derangement of fewer than 2 points")
        while True:
            p = cls.random(n, rng)
            if p.fixed_points() == 0:
                return p

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.n != other.n:
            raise ShapeError("permutations of different degree")
        s = self.images
        return Permutation(tuple(s[j] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def fixed_points(self) -> int:
        return sum(1 for i, j in enumerate(self.images) if i == j)

    def cycles(self) -> list[tuple[int, ...]]:
        seen = [False] * self.n
        out = []
        for i in range(self.n):
            if seen[i]:
                continue
            cyc = []
            j = i
            while not seen[j]:
                seen[j] = True
                cyc.append(j)
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    def num_cycles(self) -> int:
        return len(self.cycles())

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))


def perm_matrix(pi: Permutation, F: Field) -> Matrix:
    """``P[pi(i)][i] = 1``, so that ``P_s P_t = P_{st}``."""
    n = pi.n
    rows = [[F.zero] * n for _ in range(n)]
    for i, j in enumerate(pi.images):
        rows[j][i] = F.one
    return Matrix._raw(F, rows)


def charpoly(A: Matrix) -> Polynomial:
    """``det(x*1 - A)`` via reduction to upper Hessenberg form."""
    if not A.is_square:
        raise ShapeError("characteristic polynomial of a non-square matrix")
    F = A.field
    n = A.nrows
    H = [list(r) for r in A.rows]
    add, sub, mul, inv, is_zero = F.add, F.sub, F.mul, F.inv, F.is_zero
    for m in range(1, n - 1):
        piv = None
        for i in range(m, n):
            if not is_zero(H[i][m - 1]):
                piv = i
                break
        if piv is None:
            continue
        if piv != m:
            H[piv], H[m] = H[m], H[piv]
            for row in H:
                row[piv], row[m] = row[m], row[piv]
        tinv = inv(H[m][m - 1])
        for i in range(m + 1, n):
            u = H[i][m - 1]
            if is_zero(u):
                continue
            u = mul(u, tinv)
            ri, rm = H[i], H[m]
            for j in range(n):
                if not is_zero(rm[j]):
                    ri[j] = sub(ri[j], mul(u, rm[j]))
            for row in H:
                if not is_zero(row[i]):
                    row[m] = add(row[m], mul(u, row[i]))
    polys = [(F.one,)]
    for m in range(1, n + 1):
        pm = pa.mul(F, (F.neg(H[m - 1][m - 1]), F.one), polys[m - 1])
        t = F.one
        for i in range(m - 1, 0, -1):
            t = mul(t, H[i][i - 1])
            if is_zero(t):
                break
            c = mul(H[i - 1][m - 1], t)
            if not is_zero(c):
                pm = pa.sub(F, pm, pa.scale(F, polys[i - 1], c))
        polys.append(pm)
    return Polynomial._raw(F, polys[n])


def maximal_nonsingular_minor(A: Matrix) -> tuple[list[int], list[int]]:
    """Row and column indices of a ``rank(A) x rank(A)`` nonsingular submatrix."""
    _, cols, rows = echelon(A.field, A.rows, A.ncols)
    return sorted(rows), cols


def submatrix(A: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    return Matrix._raw(A.field, [[A.rows[i][j] for j in cols] for i in rows])


def multiplication_matrix(L: ExtensionField, a) -> list[list]:
    """Matrix over the base of ``x -> a*x`` in the power basis of ``L``."""
    d = L.degree
    B = L.base
    cols = []
    for s in range(d):
        e = [B.zero] * d
        e[s] = B.one
        cols.append(L.mul(a, tuple(e)))
    return [[cols[s][r] for s in range(d)] for r in range(d)]


def restrict_scalars(A: Matrix) -> Matrix:
    """View ``A`` over ``L = K[x]/(f)`` as a matrix over ``K`` of size ``n*[L:K]``.

    Row/column index ``i*d + r`` is coordinate ``r`` (of the power basis) in
    component ``i``.
    """
    L = A.field
    if not isinstance(L, ExtensionField):
        raise FieldError(f"{L} is not a finite extension")
    d = L.degree
    K = L.base
    n, m = A.shape
    rows = [[K.zero] * (m * d) for _ in range(n * d)]
    for i, row in enumerate(A.rows):
        for j, a in enumerate(row):
            if L.is_zero(a):
                continue
            M = multiplication_matrix(L, a)
            for r in range(d):
                target = rows[i * d + r]
                src = M[r]
                for s in range(d):
                    target[j * d + s] = src[s]
    return Matrix._raw(K, rows)


def _eval_fp_poly(L: Field, coeffs, c):
    acc = L.zero
    for a in reversed(coeffs):
        acc = L.add(L.mul(acc, c), L.from_int(a))
    return acc


def _avoid_coeffs(K: RationalFunctionField, avoid) -> list[tuple]:
    polys = []
    for f in avoid:
        if isinstance(f, Polynomial):
            if f.field != K.Fp:
                raise FieldError(f"avoid polynomial {f} is not over {K.Fp}")
            coeffs = f.coeffs
        else:
            coeffs = pa.strip(K.Fp, tuple(K.Fp.convert(c) for c in f))
        if not coeffs:
            raise PreconditionError("cannot avoid the zeros of the zero polynomial")
        polys.append(tuple(coeffs))
    return polys


def entry_denominators(A: Matrix) -> list[tuple]:
    out = []
    for row in A.rows:
        for x in row:
            if x[1] != (1,):
                out.append(x[1])
    return out


def find_specialization_point(
    K: RationalFunctionField, avoid: Sequence, degree: int = 1, max_degree: int = 12
) -> tuple[Field, object]:
    """First ``c`` in F_{p^m} (enumeration order, smallest admissible ``m``
    starting at ``degree``) at which no polynomial of ``avoid`` vanishes."""
    polys = list(dict.fromkeys(_avoid_coeffs(K, avoid)))
    m = degree
    while m <= max_degree:
        L = GF(K.p, m)
        for c in L.elements():
            if all(not L.is_zero(_eval_fp_poly(L, f, c)) for f in polys):
                return L, c
        m += 1
    raise PreconditionError(f"no admissible point in F_{K.p}^m for m <= {max_degree}")


def specialize_matrix(
    A: Matrix,
    avoid: Sequence[Polynomial] = (),
    degree: int = 1,
    max_degree: int = 12,
) -> tuple[Matrix, FieldElement]:
    """Substitute ``t -> c`` with ``c`` in F_{p^m} avoiding every zero of ``avoid``.

    Candidates are scanned in the fixed enumeration order of F_{p^m}; when
    every element is a zero of some avoided polynomial, ``m`` is increased.
    Denominators of the entries of ``A`` are always avoided.
    """
    K = A.field
    if not isinstance(K, RationalFunctionField):
        raise FieldError(f"specialization needs a matrix over F_p(t), got {K}")
    polys = _avoid_coeffs(K, avoid) + entry_denominators(A)
    L, c = find_specialization_point(K, polys, degree, max_degree)
    return specialize_at(A, L, c), FieldElement(L, c)


def specialize_at(A: Matrix, L: Field, c) -> Matrix:
    cache = {}

    def ev(x):
        v = cache.get(x)
        if v is None:
            num = _eval_fp_poly(L, x[0], c)
            den = _eval_fp_poly(L, x[1], c)
            v = cache[x] = L.div(num, den)
        return v

    return A.map(L, ev)
