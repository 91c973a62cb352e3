"""Small exact matrix toolkit over any commutative ring of scalar objects.

Entries only need ``+ - *`` and ``is_zero()``; field operations (``/``,
``inverse()``) are needed by the elimination routines.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

from .scalar import Context, GaussRational, PolyScalar, RationalFunction, exact_divide


class Mat:
    """Immutable rectangular matrix."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(r) for r in rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, name, value):
        raise AttributeError("Mat is immutable")

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @classmethod
    def identity(cls, n: int, one, zero) -> "Mat":
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def filled(cls, nr: int, nc: int, value) -> "Mat":
        return cls([[value] * nc for _ in range(nr)])

    def map(self, f: Callable) -> "Mat":
        return Mat([[f(x) for x in r] for r in self.rows])

    @property
    def T(self) -> "Mat":
        return Mat(zip(*self.rows)) if self.rows else Mat([])

    def __add__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Mat([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Mat([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "Mat":
        return Mat([[-a for a in r] for r in self.rows])

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = other.T.rows
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = None
                for a, b in zip(r, c):
                    if a.is_zero() or b.is_zero():
                        continue
                    acc = a * b if acc is None else acc + a * b
                row.append(acc if acc is not None else _zero_like(r[0] if r else c[0]))
            out.append(row)
        return Mat(out)

    def scale(self, c) -> "Mat":
        return Mat([[c * a for a in r] for r in self.rows])

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    def __hash__(self):
        return hash(self.rows)

    def column(self, j: int) -> list:
        return [r[j] for r in self.rows]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Mat":
        return Mat([[self.rows[i][j] for j in cols] for i in rows])

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __repr__(self):
        return "Mat(" + repr([[str(a) for a in r] for r in self.rows]) + ")"


def _zero_like(x):
    if isinstance(x, PolyScalar):
        return PolyScalar.zero(x.ctx)
    if isinstance(x, RationalFunction):
        return RationalFunction(PolyScalar.zero(x.ctx))
    if isinstance(x, GaussRational):
        return GaussRational(0)
    return x * 0


def _one_like(x):
    if isinstance(x, PolyScalar):
        return PolyScalar.one(x.ctx)
    if isinstance(x, RationalFunction):
        return RationalFunction(PolyScalar.one(x.ctx))
    if isinstance(x, GaussRational):
        return GaussRational(1)
    return x * 0 + 1


def poly_matrix(ctx: Context, rows) -> Mat:
    """Build a PolyScalar matrix from numbers, strings or scalars."""
    from .grammar import parse_poly

    def conv(x):
        if isinstance(x, PolyScalar):
            return x
        if isinstance(x, str):
            return parse_poly(x, ctx)
        return PolyScalar.const(ctx, x)

    return Mat([[conv(x) for x in r] for r in rows])


def identity(ctx: Context, n: int) -> Mat:
    return Mat.identity(n, PolyScalar.one(ctx), PolyScalar.zero(ctx))


def zeros(ctx: Context, nr: int, nc: int | None = None) -> Mat:
    return Mat.filled(nr, nr if nc is None else nc, PolyScalar.zero(ctx))


def block(blocks: Sequence[Sequence[Mat]]) -> Mat:
    rows = []
    for brow in blocks:
        height = brow[0].nrows
        for i in range(height):
            row = []
            for b in brow:
                if b.nrows != height:
                    raise ValueError("block rows do not align")
                row.extend(b.rows[i])
            rows.append(row)
    return Mat(rows)


def split(m: Mat, sizes: Sequence[int]) -> list[list[Mat]]:
    """Split a square matrix into blocks with the given row/column sizes."""
    offs = [0]
    for s in sizes:
        offs.append(offs[-1] + s)
    return [[m.submatrix(range(offs[a], offs[a + 1]), range(offs[b], offs[b + 1]))
             for b in range(len(sizes))] for a in range(len(sizes))]


def permute(m: Mat, order: Sequence[int]) -> Mat:
    """Return P m P^-1 where new index k is old index order[k]."""
    return Mat([[m.rows[i][j] for j in order] for i in order])


def is_antisymmetric(m: Mat) -> bool:
    return m.is_square() and (m + m.T).is_zero()


def is_symmetric(m: Mat) -> bool:
    return m.is_square() and (m - m.T).is_zero()


def charpoly(m: Mat) -> list:
    """Coefficients ``[1, c1, ..., cn]`` of det(t - m), division free (Berkowitz)."""
    n = m.nrows
    if n == 0:
        return []
    one = _one_like(m[0, 0])
    zero = _zero_like(m[0, 0])
    # Berkowitz: build Toeplitz vectors from the bottom-right corner outwards.
    vect = [one, -m[n - 1, n - 1]]
    for k in range(n - 2, -1, -1):
        size = n - k - 1
        R = [m[k, j] for j in range(k + 1, n)]
        C = [m[i, k] for i in range(k + 1, n)]
        A = [[m[i, j] for j in range(k + 1, n)] for i in range(k + 1, n)]
        a = m[k, k]
        col = [one, -a]
        # powers R A^j C
        vec = C
        for _ in range(size):
            s = zero
            for r, c in zip(R, vec):
                if not r.is_zero() and not c.is_zero():
                    s = s + r * c
            col.append(-s)
            nv = []
            for i in range(size):
                acc = zero
                for j in range(size):
                    if not A[i][j].is_zero() and not vec[j].is_zero():
                        acc = acc + A[i][j] * vec[j]
                nv.append(acc)
            vec = nv
        # multiply Toeplitz(col) by vect
        L = len(vect)
        new = []
        for i in range(L + 1):
            acc = zero
            for j in range(L):
                if 0 <= i - j < len(col):
                    a_ = col[i - j]
                    b_ = vect[j]
                    if not a_.is_zero() and not b_.is_zero():
                        acc = acc + a_ * b_
            new.append(acc)
        vect = new
    return vect


def det(m: Mat):
    if not m.is_square():
        raise ValueError("determinant of a non-square matrix")
    n = m.nrows
    if n == 0:
        raise ValueError("empty matrix")
    if n == 1:
        return m[0, 0]
    if n == 2:
        return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    cp = charpoly(m)
    d = cp[n]
    return -d if n % 2 else d


def adjugate(m: Mat) -> Mat:
    """Division-free adjugate via Cayley-Hamilton."""
    n = m.nrows
    one = _one_like(m[0, 0])
    zero = _zero_like(m[0, 0])
    if n == 1:
        return Mat([[one]])
    cp = charpoly(m)
    # adj(m) = (-1)^(n-1) (m^(n-1) + c1 m^(n-2) + ... + c_(n-1))
    acc = Mat.identity(n, one, zero)
    for k in range(1, n):
        acc = (m @ acc) + Mat.identity(n, cp[k], zero)
    return acc if n % 2 == 1 else -acc


class SingularMatrixError(ValueError):
    pass


def inverse(m: Mat) -> Mat:
    """Exact inverse.

    Constant or unimodular polynomial matrices get a polynomial inverse;
    otherwise entries are RationalFunction.  GaussRational matrices use
    elimination.
    """
    if not m.is_square():
        raise ValueError("inverse of a non-square matrix")
    sample = m[0, 0]
    if isinstance(sample, GaussRational):
        return _gauss_inverse(m)
    if isinstance(sample, RationalFunction):
        return _field_inverse(m)
    d = det(m)
    if d.is_zero():
        raise SingularMatrixError("matrix is singular")
    adj = adjugate(m)
    if d.is_constant():
        c = d.constant_value().inverse()
        return adj.map(lambda a: a * c)
    return adj.map(lambda a: RationalFunction(a, d))


def to_rational(m: Mat) -> Mat:
    return m.map(lambda a: RationalFunction.coerce(a))


def to_poly(m: Mat) -> Mat:
    return m.map(lambda a: a.to_poly() if isinstance(a, RationalFunction) else a)


def _gauss_inverse(m: Mat) -> Mat:
    n = m.nrows
    one, zero = GaussRational(1), GaussRational(0)
    aug = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(m.rows)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return Mat([r[n:] for r in red[:n]])


def _field_inverse(m: Mat) -> Mat:
    n = m.nrows
    one = _one_like(m[0, 0])
    zero = _zero_like(m[0, 0])
    aug = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(m.rows)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return Mat([r[n:] for r in red[:n]])


def rref(rows: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over a field; returns (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    if not rows:
        return rows, []
    nr, nc = len(rows), len(rows[0])
    pivots = []
    r = 0
    for c in range(nc):
        p = None
        for i in range(r, nr):
            if not rows[i][c].is_zero():
                p = i
                break
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv if not x.is_zero() else x for x in rows[r]]
        for i in range(nr):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [a - f * b if not b.is_zero() else a for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return rows, pivots


def nullspace(rows: list[list], ncols: int | None = None) -> list[list]:
    """Basis of the right null space over a field (list of column vectors)."""
    if not rows:
        raise ValueError("need at least one row or an explicit column count")
    red, pivots = rref(rows)
    nc = len(rows[0])
    zero = _zero_like(rows[0][0])
    one = _one_like(rows[0][0])
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * nc
        v[f] = one
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][f]
        basis.append(v)
    return basis


def rank(rows: list[list]) -> int:
    if not rows:
        return 0
    sample = rows[0][0] if rows[0] else None
    if isinstance(sample, PolyScalar):
        return poly_rank(rows)
    return len(rref(rows)[1])


def poly_rank(rows: list[list]) -> int:
    """Rank over the fraction field, by fraction-free (Bareiss) elimination."""
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return 0
    nr, nc = len(rows), len(rows[0])
    one = _one_like(rows[0][0])
    prev = one
    r = 0
    for c in range(nc):
        p = None
        best = None
        for i in range(r, nr):
            if not rows[i][c].is_zero():
                size = len(rows[i][c].terms)
                if best is None or size < best:
                    p, best = i, size
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nr):
            f = rows[i][c]
            new = []
            for j in range(nc):
                val = piv * rows[i][j] - f * rows[r][j]
                if not val.is_zero() and prev != one:
                    q = exact_divide(val, prev)
                    if q is None:
                        raise ArithmeticError("Bareiss division was not exact")
                    val = q
                new.append(val)
            rows[i] = new
        prev = piv
        r += 1
        if r == nr:
            break
    return r


def solve_column_span(basis: list[list], target: list) -> bool:
    """Whether ``target`` lies in the span of ``basis`` vectors (over the field)."""
    if not basis:
        return all(t.is_zero() for t in target)
    cols = basis
    rows = [[cols[j][i] for j in range(len(cols))] for i in range(len(target))]
    r1 = rank(rows)
    rows2 = [row + [target[i]] for i, row in enumerate(rows)]
    return rank(rows2) == r1


def span_equal(a: list[list], b: list[list]) -> bool:
    """Equality of column spans of two vector families of the same length."""
    def as_rows(vs):
        return [[v[i] for v in vs] for i in range(len(vs[0]))]

    ra = rank(as_rows(a))
    rb = rank(as_rows(b))
    rab = rank(as_rows(list(a) + list(b)))
    return ra == rb == rab
