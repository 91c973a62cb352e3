"""Seeded random constructions of valid structures, for property tests and the CLI."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .gcs import GCStructure, b_transform, beta_transform, from_complex, from_symplectic, tau_dual
from .linalg import Mat, block, identity, inverse, zeros
from .scalar import Context, GaussRational, PolyScalar
from .semiflat import AdaptedBlocks, field_transform, frame_change


def rational(rng: random.Random, size: int = 3) -> Fraction:
    return Fraction(rng.randint(-size, size), rng.randint(1, 2))


def gauss(rng: random.Random, complex_part: bool = True) -> GaussRational:
    return GaussRational(rational(rng), rational(rng) if complex_part and rng.random() < 0.3 else 0)


def poly(rng: random.Random, ctx: Context, degree: int, names: Sequence[str] | None = None,
         terms: int = 2, complex_part: bool = False) -> PolyScalar:
    names = list(names if names is not None else ctx.base_names)
    out = PolyScalar.zero(ctx)
    for _ in range(rng.randint(0, terms)):
        c = PolyScalar.const(ctx, gauss(rng, complex_part))
        for _ in range(rng.randint(0, degree) if names else 0):
            c = c * PolyScalar.var(ctx, rng.choice(names))
        out = out + c
    return out


def antisymmetric(rng: random.Random, ctx: Context, m: int, degree: int, density: float = 0.6) -> Mat:
    z = PolyScalar.zero(ctx)
    rows = [[z] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if rng.random() < density:
                a = poly(rng, ctx, degree)
                rows[i][j], rows[j][i] = a, -a
    return Mat(rows)


def unimodular(rng: random.Random, ctx: Context, m: int, degree: int = 0, steps: int = 3) -> Mat:
    """Product of elementary matrices and signed permutations; det is a nonzero constant."""
    M = identity(ctx, m)
    for _ in range(steps):
        if m > 1:
            i, j = rng.sample(range(m), 2)
            E = [list(r) for r in identity(ctx, m).rows]
            E[i][j] = poly(rng, ctx, degree, terms=1) if degree else PolyScalar.const(ctx, rational(rng))
            M = Mat(E) @ M
        k = rng.randrange(m)
        D = [list(r) for r in identity(ctx, m).rows]
        D[k][k] = PolyScalar.const(ctx, rng.choice([1, -1, 2, Fraction(1, 2)]))
        M = Mat(D) @ M
    return M


def standard_complex(ctx: Context, m: int) -> Mat:
    if m % 2:
        raise ValueError("a complex structure needs even rank")
    z, one = PolyScalar.zero(ctx), PolyScalar.one(ctx)
    rows = [[z] * m for _ in range(m)]
    for k in range(0, m, 2):
        rows[k + 1][k], rows[k][k + 1] = one, -one
    return Mat(rows)


def random_gcs(rng: random.Random, ctx: Context, m: int, max_degree: int = 2, tries: int = 50) -> GCStructure:
    """Chain of constructors and transforms with entries of bounded degree."""
    for _ in range(tries):
        A = unimodular(rng, ctx, m)
        Ai = inverse(A)
        if rng.random() < 0.5:
            J = from_complex(A @ standard_complex(ctx, m) @ Ai)
        else:
            J = from_symplectic(A.T @ standard_complex(ctx, m) @ A)
        for _ in range(rng.randint(0, 2)):
            r = rng.random()
            if r < 0.4:
                J = b_transform(antisymmetric(rng, ctx, m, 2), J)
            elif r < 0.8:
                J = beta_transform(antisymmetric(rng, ctx, m, 2), J)
            else:
                J = tau_dual(J)
        deg = max((a.degree() for b in J.blocks() for r in b.rows for a in r if not a.is_zero()), default=0)
        if deg <= max_degree:
            return J
    return J


def random_adapted(rng: random.Random, ctx: Context, max_degree: int = 1, constant: bool = False,
                   tries: int = 50) -> AdaptedBlocks:
    """Direct sum of rank-one complex and symplectic pieces, moved by frame changes and fields."""
    n = ctx.n
    for _ in range(tries):
        pieces = [rng.random() < 0.5 for _ in range(n)]
        z = PolyScalar.zero(ctx)
        one = PolyScalar.one(ctx)
        diag = lambda vals: Mat([[vals[i] if i == j else z for j in range(n)] for i in range(n)])
        J12 = diag([one if p else z for p in pieces])
        J13 = diag([-one if p else z for p in pieces])
        J22 = diag([z if p else one for p in pieces])
        b = AdaptedBlocks(ctx, J12, J13, J22, J22)
        b = frame_change(b, unimodular(rng, ctx, n), unimodular(rng, ctx, n))
        deg = 0 if constant else max_degree
        for _ in range(rng.randint(1, 3)):
            kind = rng.choice(["B31", "B34", "beta21", "beta24"])
            b = field_transform(b, kind, antisymmetric(rng, ctx, n, deg))
        if b.max_degree() <= max_degree:
            return b
    return b


def positive_diagonal(rng: random.Random, ctx: Context, n: int) -> Mat:
    z = PolyScalar.zero(ctx)
    vals = [PolyScalar.const(ctx, Fraction(rng.randint(1, 4), rng.randint(1, 3))) for _ in range(n)]
    return Mat([[vals[i] if i == j else z for j in range(n)] for i in range(n)])


def cayley_orthogonal(rng: random.Random, D: Mat) -> Mat:
    """(D - X)^-1 (D + X) for a random constant antisymmetric X; orthogonal for the form D."""
    ctx = D[0, 0].ctx
    X = antisymmetric(rng, ctx, D.nrows, 0)
    return inverse(D - X) @ (D + X) if X.nrows else D


def random_semiflat_gk(rng: random.Random, ctx: Context, degree: int = 1):
    """Adapted generalized Kahler pair built from metric data that never mixes V and T_M.

    Returns (blocks, partner blocks, metric data).  The fiber metric is
    P^T D P with P unimodular, so every inverse stays polynomial.
    """
    from .kahler import MetricData, reconstruct
    from .semiflat import from_operator

    n = ctx.n
    z = zeros(ctx, n)
    P = unimodular(rng, ctx, n, degree)
    D = positive_diagonal(rng, ctx, n)
    h = P.T @ D @ P
    A = unimodular(rng, ctx, n, degree)
    O = inverse(P) @ cayley_orthogonal(rng, D) @ P
    Am = O @ A
    k = A.T @ h @ A

    def antidiag(M):
        return block([[z, M], [-inverse(M), z]])

    # J maps T_M to V by A and V to T_M by -A^-1
    g = block([[h, z], [z, k]])
    b = block([[antisymmetric(rng, ctx, n, degree), z], [z, antisymmetric(rng, ctx, n, degree)]])
    md = MetricData(ctx, g, b, antidiag(A), antidiag(Am))
    pair = reconstruct(md)
    return from_operator(ctx, pair.J.full()), from_operator(ctx, pair.Jp.full()), md


def random_kahler(rng: random.Random, ctx: Context, m: int = 4):
    """Ordinary Kahler data (J, omega) on a constant chart: omega = S^T w0 S, J = S^-1 A J0 A^-1 S."""
    w0 = standard_complex(ctx, m)
    J0 = standard_complex(ctx, m)
    # symplectic A for w0: compose shears that preserve it
    A = identity(ctx, m)
    for _ in range(3):
        Y = [[PolyScalar.zero(ctx)] * m for _ in range(m)]
        sym = [[rational(rng) for _ in range(m // 2)] for _ in range(m // 2)]
        for i in range(m // 2):
            for j in range(m // 2):
                s = sym[min(i, j)][max(i, j)]
                Y[2 * i][2 * j] = PolyScalar.zero(ctx)
                # shear x_i -> x_i + s y_j symmetric in (i, j)
                Y[2 * i][2 * j + 1] = PolyScalar.const(ctx, s)
        E = identity(ctx, m) + Mat(Y)
        if rng.random() < 0.5:
            E = E.T
        A = E @ A
    S = unimodular(rng, ctx, m) if rng.random() < 0.7 else identity(ctx, m)
    Si = inverse(S)
    omega = S.T @ w0 @ S
    J = Si @ A @ J0 @ inverse(A) @ S
    return J, omega
