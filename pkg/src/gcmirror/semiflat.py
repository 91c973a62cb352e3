"""Adapted block data on the base and everything built from it.

A structure on ``V + T_M + V* + T_M*`` (in that order) is adapted when it
has the checkerboard shape::

    [    0      J12     0      J22  ]
    [   J13      0    -J22^T    0   ]
    [    0      J31     0    -J13^T ]
    [ -J31^T     0    -J12^T    0   ]

so four n-by-n blocks determine it.  In a flat frame the splitting maps are
coordinate inclusions, so the lift to the total space (coordinates x then
xi) is a relabeling: V -> d/dxi, T_M -> d/dx, V* -> dxi, T_M* -> dx.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .courant import GeneralizedSection, Witness, bracket_witnesses, courant_bracket, pairing
from .gcs import Failure, GCStructure, _residual_failures
from .linalg import Mat, SingularMatrixError, block, identity, inverse, permute, rank, solve_column_span, split, zeros
from .scalar import Context, PolyScalar


class InvalidBlocksError(ValueError):
    pass


@dataclass(frozen=True)
class AdaptedBlocks:
    ctx: Context
    J12: Mat
    J13: Mat
    J22: Mat
    J31: Mat

    def __post_init__(self):
        n = self.ctx.n
        for b in self.blocks():
            if b.shape != (n, n):
                raise ValueError(f"blocks must be {n}x{n}")

    @property
    def n(self) -> int:
        return self.ctx.n

    def blocks(self) -> tuple[Mat, Mat, Mat, Mat]:
        return (self.J12, self.J13, self.J22, self.J31)

    def assemble(self) -> Mat:
        """The 4n-by-4n operator on V + T_M + V* + T_M*."""
        z = zeros(self.ctx, self.n)
        return block([
            [z, self.J12, z, self.J22],
            [self.J13, z, -self.J22.T, z],
            [z, self.J31, z, -self.J13.T],
            [-self.J31.T, z, -self.J12.T, z],
        ])

    def is_constant(self) -> bool:
        return all(a.is_constant() for b in self.blocks() for r in b.rows for a in r)

    def max_degree(self) -> int:
        return max((a.degree() for b in self.blocks() for r in b.rows for a in r if not a.is_zero()), default=0)


def from_operator(ctx: Context, K: Mat) -> AdaptedBlocks:
    """Read the four blocks off a 4n operator, rejecting non-adapted shapes."""
    n = ctx.n
    parts = split(K, [n] * 4)
    b = AdaptedBlocks(ctx, parts[0][1], parts[1][0], parts[0][3], parts[2][1])
    if b.assemble() != K:
        raise InvalidBlocksError("operator is not of adapted form")
    return b


def validate_adapted(b: AdaptedBlocks) -> list[Failure]:
    one = identity(b.ctx, b.n)
    J12, J13, J22, J31 = b.blocks()
    checks = [
        ("K1", J12 @ J13 - J22 @ J31.T + one),
        ("K2", J12 @ J22.T + J22 @ J12.T),
        ("K3", J13 @ J12 - J22.T @ J31 + one),
        ("K4", J13 @ J22 + J22.T @ J13.T),
        ("K5", J31 @ J13 + J13.T @ J31.T),
        ("K6", J31.T @ J12 + J12.T @ J31),
    ]
    out = []
    for label, M in checks:
        out.extend(_residual_failures(label, M))
    return out


def _require_valid(b: AdaptedBlocks):
    fails = validate_adapted(b)
    if fails:
        raise InvalidBlocksError("invalid adapted blocks: " + "; ".join(map(str, fails[:3])))


def mirror(b: AdaptedBlocks, check: bool = True) -> AdaptedBlocks:
    """Exchange J12 with J31 and J22 with -J13^T."""
    if check:
        _require_valid(b)
    return AdaptedBlocks(b.ctx, b.J31, -b.J22.T, -b.J13.T, b.J12)


def mirror_order(n: int) -> list[int]:
    """Index order realizing the mirror as a relabeling V <-> V*."""
    r = list(range(4 * n))
    return r[2 * n:3 * n] + r[n:2 * n] + r[0:n] + r[3 * n:]


def lift_order(n: int) -> list[int]:
    r = list(range(4 * n))
    return r[n:2 * n] + r[0:n] + r[3 * n:] + r[2 * n:3 * n]


def lift_to_total_space(b: AdaptedBlocks, check: bool = True) -> GCStructure:
    """Structure on the chart (x, xi) of the total space, in flat coordinates."""
    if check:
        _require_valid(b)
    K = permute(b.assemble(), lift_order(b.n))
    return GCStructure.from_full(b.ctx, K)


# -- the M matrix ------------------------------------------------------------

def m_matrix(b: AdaptedBlocks) -> Mat:
    return block([[b.J13, b.J22.T], [-b.J31.T, b.J12.T]])


def m_inverse(b: AdaptedBlocks) -> Mat:
    """Two-sided inverse of ``m_matrix`` guaranteed by K1-K6."""
    return block([[-b.J12, -b.J22], [b.J31, -b.J13.T]])


def m_inverse_displayed(b: AdaptedBlocks) -> Mat:
    """The commonly quoted form; its lower row has the opposite sign, so
    ``m_inverse_displayed(b) @ M`` is diag(1, -1) rather than the identity."""
    return block([[-b.J12, -b.J22], [-b.J31, b.J13.T]])


def m_inverse_check(b: AdaptedBlocks) -> bool:
    M, Mi = m_matrix(b), m_inverse(b)
    one = identity(b.ctx, 2 * b.n)
    return M @ Mi == one and Mi @ M == one


def m_hat(b: AdaptedBlocks) -> Mat:
    return block([[-b.J22.T, -b.J13], [-b.J12.T, b.J31.T]])


def same_flat_image(A: Mat, B: Mat, A_inv: Mat) -> bool:
    """Whether A and B send constant sections onto the same sheaf, i.e. A^-1 B is constant and invertible."""
    C = A_inv @ B
    if not all(a.is_constant() for r in C.rows for a in r):
        return False
    try:
        inverse(C)
    except (SingularMatrixError, ZeroDivisionError):
        return False
    return True


def base_sections(M: Mat, ctx: Context) -> list[GeneralizedSection]:
    coords = ctx.base_names
    return [GeneralizedSection.from_vector(ctx, coords, M.column(k)) for k in range(M.ncols)]


def frame_names(n: int, dual_first: bool = False) -> list[str]:
    v = [f"e{i + 1}" for i in range(n)]
    f = [f"f{i + 1}" for i in range(n)]
    return f + v if dual_first else v + f


@dataclass(frozen=True)
class IntegrabilityResult:
    integrable: bool
    witnesses: tuple[Witness, ...]
    labels: tuple[str, ...]

    def __bool__(self):
        return self.integrable

    def describe(self) -> list[str]:
        return [w.describe(self.labels) for w in self.witnesses]


def integrability_semiflat(b: AdaptedBlocks, check: bool = True, first_only: bool = True) -> IntegrabilityResult:
    """All pairwise Courant brackets of the images of the flat frame under M vanish."""
    if check:
        _require_valid(b)
    secs = base_sections(m_matrix(b), b.ctx)
    ws = bracket_witnesses(secs, first_only=first_only)
    return IntegrabilityResult(not ws, tuple(ws), tuple(f"M({x})" for x in frame_names(b.n)))


# -- Dirac structures --------------------------------------------------------

@dataclass(frozen=True)
class DiracStructure:
    ctx: Context
    columns: tuple[GeneralizedSection, ...]

    def matrix(self) -> Mat:
        return Mat(list(zip(*[c.vector() for c in self.columns])))

    def is_isotropic(self) -> bool:
        return all(pairing(a, c).is_zero() for a in self.columns for c in self.columns)

    def rank(self) -> int:
        return rank([list(r) for r in self.matrix().rows])

    def is_involutive(self) -> bool:
        basis = [c.vector() for c in self.columns]
        for a, c in combinations(self.columns, 2):
            br = courant_bracket(a, c)
            if not br.is_zero() and not solve_column_span(basis, br.vector()):
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, DiracStructure) and self.columns == other.columns

    def __hash__(self):
        return hash(self.columns)


def dirac_structures(b: AdaptedBlocks, check: bool = True) -> tuple[DiracStructure, DiracStructure]:
    """Images of V and of V* under the structure, as subbundles of T_M + T_M*."""
    if check:
        _require_valid(b)
    delta = block([[b.J13], [-b.J31.T]])
    delta_hat = block([[-b.J22.T], [-b.J12.T]])
    return (DiracStructure(b.ctx, tuple(base_sections(delta, b.ctx))),
            DiracStructure(b.ctx, tuple(base_sections(delta_hat, b.ctx))))


def transverse(d1: DiracStructure, d2: DiracStructure) -> bool:
    rows = [list(r1) + list(r2) for r1, r2 in zip(d1.matrix().rows, d2.matrix().rows)]
    return rank(rows) == 2 * d1.ctx.n


# -- branes ------------------------------------------------------------------

@dataclass(frozen=True)
class BraneDatum:
    """Base directions S and fiber directions W (0-based coordinate indices)."""

    S: frozenset
    W: frozenset

    @classmethod
    def of(cls, S: Sequence[int], W: Sequence[int]) -> "BraneDatum":
        return cls(frozenset(S), frozenset(W))


def brane_mirror(d: BraneDatum, n: int) -> BraneDatum:
    """Replace W by the index set of its annihilator."""
    return BraneDatum(d.S, frozenset(range(n)) - d.W)


def restrict_to(a: PolyScalar, S: frozenset) -> PolyScalar:
    ctx = a.ctx
    return a.substitute({ctx.base_names[j]: 0 for j in range(ctx.n) if j not in S})


def _maps_into(A: Mat, src: frozenset, dst: frozenset, S: frozenset) -> bool:
    n = A.nrows
    return all(restrict_to(A[r, c], S).is_zero() for c in src for r in range(n) if r not in dst)


def brane_conditions(b: AdaptedBlocks, d: BraneDatum) -> dict[str, bool]:
    n = b.n
    every = frozenset(range(n))
    ann_S = every - d.S
    ann_W = every - d.W
    return {
        "e'1": _maps_into(b.J13, d.W, d.S, d.S),
        "e'2": _maps_into(b.J12, d.S, d.W, d.S),
        "e'3": _maps_into(b.J22, ann_S, d.W, d.S),
        "e'4": _maps_into(b.J31, d.S, ann_W, d.S),
    }


def brane_check(b: AdaptedBlocks, d: BraneDatum) -> bool:
    return all(brane_conditions(b, d).values())


def brane_invariance_oracle(b: AdaptedBlocks, d: BraneDatum) -> bool:
    """Invariance of W + T_S + Ann(W) + Ann(T_S) under the full operator."""
    n = b.n
    every = frozenset(range(n))
    sub = ({i for i in d.W} | {n + i for i in d.S}
           | {2 * n + i for i in every - d.W} | {3 * n + i for i in every - d.S})
    K = b.assemble()
    return all(restrict_to(K[r, c], d.S).is_zero() for c in sub for r in range(4 * n) if r not in sub)


# -- example families --------------------------------------------------------

def complex_family(L: Mat) -> AdaptedBlocks:
    """Blocks (L, -L^-1, 0, 0): the canonical complex lift twisted by L."""
    ctx = L[0, 0].ctx
    inv = inverse(L)
    if not isinstance(inv[0, 0], PolyScalar):
        raise InvalidBlocksError("L must have a polynomial inverse")
    z = zeros(ctx, ctx.n)
    return AdaptedBlocks(ctx, L, -inv, z, z)


def symplectic_family(L: Mat) -> AdaptedBlocks:
    """Blocks (0, 0, L, L^-T): symplectic type, J22 J31^T = 1."""
    ctx = L[0, 0].ctx
    inv = inverse(L)
    if not isinstance(inv[0, 0], PolyScalar):
        raise InvalidBlocksError("L must have a polynomial inverse")
    z = zeros(ctx, ctx.n)
    return AdaptedBlocks(ctx, z, z, L, inv.T)


def b_complex_family(Bprime: Mat) -> AdaptedBlocks:
    """B-field transform of the canonical complex structure on tot(T_M), with B' = B31 - B34."""
    ctx = Bprime[0, 0].ctx
    one = identity(ctx, ctx.n)
    return AdaptedBlocks(ctx, one, -one, zeros(ctx, ctx.n), Bprime)


def b_symplectic_family(B31: Mat, B34: Mat) -> AdaptedBlocks:
    """B-field transform of the canonical symplectic structure on tot(T_M*)."""
    ctx = B31[0, 0].ctx
    one = identity(ctx, ctx.n)
    return AdaptedBlocks(ctx, -B34, B31, one, one - B31 @ B34)


def two_form_matrix(ctx: Context, entries: dict[tuple[int, int], object]) -> Mat:
    """Antisymmetric matrix of the two-form sum c * dx_i ^ dx_j (i < j, 0-based)."""
    from .linalg import poly_matrix
    n = ctx.n
    rows = [[0] * n for _ in range(n)]
    M = poly_matrix(ctx, rows)
    rows = [list(r) for r in M.rows]
    for (i, j), c in entries.items():
        c = poly_matrix(ctx, [[c]])[0, 0]
        rows[j][i] = rows[j][i] + c
        rows[i][j] = rows[i][j] - c
    return Mat(rows)


# -- orthogonal symmetries preserving the adapted shape ---------------------

FIELD_SLOTS = {
    # name: (row block, column block) of the nilpotent generator in V, T_M, V*, T_M*
    "B31": (2, 0),
    "B34": (3, 1),
    "beta21": (0, 2),
    "beta24": (1, 3),
}


def _embed(ctx: Context, n: int, pieces: dict[tuple[int, int], Mat]) -> Mat:
    z = zeros(ctx, n)
    one = identity(ctx, n)
    return block([[pieces.get((r, c), one if r == c else z) for c in range(4)] for r in range(4)])


def field_transform(b: AdaptedBlocks, kind: str, field: Mat, check: bool = True) -> AdaptedBlocks:
    """exp(X) K exp(-X) for an antisymmetric field in one of the slots of FIELD_SLOTS."""
    from .linalg import is_antisymmetric
    if kind not in FIELD_SLOTS:
        raise ValueError(f"unknown field slot {kind!r}")
    if not is_antisymmetric(field):
        raise InvalidBlocksError("field must be antisymmetric")
    slot = FIELD_SLOTS[kind]
    g = _embed(b.ctx, b.n, {slot: field})
    gi = _embed(b.ctx, b.n, {slot: -field})
    return from_operator(b.ctx, g @ b.assemble() @ gi)


def nilpotent_transform(b: AdaptedBlocks, N: Mat) -> AdaptedBlocks:
    """exp(N) K exp(-N) for a 4n operator N with N^2 = 0."""
    if not (N @ N).is_zero():
        raise ValueError("generator must square to zero")
    one = identity(b.ctx, 4 * b.n)
    return from_operator(b.ctx, (one + N) @ b.assemble() @ (one - N))


def embed_blocks(ctx: Context, pieces: dict[tuple[int, int], Mat]) -> Mat:
    """4n operator with the given n-by-n blocks (indices into V, T_M, V*, T_M*) and zeros elsewhere."""
    z = zeros(ctx, ctx.n)
    return block([[pieces.get((r, c), z) for c in range(4)] for r in range(4)])


def frame_change(b: AdaptedBlocks, A: Mat | None = None, C: Mat | None = None) -> AdaptedBlocks:
    """Conjugate by A on V (with A^-T on V*) and C on T_M (with C^-T on T_M*)."""
    ctx, n = b.ctx, b.n
    pieces, inv_pieces = {}, {}
    for mat, (i, j) in ((A, (0, 2)), (C, (1, 3))):
        if mat is None:
            continue
        mi = inverse(mat)
        if not isinstance(mi[0, 0], PolyScalar):
            raise InvalidBlocksError("frame change must have a polynomial inverse")
        pieces[(i, i)], pieces[(j, j)] = mat, mi.T
        inv_pieces[(i, i)], inv_pieces[(j, j)] = mi, mat.T
    return from_operator(ctx, _embed(ctx, n, pieces) @ b.assemble() @ _embed(ctx, n, inv_pieces))
