"""Generalized (almost) Kahler pairs, their metric data, mirror G-blocks and Buscher rules."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .gcs import Failure, GCStructure, _residual_failures, validate_gcs
from .linalg import (Mat, SingularMatrixError, block, det, identity, inverse, is_antisymmetric, is_symmetric,
                     rank, span_equal, split, to_rational, zeros)
from .scalar import Context, GaussRational, PolyScalar
from .semiflat import AdaptedBlocks


class CompatibilityError(ValueError):
    def __init__(self, failed: Sequence[str]):
        super().__init__("compatibility conditions fail: " + ", ".join(failed))
        self.failed = list(failed)


@dataclass(frozen=True)
class GKPair:
    J: GCStructure
    Jp: GCStructure

    @classmethod
    def from_adapted(cls, b: AdaptedBlocks, bp: AdaptedBlocks) -> "GKPair":
        return cls(GCStructure.from_full(b.ctx, b.assemble()), GCStructure.from_full(bp.ctx, bp.assemble()))

    @property
    def ctx(self) -> Context:
        return self.J.ctx

    @property
    def m(self) -> int:
        return self.J.m

    def metric_operator(self) -> Mat:
        """G = -J J'."""
        return -(self.J.full() @ self.Jp.full())


# -- positivity --------------------------------------------------------------

def _swap(ctx: Context, m: int) -> Mat:
    z, one = zeros(ctx, m), identity(ctx, m)
    return block([[z, one], [one, z]])


def gram_matrix(G: Mat, m: int) -> Mat:
    """Matrix of (u, w) -> (Gu, w) for the symmetric form (v+f, w+g) -> 1/2 (f(w) + g(v))."""
    ctx = G[0, 0].ctx
    return (_swap(ctx, m) @ G).map(lambda a: a * GaussRational(Fraction(1, 2)))


def evaluate_matrix(M: Mat, point: Mapping[str, object]) -> Mat:
    return M.map(lambda a: a.evaluate(point))


def leading_minors_positive(M: Mat) -> bool:
    """Sylvester's criterion for a real symmetric constant matrix."""
    if not all(a.is_real() for r in M.rows for a in r):
        return False
    n = M.nrows
    for k in range(1, n + 1):
        d = det(M.submatrix(range(k), range(k)))
        if not (d.is_real() and d.re > 0):
            return False
    return True


def default_samples(ctx: Context) -> list[dict]:
    return [{name: 0 for name in ctx.base_names}]


def validate_gk(p: GKPair, samples: Sequence[Mapping[str, object]] | None = None) -> list[Failure]:
    """Commutation and G^2 = 1 as identities, positivity at each sample point."""
    out = []
    for label, J in (("J", p.J), ("J'", p.Jp)):
        for f in validate_gcs(J):
            out.append(Failure(f"{label} {f.label}", f.entry, f.residual))
    A, B = p.J.full(), p.Jp.full()
    out.extend(_residual_failures("commute", A @ B - B @ A))
    G = p.metric_operator()
    out.extend(_residual_failures("G^2=1", G @ G - identity(p.ctx, 2 * p.m)))
    gram = gram_matrix(G, p.m)
    for point in samples if samples is not None else default_samples(p.ctx):
        full = {name: point.get(name, 0) for name in p.ctx.base_names}
        if not leading_minors_positive(evaluate_matrix(gram, full)):
            where = ", ".join(f"{k}={v}" for k, v in sorted(full.items()))
            out.append(Failure("positive", None, f"G not positive definite at {where}"))
    return out


# -- metric data -------------------------------------------------------------

@dataclass(frozen=True)
class MetricData:
    ctx: Context
    g: Mat
    b: Mat
    Jplus: Mat
    Jminus: Mat

    def validate(self) -> list[Failure]:
        out = []
        if not is_symmetric(self.g):
            out.append(Failure("g symmetric", None, "g is not symmetric"))
        if not is_antisymmetric(self.b):
            out.append(Failure("b antisymmetric", None, "b is not antisymmetric"))
        one = identity(self.ctx, self.g.nrows)
        for name, J in (("J+", self.Jplus), ("J-", self.Jminus)):
            out.extend(_residual_failures(f"{name}^2=-1", J @ J + one))
            w = self.g @ J
            out.extend(_residual_failures(f"g{name} antisymmetric", w + w.T))
        return out


def _poly_inverse(M: Mat, what: str) -> Mat:
    try:
        inv = inverse(M)
    except SingularMatrixError:
        raise ValueError(f"{what} is singular") from None
    if not isinstance(inv[0, 0], PolyScalar):
        raise ValueError(f"{what} has no polynomial inverse")
    return inv


def assemble_g(md: MetricData) -> Mat:
    """G = [[-g^-1 b, g^-1], [g - b g^-1 b, b g^-1]]."""
    gi = _poly_inverse(md.g, "g")
    return block([[-(gi @ md.b), gi], [md.g - md.b @ gi @ md.b, md.b @ gi]])


def extract_metric_data(p: GKPair) -> MetricData:
    """Read (g, b) off G and J+- off J on the graphs of b +- g."""
    m = p.m
    (G1, G2), (_, _) = split(p.metric_operator(), [m, m])
    try:
        g = _poly_inverse(G2, "the T*-to-T block of G")
    except ValueError as exc:
        raise ValueError(f"(+1)-eigenbundle is not a polynomial graph over T: {exc}") from None
    b = -(g @ G1)
    J1, J2 = p.J.J1, p.J.J2
    return MetricData(p.ctx, g, b, J1 + J2 @ (b + g), J1 + J2 @ (b - g))


def reconstruct(md: MetricData) -> GKPair:
    ctx, m = md.ctx, md.g.nrows
    one, z = identity(ctx, m), zeros(ctx, m)
    half = GaussRational(Fraction(1, 2))
    gi = _poly_inverse(md.g, "g")
    wp, wm = md.g @ md.Jplus, md.g @ md.Jminus
    # (g J)^-1 = -J g^-1 since J^2 = -1
    wpi, wmi = -(md.Jplus @ gi), -(md.Jminus @ gi)
    eb, emb = block([[one, z], [md.b, one]]), block([[one, z], [-md.b, one]])
    inner = block([[md.Jplus + md.Jminus, -(wpi - wmi)], [wp - wm, -(md.Jplus.T + md.Jminus.T)]])
    inner_p = block([[md.Jplus - md.Jminus, -(wpi + wmi)], [wp + wm, -(md.Jplus.T - md.Jminus.T)]])
    J = (eb @ inner @ emb).map(lambda a: a * half)
    Jp = (eb @ inner_p @ emb).map(lambda a: a * half)
    return GKPair(GCStructure.from_full(ctx, J), GCStructure.from_full(ctx, Jp))


# -- semi-flat G blocks ------------------------------------------------------

GBLOCK_NAMES = ("G11", "G21", "G14", "G24", "G31", "G34")


@dataclass(frozen=True)
class GBlocks:
    ctx: Context
    G11: Mat
    G21: Mat
    G14: Mat
    G24: Mat
    G31: Mat
    G34: Mat

    def blocks(self) -> tuple[Mat, ...]:
        return tuple(getattr(self, k) for k in GBLOCK_NAMES)

    def assemble(self) -> Mat:
        z = zeros(self.ctx, self.ctx.n)
        return block([
            [self.G11, z, self.G21, z],
            [z, self.G14, z, self.G24],
            [self.G31, z, self.G11.T, z],
            [z, self.G34, z, self.G14.T],
        ])

    def symmetric_blocks(self) -> bool:
        return all(is_symmetric(m) for m in (self.G21, self.G24, self.G31, self.G34))


def g_blocks_formula(b: AdaptedBlocks, bp: AdaptedBlocks) -> GBlocks:
    """The six blocks of -K K' written through the adapted blocks."""
    return GBlocks(
        b.ctx,
        -(b.J12 @ bp.J13) + b.J22 @ bp.J31.T,
        b.J12 @ bp.J22.T + b.J22 @ bp.J12.T,
        -(b.J13 @ bp.J12) + b.J22.T @ bp.J31,
        -(b.J13 @ bp.J22) - b.J22.T @ bp.J13.T,
        -(b.J31 @ bp.J13) - b.J13.T @ bp.J31.T,
        b.J31.T @ bp.J12 + b.J12.T @ bp.J31,
    )


def g_blocks_semiflat(b: AdaptedBlocks, bp: AdaptedBlocks) -> GBlocks:
    """Blocks of G = -K K', computed by the block formulas and checked against the product."""
    K, Kp = b.assemble(), bp.assemble()
    if K @ Kp != Kp @ K:
        raise ValueError("the two structures do not commute")
    G = -(K @ Kp)
    gb = g_blocks_formula(b, bp)
    if gb.assemble() != G:
        raise ValueError("block formulas disagree with the direct product")
    return gb


def mirror_g(gb: GBlocks) -> GBlocks:
    """G11 -> G11^T, G21 <-> G31, with G14, G24 and G34 unchanged."""
    return GBlocks(gb.ctx, gb.G11.T, gb.G31, gb.G14, gb.G24, gb.G21, gb.G34)


def _rational_inverse(M: Mat) -> Mat:
    return inverse(to_rational(M))


def buscher_fields(gb: GBlocks) -> tuple[Mat, Mat, Mat, Mat]:
    """Fiber metric and B-field before and after: h, B, h_hat, B_hat (rational-function entries)."""
    G21i, G31i = _rational_inverse(gb.G21), _rational_inverse(gb.G31)
    G11 = to_rational(gb.G11)
    return G21i, G11.T @ G21i, G31i, G11 @ G31i


def buscher_check(gb: GBlocks) -> dict[str, bool]:
    """Both rules in (h, B) form and written directly through the G blocks."""
    h, B, hh, Bh = buscher_fields(gb)
    G11, G21i, G31i = to_rational(gb.G11), _rational_inverse(gb.G21), _rational_inverse(gb.G31)
    left, right = G21i + G11.T @ G21i, G21i - G11.T @ G21i
    return {
        "metric rule": (h + B) @ hh @ (h - B) == h,
        "B-field rule": (h + B) @ Bh @ (h - B) == -B,
        "G metric identity": left @ G31i @ right == G21i,
        "G B-field identity": left @ G11 @ G31i @ right == -(G11.T @ G21i),
    }


def buscher_transform(h: Mat, B: Mat) -> tuple[Mat, Mat]:
    """Solve (h+B) h_hat (h-B) = h and (h+B) B_hat (h-B) = -B."""
    h, B = to_rational(h), to_rational(B)
    try:
        P, Q = inverse(h + B), inverse(h - B)
    except SingularMatrixError:
        raise ValueError("h + B is singular") from None
    return P @ h @ Q, -(P @ B @ Q)


# -- foliations and the K maps -----------------------------------------------

def k_maps(p: GKPair) -> tuple[Mat, Mat]:
    """K+ = J1 + J'1 and K- = J1 - J'1."""
    return p.J.J1 + p.Jp.J1, p.J.J1 - p.Jp.J1


def k_inverse_check(p: GKPair, md: MetricData | None = None) -> dict[str, bool]:
    """Inverse identities for K+- with f = (g - b g^-1 b)^-1.

    ``K+ (-(g+b) f J+) = 1`` is the right-inverse form; it holds exactly when
    g and b commute (always when b = 0).  The left-inverse form
    ``-f (g+b) J+ K+ = 1`` and ``-f (g-b) J- K- = 1`` hold for every pair.
    """
    md = md or extract_metric_data(p)
    Kp, Km = k_maps(p)
    g, b = to_rational(md.g), to_rational(md.b)
    f = inverse(g - b @ inverse(g) @ b)
    one = to_rational(identity(p.ctx, p.m))
    Jp, Jm = to_rational(md.Jplus), to_rational(md.Jminus)
    return {
        "K+ right inverse": to_rational(Kp) @ (-((g + b) @ f @ Jp)) == one,
        "K+ left inverse": -(f @ (g + b) @ Jp) @ to_rational(Kp) == one,
        "K- inverse": -(f @ (g - b) @ Jm) @ to_rational(Km) == one,
    }


def _into(A: Mat, src: Sequence[int], dst: set[int]) -> bool:
    return all(A[r, c].is_zero() for c in src for r in range(A.nrows) if r not in dst)


def compatibility_conditions(p: GKPair, P: Sequence[int]) -> dict[str, bool]:
    """The eight inclusions for a foliation spanned by coordinate directions P."""
    m = p.m
    Pset = set(P)
    annP = [j for j in range(m) if j not in Pset]
    annPset = set(annP)
    J, Jp = p.J, p.Jp
    return {
        "J2(Ann P) in P": _into(J.J2, annP, Pset),
        "J3(P) in Ann P": _into(J.J3, P, annPset),
        "J'2(Ann P) in P": _into(Jp.J2, annP, Pset),
        "J'3(P) in Ann P": _into(Jp.J3, P, annPset),
        "J1 J'1(P) in P": _into(J.J1 @ Jp.J1, P, Pset),
        "J'1 J1(P) in P": _into(Jp.J1 @ J.J1, P, Pset),
        "J4 J'4(Ann P) in Ann P": _into(J.J4 @ Jp.J4, annP, annPset),
        "J'4 J4(Ann P) in Ann P": _into(Jp.J4 @ J.J4, annP, annPset),
    }


def _columns(M: Mat, cols: Sequence[int]) -> list[list]:
    return [M.column(c) for c in cols]


@dataclass(frozen=True)
class Complement:
    basis: tuple[tuple[PolyScalar, ...], ...]
    same_for_k_minus: bool
    orthogonal: bool


def j_compliment(p: GKPair, P: Sequence[int]) -> Complement:
    """Q = K+(P), verified equal to K-(P) and to the G3-orthogonal complement of P."""
    conds = compatibility_conditions(p, P)
    failed = [k for k, v in conds.items() if not v]
    if failed:
        raise CompatibilityError(failed)
    Kp, Km = k_maps(p)
    Q = _columns(Kp, P)
    Qm = _columns(Km, P)
    G = p.metric_operator()
    G3 = split(G, [p.m, p.m])[1][0]
    unit = [[PolyScalar.one(p.ctx) if r == c else PolyScalar.zero(p.ctx) for r in range(p.m)] for c in P]
    orth = all(_dot(u, G3, q).is_zero() for u in unit for q in Q)
    full_rank = rank([[v[i] for v in unit + Q] for i in range(p.m)]) == p.m
    return Complement(tuple(tuple(q) for q in Q), span_equal(Q, Qm), orth and full_rank)


def _dot(u, M: Mat, w):
    acc = PolyScalar.zero(M[0, 0].ctx)
    for i, a in enumerate(u):
        if a.is_zero():
            continue
        for j, c in enumerate(w):
            if not c.is_zero() and not M[i, j].is_zero():
                acc = acc + a * M[i, j] * c
    return acc


def is_lagrangian(omega: Mat, P: Sequence[int]) -> bool:
    return len(P) * 2 == omega.nrows and all(omega[i, j].is_zero() for i in P for j in P)


# -- J+- through the adapted blocks ------------------------------------------

def j_pm_semiflat(b: AdaptedBlocks, gb: GBlocks, sign: int) -> Mat:
    """J+ (sign=1) or J- (sign=-1) assembled on V + T_M from the adapted and G blocks."""
    one = identity(b.ctx, b.n)
    s = one if sign > 0 else -one
    G24i, G21i = _rational_inverse(gb.G24), _rational_inverse(gb.G21)
    R = to_rational
    upper = R(b.J12) + R(b.J22) @ (R(gb.G14.T) + R(s)) @ G24i
    lower = R(b.J13) - R(b.J22.T) @ (R(gb.G11.T) + R(s)) @ G21i
    z = R(zeros(b.ctx, b.n))
    return block([[z, upper], [lower, z]])
