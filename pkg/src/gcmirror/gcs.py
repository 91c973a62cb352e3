"""Generalized complex structures as block operators on W + W*.

Conventions used throughout the package:

* A matrix ``A: W -> W*`` stands for the two-form with ``iota_v A = A v``,
  that is ``A = sum_{i<j} A[j][i] e^i ^ e^j``.  Bivectors ``W* -> W`` follow
  the same rule.
* The pure spinor of a structure is annihilated (under ``iota_v + alpha^``)
  by the ``-i`` eigenbundle.  With these two choices the symplectic spinor
  is ``exp(-i omega)``, a B-transform multiplies the spinor by ``exp(-B)``,
  and ``J d/dx = d/dy`` gives the spinor ``dx + i dy``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .exterior import GeneratorSet, GradedElement
from .linalg import Mat, block, identity, inverse, is_antisymmetric, nullspace, rank, split, zeros
from .scalar import Context, GaussRational, I, PolyScalar, ZERO


class InvalidStructureError(ValueError):
    pass


@dataclass(frozen=True)
class Failure:
    label: str
    entry: tuple[int, int] | None
    residual: str

    def __str__(self):
        where = f" at {self.entry}" if self.entry is not None else ""
        return f"{self.label}{where}: {self.residual}"


@dataclass(frozen=True)
class GCStructure:
    """Blocks of an operator on W + W*: J1: W->W, J2: W*->W, J3: W->W*, J4: W*->W*."""

    ctx: Context
    J1: Mat
    J2: Mat
    J3: Mat
    J4: Mat

    def __post_init__(self):
        m = self.J1.nrows
        for b in (self.J1, self.J2, self.J3, self.J4):
            if b.shape != (m, m):
                raise ValueError("blocks must be square of equal rank")

    @property
    def m(self) -> int:
        return self.J1.nrows

    def full(self) -> Mat:
        return block([[self.J1, self.J2], [self.J3, self.J4]])

    @classmethod
    def from_full(cls, ctx: Context, M: Mat) -> "GCStructure":
        if M.nrows % 2:
            raise ValueError("odd size")
        (a, b), (c, d) = split(M, [M.nrows // 2, M.nrows // 2])
        return cls(ctx, a, b, c, d)

    def blocks(self) -> tuple[Mat, Mat, Mat, Mat]:
        return (self.J1, self.J2, self.J3, self.J4)

    def apply(self, vec: Sequence) -> list:
        """Apply to a column vector of length 2m."""
        M = self.full()
        return [sum((a * x for a, x in zip(row, vec)), PolyScalar.zero(self.ctx)) for row in M.rows]

    def is_constant(self) -> bool:
        return all(a.is_constant() for b in self.blocks() for r in b.rows for a in r)


def _residual_failures(label: str, M: Mat) -> list[Failure]:
    out = []
    for i, r in enumerate(M.rows):
        for j, a in enumerate(r):
            if not a.is_zero():
                out.append(Failure(label, (i, j), str(a)))
    return out


def validate_gcs(J: GCStructure) -> list[Failure]:
    """Check the seven block identities; an empty list means valid."""
    one = identity(J.ctx, J.m)
    J1, J2, J3, J4 = J.blocks()
    checks = [
        ("e:1", J1 @ J1 + J2 @ J3 + one),
        ("e:2", J1 @ J2 + J2 @ J4),
        ("e:3", J3 @ J1 + J4 @ J3),
        ("e:4", J4 @ J4 + J3 @ J2 + one),
        ("e:5", J4 + J1.T),
        ("e:6", J2.T + J2),
        ("e:7", J3.T + J3),
    ]
    out = []
    for label, M in checks:
        out.extend(_residual_failures(label, M))
    return out


def is_valid(J: GCStructure) -> bool:
    return not validate_gcs(J)


def from_complex(J: Mat) -> GCStructure:
    """Complex-type structure with blocks (J, 0, 0, -J^T)."""
    ctx = J[0, 0].ctx
    m = J.nrows
    if not (J @ J + identity(ctx, m)).is_zero():
        raise InvalidStructureError("J does not square to -1")
    z = zeros(ctx, m)
    return GCStructure(ctx, J, z, z, -J.T)


def from_symplectic(omega: Mat) -> GCStructure:
    """Symplectic-type structure with blocks (0, -omega^-1, omega, 0)."""
    ctx = omega[0, 0].ctx
    m = omega.nrows
    if not is_antisymmetric(omega):
        raise InvalidStructureError("omega is not antisymmetric")
    try:
        inv = inverse(omega)
    except ValueError:
        raise InvalidStructureError("omega is singular") from None
    if not isinstance(inv[0, 0], PolyScalar):
        raise InvalidStructureError("omega has no polynomial inverse")
    z = zeros(ctx, m)
    return GCStructure(ctx, z, -inv, omega, z)


def _conjugate(J: GCStructure, g: Mat, ginv: Mat) -> GCStructure:
    return GCStructure.from_full(J.ctx, g @ J.full() @ ginv)


def b_transform(B: Mat, J: GCStructure) -> GCStructure:
    """exp(B) J exp(-B) with exp(B) = [[1, 0], [B, 1]]."""
    if not is_antisymmetric(B):
        raise InvalidStructureError("B must be antisymmetric")
    one, z = identity(J.ctx, J.m), zeros(J.ctx, J.m)
    return _conjugate(J, block([[one, z], [B, one]]), block([[one, z], [-B, one]]))


def beta_transform(beta: Mat, J: GCStructure) -> GCStructure:
    """exp(beta) J exp(-beta) with exp(beta) = [[1, beta], [0, 1]]."""
    if not is_antisymmetric(beta):
        raise InvalidStructureError("beta must be antisymmetric")
    one, z = identity(J.ctx, J.m), zeros(J.ctx, J.m)
    return _conjugate(J, block([[one, beta], [z, one]]), block([[one, -beta], [z, one]]))


def tau_dual(J: GCStructure) -> GCStructure:
    """Swap the summands: the structure on W* + W has blocks (J4, J3, J2, J1)."""
    return GCStructure(J.ctx, J.J4, J.J3, J.J2, J.J1)


# -- pairing and eigenbundles ------------------------------------------------

def pairing(u: Sequence, w: Sequence):
    """<v+f, w+g> = -1/2 (f(w) + g(v)) for length-2m coordinate vectors."""
    m = len(u) // 2
    s = None
    for k in range(m):
        t = u[m + k] * w[k] + w[m + k] * u[k]
        s = t if s is None else s + t
    return s * GaussRational(Fraction(-1, 2))


@dataclass(frozen=True)
class IsotropicSubbundle:
    """Complex subspace of W + W* (constant case) given by basis columns."""

    basis: tuple[tuple[GaussRational, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_isotropic(self) -> bool:
        return all(pairing(a, b).is_zero() for a in self.basis for b in self.basis)

    def is_transverse_to_conjugate(self) -> bool:
        cols = [list(v) for v in self.basis] + [[x.conjugate() for x in v] for v in self.basis]
        rows = [[c[i] for c in cols] for i in range(len(cols[0]))]
        return rank(rows) == len(cols)


EIGEN_SIGN = -1  # the spinor line is annihilated by the (EIGEN_SIGN * i)-eigenbundle


def _constant_full(J: GCStructure) -> Mat:
    if not J.is_constant():
        raise InvalidStructureError("eigenbundles are computed for constant entries only")
    return J.full().map(lambda a: a.constant_value())


def eigenbundle(J: GCStructure, sign: int = EIGEN_SIGN) -> IsotropicSubbundle:
    """Basis of the ``sign*i`` eigenspace of a constant structure."""
    M = _constant_full(J)
    lam = I * sign
    rows = [[a - lam if i == j else a for j, a in enumerate(r)] for i, r in enumerate(M.rows)]
    basis = nullspace(rows)
    E = IsotropicSubbundle(tuple(tuple(v) for v in basis))
    if E.dim != J.m:
        raise InvalidStructureError(f"eigenspace has dimension {E.dim}, expected {J.m}")
    return E


def form_generators(m: int, vector_prefix: str = "e", covector_prefix: str = "f",
                    coordinates: Sequence[str] | None = None) -> GeneratorSet:
    """Covectors ``f1..fm`` paired with vectors ``e1..em``."""
    pairs = [(f"{vector_prefix}{k + 1}", f"{covector_prefix}{k + 1}") for k in range(m)]
    return GeneratorSet.frames(pairs, coordinates)


def _subsets(m: int) -> list[tuple[int, ...]]:
    out = []
    for d in range(m + 1):
        out.extend(combinations(range(m), d))
    return out


def clifford_matrix(u: Sequence[GaussRational], m: int, subsets=None) -> list[list[GaussRational]]:
    """Matrix of ``phi -> iota_v phi + alpha ^ phi`` on forms in the subset basis."""
    subsets = subsets or _subsets(m)
    pos = {s: k for k, s in enumerate(subsets)}
    N = len(subsets)
    mat = [[ZERO] * N for _ in range(N)]
    v, alpha = u[:m], u[m:]
    for col, S in enumerate(subsets):
        for i in range(m):
            if not v[i].is_zero() and i in S:
                p = S.index(i)
                T = S[:p] + S[p + 1:]
                val = v[i] if p % 2 == 0 else -v[i]
                mat[pos[T]][col] = mat[pos[T]][col] + val
            if not alpha[i].is_zero() and i not in S:
                less = sum(1 for s in S if s < i)
                T = tuple(sorted(S + (i,)))
                val = alpha[i] if less % 2 == 0 else -alpha[i]
                mat[pos[T]][col] = mat[pos[T]][col] + val
    return mat


def annihilator(vectors: Sequence[Sequence[GaussRational]], m: int) -> list[list[GaussRational]]:
    """Null space of the Clifford action of all given vectors on forms."""
    subsets = _subsets(m)
    rows = []
    for u in vectors:
        rows.extend(clifford_matrix(u, m, subsets))
    if not rows:
        rows = [[ZERO] * len(subsets)]
    return nullspace(rows)


def normalize_form(phi: GradedElement) -> GradedElement:
    """Scale so the first term in canonical order has coefficient one."""
    if phi.is_zero():
        raise ValueError("cannot normalize zero")
    first = phi.sorted_terms()[0][1]
    if not first.is_constant():
        return phi
    return phi.scale(PolyScalar.const(phi.ctx, first.constant_value().inverse()))


def vector_to_form(vec: Sequence[GaussRational], gens: GeneratorSet, ctx: Context) -> GradedElement:
    cov = gens.covector_indices()
    subsets = _subsets(len(cov))
    terms = {}
    for S, c in zip(subsets, vec):
        if not c.is_zero():
            terms[tuple(cov[i] for i in S)] = PolyScalar.const(ctx, c)
    return GradedElement(gens, ctx, terms)


def form_to_vector(phi: GradedElement) -> list[GaussRational]:
    cov = phi.gens.covector_indices()
    where = {g: k for k, g in enumerate(cov)}
    subsets = _subsets(len(cov))
    pos = {s: k for k, s in enumerate(subsets)}
    vec = [ZERO] * len(subsets)
    for key, c in phi.terms.items():
        S = tuple(where[g] for g in key)
        vec[pos[S]] = c.constant_value()
    return vec


def pure_spinor(J: GCStructure, gens: GeneratorSet | None = None) -> GradedElement:
    """Normalized generator of the spinor line of a constant structure."""
    gens = gens or form_generators(J.m)
    if len(gens.covector_indices()) != J.m:
        raise ValueError("generator set must have m covectors")
    E = eigenbundle(J)
    sols = annihilator(E.basis, J.m)
    if len(sols) != 1:
        raise InvalidStructureError(f"annihilator has dimension {len(sols)}, expected 1")
    return normalize_form(vector_to_form(sols[0], gens, J.ctx))


def annihilates(u: Sequence[GaussRational], phi: GradedElement) -> bool:
    m = len(u) // 2
    vec = form_to_vector(phi)
    mat = clifford_matrix(u, m)
    return all(sum((a * x for a, x in zip(row, vec)), ZERO).is_zero() for row in mat)


def proportional(a: GradedElement, b: GradedElement) -> GaussRational | None:
    """The constant c with a == c*b (both constant-coefficient and nonzero), else None."""
    if a.is_zero() or b.is_zero() or set(a.terms) != set(b.terms):
        return None
    ratio = None
    for k, cb in b.terms.items():
        ca = a.terms[k]
        if not (ca.is_constant() and cb.is_constant()):
            return None
        r = ca.constant_value() / cb.constant_value()
        if ratio is None:
            ratio = r
        elif r != ratio:
            return None
    return ratio


def two_form(A: Mat, gens: GeneratorSet) -> GradedElement:
    """Two-form with ``iota_v form = A v`` on the covector generators of ``gens``."""
    ctx = A[0, 0].ctx
    cov = gens.covector_indices()
    out = GradedElement.zero(gens, ctx)
    m = A.nrows
    for i in range(m):
        for j in range(i + 1, m):
            c = A[j, i]
            if not c.is_zero():
                out = out + GradedElement(gens, ctx, {(cov[i], cov[j]): c})
    return out


def bivector(beta: Mat, gens: GeneratorSet) -> GradedElement:
    """Bivector with ``iota_alpha bivector = beta alpha`` on the vector generators."""
    ctx = beta[0, 0].ctx
    vec = gens.vector_indices()
    out = GradedElement.zero(gens, ctx)
    m = beta.nrows
    for i in range(m):
        for j in range(i + 1, m):
            c = beta[j, i]
            if not c.is_zero():
                out = out + GradedElement(gens, ctx, {(vec[i], vec[j]): c})
    return out

