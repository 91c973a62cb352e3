"""Courant bracket calculus on a coordinate chart and two integrability tests."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .exterior import GradedElement
from .gcs import GCStructure
from .linalg import rank
from .scalar import Context, GaussRational, PolyScalar

HALF = GaussRational(Fraction(1, 2))


class ChartMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class GeneralizedSection:
    """Vector field plus one-form, both given by components along ``coords``."""

    ctx: Context
    coords: tuple[str, ...]
    X: tuple[PolyScalar, ...]
    xi: tuple[PolyScalar, ...]

    def __post_init__(self):
        if len(self.X) != len(self.coords) or len(self.xi) != len(self.coords):
            raise ValueError("component count does not match the chart")

    @classmethod
    def zero(cls, ctx: Context, coords: Sequence[str]) -> "GeneralizedSection":
        z = PolyScalar.zero(ctx)
        return cls(ctx, tuple(coords), (z,) * len(coords), (z,) * len(coords))

    @classmethod
    def from_vector(cls, ctx: Context, coords: Sequence[str], vec: Sequence) -> "GeneralizedSection":
        """From a stacked column (vector components, then form components)."""
        m = len(coords)
        vec = [v if isinstance(v, PolyScalar) else PolyScalar.const(ctx, v) for v in vec]
        return cls(ctx, tuple(coords), tuple(vec[:m]), tuple(vec[m:]))

    @classmethod
    def frame(cls, ctx: Context, coords: Sequence[str], k: int) -> "GeneralizedSection":
        """k-th coordinate section: d/dx_k for k < m, else dx_(k-m)."""
        m = len(coords)
        vec = [PolyScalar.zero(ctx)] * (2 * m)
        vec[k] = PolyScalar.one(ctx)
        return cls.from_vector(ctx, coords, vec)

    def vector(self) -> list[PolyScalar]:
        return list(self.X) + list(self.xi)

    def _check(self, other: "GeneralizedSection"):
        if self.ctx != other.ctx or self.coords != other.coords:
            raise ChartMismatchError("sections live on different charts")

    def __add__(self, other):
        self._check(other)
        return GeneralizedSection(self.ctx, self.coords, tuple(a + b for a, b in zip(self.X, other.X)),
                                  tuple(a + b for a, b in zip(self.xi, other.xi)))

    def __neg__(self):
        return GeneralizedSection(self.ctx, self.coords, tuple(-a for a in self.X), tuple(-a for a in self.xi))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "GeneralizedSection":
        if not isinstance(f, PolyScalar):
            f = PolyScalar.const(self.ctx, f)
        return GeneralizedSection(self.ctx, self.coords, tuple(f * a for a in self.X),
                                  tuple(f * a for a in self.xi))

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.X) and all(a.is_zero() for a in self.xi)

    def __str__(self):
        parts = []
        for c, a in zip(self.coords, self.X):
            if not a.is_zero():
                parts.append(f"({a})*p{c}")
        for c, a in zip(self.coords, self.xi):
            if not a.is_zero():
                parts.append(f"({a})*d{c}")
        return " + ".join(parts) if parts else "0"


def _zero(ctx):
    return PolyScalar.zero(ctx)


def directional(X: Sequence[PolyScalar], coords: Sequence[str], f: PolyScalar) -> PolyScalar:
    """X(f) = sum_j X^j df/dx_j."""
    out = PolyScalar.zero(f.ctx)
    for a, c in zip(X, coords):
        if not a.is_zero():
            out = out + a * f.partial(c)
    return out


def lie_bracket(u: GeneralizedSection, w: GeneralizedSection) -> tuple[PolyScalar, ...]:
    """Vector-field bracket [X, Y] of the vector parts."""
    u._check(w)
    return tuple(directional(u.X, u.coords, b) - directional(w.X, u.coords, a) for a, b in zip(u.X, w.X))


def lie_derivative(X: Sequence[PolyScalar], eta: Sequence[PolyScalar], coords: Sequence[str]) -> tuple[PolyScalar, ...]:
    """Components of L_X eta = sum_j X^j d_j eta_k + eta_j d_k X^j."""
    out = []
    for k, c in enumerate(coords):
        acc = directional(X, coords, eta[k])
        for j in range(len(coords)):
            if not eta[j].is_zero():
                acc = acc + eta[j] * X[j].partial(c)
        out.append(acc)
    return tuple(out)


def contraction(X: Sequence[PolyScalar], eta: Sequence[PolyScalar]) -> PolyScalar:
    acc = None
    for a, b in zip(X, eta):
        t = a * b
        acc = t if acc is None else acc + t
    return acc


def differential(f: PolyScalar, coords: Sequence[str]) -> tuple[PolyScalar, ...]:
    return tuple(f.partial(c) for c in coords)


def courant_bracket(u: GeneralizedSection, w: GeneralizedSection) -> GeneralizedSection:
    """[X+xi, Y+eta] = [X,Y] + L_X eta - L_Y xi + 1/2 d(iota_Y xi - iota_X eta)."""
    u._check(w)
    coords = u.coords
    vec = lie_bracket(u, w)
    lx = lie_derivative(u.X, w.xi, coords)
    ly = lie_derivative(w.X, u.xi, coords)
    d = differential((contraction(w.X, u.xi) - contraction(u.X, w.xi)) * HALF, coords)
    form = tuple(a - b + c for a, b, c in zip(lx, ly, d))
    return GeneralizedSection(u.ctx, coords, vec, form)


def pairing(u: GeneralizedSection, w: GeneralizedSection) -> PolyScalar:
    """<v+f, w+g> = -1/2 (f(w) + g(v))."""
    u._check(w)
    return (contraction(w.X, u.xi) + contraction(u.X, w.xi)) * GaussRational(Fraction(-1, 2))


def apply_structure(J: GCStructure, u: GeneralizedSection) -> GeneralizedSection:
    if J.m != len(u.coords) or J.ctx != u.ctx:
        raise ChartMismatchError("structure and section live on different charts")
    return GeneralizedSection.from_vector(u.ctx, u.coords, J.apply(u.vector()))


def nijenhuis_tensor(J: GCStructure, u: GeneralizedSection, w: GeneralizedSection) -> GeneralizedSection:
    """N(u,w) = [Ju,Jw] - J[Ju,w] - J[u,Jw] - [u,w]."""
    Ju, Jw = apply_structure(J, u), apply_structure(J, w)
    return (courant_bracket(Ju, Jw)
            - apply_structure(J, courant_bracket(Ju, w))
            - apply_structure(J, courant_bracket(u, Jw))
            - courant_bracket(u, w))


@dataclass(frozen=True)
class Witness:
    """A pair of frame sections with a nonvanishing value."""

    i: int
    j: int
    value: GeneralizedSection

    def describe(self, labels: Sequence[str]) -> str:
        return f"[{labels[self.i]}, {labels[self.j]}] = {self.value}"


def frame_labels(coords: Sequence[str]) -> list[str]:
    return [f"p{c}" for c in coords] + [f"d{c}" for c in coords]


def integrability_by_nijenhuis(J: GCStructure, coords: Sequence[str] | None = None,
                               first_only: bool = False) -> tuple[bool, list[Witness]]:
    """Evaluate N on all pairs of coordinate frame sections.

    N is tensorial, so vanishing on a frame is equivalent to vanishing everywhere.
    ``coords`` defaults to the full chart (base then fiber) when its size
    matches, otherwise the base coordinates.
    """
    ctx = J.ctx
    if coords is None:
        coords = ctx.names if len(ctx.names) == J.m else ctx.base_names
    coords = tuple(coords)
    if len(coords) != J.m:
        raise ChartMismatchError("chart dimension does not match the structure")
    frame = [GeneralizedSection.frame(ctx, coords, k) for k in range(2 * J.m)]
    witnesses = []
    for i, j in combinations(range(2 * J.m), 2):
        N = nijenhuis_tensor(J, frame[i], frame[j])
        if not N.is_zero():
            witnesses.append(Witness(i, j, N))
            if first_only:
                break
    return not witnesses, witnesses


def bracket_witnesses(sections: Sequence[GeneralizedSection], first_only: bool = False) -> list[Witness]:
    """Pairs (i < j) whose Courant bracket does not vanish."""
    out = []
    for i, j in combinations(range(len(sections)), 2):
        b = courant_bracket(sections[i], sections[j])
        if not b.is_zero():
            out.append(Witness(i, j, b))
            if first_only:
                break
    return out


# -- spinor test -------------------------------------------------------------

def _form_vector(phi: GradedElement, basis: dict) -> list[PolyScalar]:
    vec = [PolyScalar.zero(phi.ctx)] * len(basis)
    for key, c in phi.terms.items():
        vec[basis[key]] = c
    return vec


def _remove_index(phi: GradedElement, k: int) -> GradedElement:
    out = {}
    for key, c in phi.terms.items():
        if k in key:
            p = key.index(k)
            out[key[:p] + key[p + 1:]] = -c if p % 2 else c
    return GradedElement(phi.gens, phi.ctx, out)


def spinor_integrability(phi: GradedElement) -> bool:
    """Whether d(phi) = iota_v phi + alpha ^ phi has a solution (v, alpha).

    The unknown components range over the fraction field of the coefficient
    ring, so solvability is a rank comparison.
    """
    from .exterior import de_rham_d
    from itertools import combinations as comb

    if phi.is_zero():
        raise ValueError("spinor must be nonzero")
    if not phi.is_form():
        raise ValueError("spinor must be a form")
    dphi = de_rham_d(phi)
    if dphi.is_zero():
        return True
    cov = phi.gens.covector_indices()
    basis = {}
    for d in range(len(cov) + 1):
        for S in comb(cov, d):
            basis[S] = len(basis)
    cols = []
    for k in cov:
        cols.append(_form_vector(_remove_index(phi, k), basis))
        one = GradedElement(phi.gens, phi.ctx, {(k,): PolyScalar.one(phi.ctx)})
        cols.append(_form_vector(one.wedge(phi), basis))
    rows = [[c[r] for c in cols] for r in range(len(basis))]
    keep = [r for r in range(len(basis)) if any(not x.is_zero() for x in rows[r])]
    target = _form_vector(dphi, basis)
    if any(not target[r].is_zero() for r in range(len(basis)) if r not in keep):
        return False
    A = [rows[r] for r in keep]
    Ab = [rows[r] + [target[r]] for r in keep]
    return rank(A) == rank(Ab)
