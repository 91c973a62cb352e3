"""Exterior algebra over a declared set of vector and covector generators.

A term is an ascending tuple of generator indices with a PolyScalar
coefficient.  Contraction uses the declared duality pairing without any
normalization factor: ``iota_u alpha = alpha(u)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from .grammar import Algebra, ParseError, parse_with
from .scalar import Context, GaussRational, PolyScalar, format_terms, monomial_string


class GeneratorMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    kind: str  # "vector" or "covector"
    partner: str | None = None
    coordinate: str | None = None  # chart coordinate for d(coordinate) or d/d(coordinate)


@dataclass(frozen=True)
class GeneratorSet:
    gens: tuple[Generator, ...]
    _index: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        names = [g.name for g in self.gens]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        index = {g.name: k for k, g in enumerate(self.gens)}
        for g in self.gens:
            if g.kind not in ("vector", "covector"):
                raise ValueError(f"bad generator kind {g.kind!r}")
            if g.partner is not None:
                if g.partner not in index:
                    raise ValueError(f"partner {g.partner!r} of {g.name!r} is not declared")
                p = self.gens[index[g.partner]]
                if p.partner != g.name or p.kind == g.kind:
                    raise ValueError(f"pairing of {g.name!r} is not a vector/covector bijection")
        object.__setattr__(self, "_index", index)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def partner_index(self, k: int) -> int | None:
        p = self.gens[k].partner
        return None if p is None else self._index[p]

    def __len__(self):
        return len(self.gens)

    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.gens)

    def covector_indices(self) -> list[int]:
        return [k for k, g in enumerate(self.gens) if g.kind == "covector"]

    def vector_indices(self) -> list[int]:
        return [k for k, g in enumerate(self.gens) if g.kind == "vector"]

    @classmethod
    def frames(cls, pairs: Sequence[tuple[str, str]], coordinates: Sequence[str | None] | None = None,
               vectors: bool = True) -> "GeneratorSet":
        """Covector generators for each pair, and (optionally) their dual vectors.

        ``pairs`` lists ``(vector_name, covector_name)``.  Covectors come first
        in the generator order; vectors follow.
        """
        coordinates = coordinates or [None] * len(pairs)
        gens = []
        for (v, c), x in zip(pairs, coordinates):
            gens.append(Generator(c, "covector", v if vectors else None, x))
        if vectors:
            for (v, c), x in zip(pairs, coordinates):
                gens.append(Generator(v, "vector", c, x))
        return cls(tuple(gens))


def chart_forms(ctx: Context, fiber: bool = True, vectors: bool = False) -> GeneratorSet:
    """Coordinate covectors ``dx*`` (and ``dxi*``) for a chart, with optional ``px*`` vectors."""
    coords = list(ctx.base_names) + (list(ctx.fiber_names) if fiber else [])
    pairs = [("p" + c, "d" + c) for c in coords]
    return GeneratorSet.frames(pairs, coords, vectors=vectors)


def _merge_sign(a: tuple, b: tuple) -> tuple[int, tuple] | None:
    """Sign and sorted union of two ascending index tuples, None if they overlap."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    sb = set(b)
    if any(x in sb for x in a):
        return None
    inversions = 0
    j = 0
    for x in a:
        while j < len(b) and b[j] < x:
            j += 1
        inversions += j
    sign = -1 if inversions % 2 else 1
    return sign, tuple(sorted(a + b))


class GradedElement:
    """Element of the exterior algebra with PolyScalar coefficients."""

    __slots__ = ("gens", "ctx", "terms")

    def __init__(self, gens: GeneratorSet, ctx: Context, terms: Mapping[tuple, PolyScalar] | None = None,
                 _trusted: bool = False):
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "ctx", ctx)
        if _trusted:
            clean = dict(terms)
        else:
            clean = {}
            for key, c in (terms or {}).items():
                key = tuple(key)
                if list(key) != sorted(set(key)):
                    raise ValueError("generator subsets must be strictly ascending")
                if any(k < 0 or k >= len(gens) for k in key):
                    raise ValueError("generator index out of range")
                if not isinstance(c, PolyScalar):
                    c = PolyScalar.const(ctx, c)
                elif c.ctx != ctx:
                    raise ValueError("coefficient context mismatch")
                if not c.is_zero():
                    v = clean.get(key)
                    v = c if v is None else v + c
                    if v.is_zero():
                        clean.pop(key, None)
                    else:
                        clean[key] = v
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("GradedElement is immutable")

    # constructors
    @classmethod
    def zero(cls, gens: GeneratorSet, ctx: Context) -> "GradedElement":
        return cls(gens, ctx, {}, _trusted=True)

    @classmethod
    def scalar(cls, gens: GeneratorSet, ctx: Context, c) -> "GradedElement":
        c = c if isinstance(c, PolyScalar) else PolyScalar.const(ctx, c)
        return cls(gens, ctx, {(): c} if not c.is_zero() else {}, _trusted=True)

    @classmethod
    def generator(cls, gens: GeneratorSet, ctx: Context, name: str, coeff=1) -> "GradedElement":
        return cls(gens, ctx, {(gens.index(name),): coeff})

    @classmethod
    def monomial(cls, gens: GeneratorSet, ctx: Context, names: Sequence[str], coeff=1) -> "GradedElement":
        out = cls.scalar(gens, ctx, coeff)
        for nm in names:
            out = out.wedge(cls.generator(gens, ctx, nm))
        return out

    @classmethod
    def combination(cls, gens: GeneratorSet, ctx: Context, coeffs: Mapping[str, object]) -> "GradedElement":
        return cls(gens, ctx, {(gens.index(k),): v for k, v in coeffs.items()})

    # structure
    def _check(self, other: "GradedElement"):
        if self.gens != other.gens or self.ctx != other.ctx:
            raise GeneratorMismatchError("generator set or context mismatch")

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {len(k) for k in self.terms}

    def is_homogeneous(self, degree: int | None = None) -> bool:
        ds = self.degrees()
        if not ds:
            return True
        return len(ds) == 1 and (degree is None or degree in ds)

    def part(self, degree: int) -> "GradedElement":
        return GradedElement(self.gens, self.ctx,
                             {k: v for k, v in self.terms.items() if len(k) == degree}, _trusted=True)

    def coefficient(self, names: Sequence[str]) -> PolyScalar:
        """Coefficient of the monomial written in the given order (with sign)."""
        idx = [self.gens.index(n) for n in names]
        if len(set(idx)) != len(idx):
            return PolyScalar.zero(self.ctx)
        sign = _perm_sign(idx)
        c = self.terms.get(tuple(sorted(idx)), PolyScalar.zero(self.ctx))
        return c if sign > 0 else -c

    def is_form(self) -> bool:
        return all(self.gens.gens[i].kind == "covector" for k in self.terms for i in k)

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, GradedElement):
            other = GradedElement.scalar(self.gens, self.ctx, other)
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            v = c if v is None else v + c
            if v.is_zero():
                out.pop(k, None)
            else:
                out[k] = v
        return GradedElement(self.gens, self.ctx, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return GradedElement(self.gens, self.ctx, {k: -v for k, v in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        if not isinstance(other, GradedElement):
            other = GradedElement.scalar(self.gens, self.ctx, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "GradedElement":
        if not isinstance(c, PolyScalar):
            c = PolyScalar.const(self.ctx, c)
        if c.is_zero():
            return GradedElement.zero(self.gens, self.ctx)
        return GradedElement(self.gens, self.ctx,
                             {k: v * c for k, v in self.terms.items() if not (v * c).is_zero()},
                             _trusted=True)

    def __mul__(self, other):
        if isinstance(other, GradedElement):
            return self.wedge(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def wedge(self, other: "GradedElement") -> "GradedElement":
        self._check(other)
        out: dict = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                m = _merge_sign(ka, kb)
                if m is None:
                    continue
                sign, k = m
                c = ca * cb
                if sign < 0:
                    c = -c
                v = out.get(k)
                out[k] = c if v is None else v + c
        return GradedElement(self.gens, self.ctx, {k: v for k, v in out.items() if not v.is_zero()},
                             _trusted=True)

    def __xor__(self, other):
        return self.wedge(other)

    def __eq__(self, other):
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self.gens == other.gens and self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self):
        return hash((self.gens, frozenset(self.terms.items())))

    def map_coefficients(self, f) -> "GradedElement":
        return GradedElement(self.gens, self.ctx, {k: f(v) for k, v in self.terms.items()})

    def conjugate(self) -> "GradedElement":
        return self.map_coefficients(lambda c: c.conjugate())

    def relabel(self, gens: GeneratorSet, mapping: Mapping[str, str]) -> "GradedElement":
        """Rename generators into another generator set (with reordering signs)."""
        out = GradedElement.zero(gens, self.ctx)
        for k, c in self.terms.items():
            names = [mapping.get(self.gens.gens[i].name, self.gens.gens[i].name) for i in k]
            out = out + GradedElement.monomial(gens, self.ctx, names, c)
        return out

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def __str__(self):
        return format_form(self)

    def __repr__(self):
        return f"GradedElement({format_form(self)!r})"


def _perm_sign(seq: Sequence[int]) -> int:
    inv = 0
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                inv += 1
    return -1 if inv % 2 else 1


def contract(u: GradedElement, a: GradedElement) -> GradedElement:
    """Interior product by a degree-one element ``u``.

    Each generator in ``u`` removes its paired partner from ``a``; this is a
    graded derivation of degree -1.
    """
    u._check(a)
    if not u.is_homogeneous(1):
        raise ValueError("contraction argument must have degree one")
    out: dict = {}
    for (g,), cu in u.terms.items():
        p = u.gens.partner_index(g)
        if p is None:
            raise ValueError(f"generator {u.gens.gens[g].name!r} has no pairing partner")
        for k, c in a.terms.items():
            if p not in k:
                continue
            pos = k.index(p)
            nk = k[:pos] + k[pos + 1:]
            val = c * cu
            if pos % 2:
                val = -val
            v = out.get(nk)
            out[nk] = val if v is None else v + val
    return GradedElement(a.gens, a.ctx, {k: v for k, v in out.items() if not v.is_zero()}, _trusted=True)


def contract_multivector(u: GradedElement, a: GradedElement) -> GradedElement:
    """Contraction by a multivector: ``iota_{u1^...^uk} = iota_uk o ... o iota_u1``."""
    u._check(a)
    out = GradedElement.zero(a.gens, a.ctx)
    for k, c in u.terms.items():
        term = a
        for g in k:
            term = contract(GradedElement(a.gens, a.ctx, {(g,): PolyScalar.one(a.ctx)}, _trusted=True), term)
        out = out + term.scale(c)
    return out


def exp_graded(b: GradedElement) -> GradedElement:
    """Truncated exponential of a pure degree-two element."""
    if not b.is_homogeneous(2):
        raise ValueError("exp_graded needs a pure degree-two element")
    out = GradedElement.scalar(b.gens, b.ctx, 1)
    power = GradedElement.scalar(b.gens, b.ctx, 1)
    k = 0
    while True:
        k += 1
        power = power.wedge(b)
        if power.is_zero():
            break
        out = out + power.scale(GaussRational(Fraction(1, factorial(k))))
    return out


def clifford_act(v: GradedElement, alpha: GradedElement, phi: GradedElement) -> GradedElement:
    """``iota_v phi + alpha ^ phi`` with the unnormalized evaluation pairing.

    Applying ``v + alpha`` twice multiplies by ``alpha(v)``; with the
    half-weighted pairing ``<v+alpha, v+alpha> = -alpha(v)`` this reads
    ``u.u = -<u,u>``.
    """
    if not phi.is_form():
        raise ValueError("Clifford action is defined on forms")
    return contract(v, phi) + alpha.wedge(phi)


def de_rham_d(phi: GradedElement) -> GradedElement:
    """Exterior derivative on a chart whose covectors are tied to coordinates."""
    if not phi.is_form():
        raise ValueError("de Rham differential is defined on forms")
    gens = phi.gens
    coord_gen = {}
    for k, g in enumerate(gens.gens):
        if g.kind == "covector" and g.coordinate is not None:
            coord_gen[g.coordinate] = k
    out = GradedElement.zero(gens, phi.ctx)
    for key, c in phi.terms.items():
        for var in c.variables() | _mode_variables(c):
            if var not in coord_gen:
                raise ValueError(f"coefficient depends on {var!r} with no covector generator")
        for var, k in coord_gen.items():
            dc = c.partial(var)
            if dc.is_zero():
                continue
            m = _merge_sign((k,), key)
            if m is None:
                continue
            sign, nk = m
            out = out + GradedElement(gens, phi.ctx, {nk: dc if sign > 0 else -dc}, _trusted=True)
    return out


def _mode_variables(c: PolyScalar) -> set[str]:
    n = c.ctx.n
    used = set()
    for k in c.terms:
        for j, m in enumerate(k[2 * n:3 * n]):
            if m:
                used.add(c.ctx.fiber_names[j])
    return used


# -- text format -------------------------------------------------------------

def format_form(a: GradedElement) -> str:
    pieces = []
    for key, c in a.sorted_terms():
        gens = "^".join(a.gens.gens[i].name for i in key)
        for k, v in c.sorted_terms():
            mono = monomial_string(a.ctx, k)
            body = "*".join(x for x in (mono, gens) if x)
            pieces.append((v, body))
    return format_terms(pieces)


class _FormAlgebra(Algebra):
    def __init__(self, gens: GeneratorSet, ctx: Context):
        from .grammar import PolyAlgebra
        self.poly = PolyAlgebra(ctx)
        self.gens = gens
        self.ctx = ctx

    def _lift(self, p: PolyScalar) -> GradedElement:
        return GradedElement.scalar(self.gens, self.ctx, p)

    def number(self, value):
        return self._lift(self.poly.number(value))

    def imaginary(self):
        return self._lift(self.poly.imaginary())

    def varpi(self):
        return self._lift(self.poly.varpi())

    def mode(self, m):
        return self._lift(self.poly.mode(m))

    def ident(self, name):
        if name in self.gens._index:
            return GradedElement.generator(self.gens, self.ctx, name)
        p = self.poly.ident(name)
        return None if p is None else self._lift(p)

    def mul(self, a, b):
        return a.wedge(b)

    def power(self, a, k):
        out = GradedElement.scalar(self.gens, self.ctx, 1)
        for _ in range(k):
            out = out.wedge(a)
        return out

    def divide(self, a, b):
        if b.degrees() - {0} or not b.terms:
            raise ValueError("can only divide by a nonzero constant")
        c = b.terms[()]
        if not c.is_constant():
            raise ValueError("can only divide by a nonzero constant")
        return a.scale(PolyScalar.const(self.ctx, c.constant_value().inverse()))


def parse_form(text: str, gens: GeneratorSet, ctx: Context, line_offset: int = 0) -> GradedElement:
    """Parse a form string such as ``(1/2)*x1*dx1^dx2 + dxi1``."""
    try:
        return parse_with(text, _FormAlgebra(gens, ctx), line_offset)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), text, 0, line_offset) from None
