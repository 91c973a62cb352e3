"""Exact coefficient arithmetic.

Scalars are polynomials over the Gaussian rationals in the base coordinates
``x1..xn`` and fiber coordinates ``xi1..xin``.  When the coordinate context is
periodic, a term may also carry a fiber Fourier mode ``E[m]`` standing for
``exp(2*pi*i*m.xi)``, and the formal unit ``varpi`` standing for ``2*pi*i``.

Everything is immutable and exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping


class ContextMismatchError(ValueError):
    pass


class EvaluationError(ValueError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot read {x!r} as a rational number")


class GaussRational:
    """A number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRational is immutable")

    @classmethod
    def coerce(cls, x) -> "GaussRational":
        if isinstance(x, GaussRational):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex numbers are not exact")
        return cls(x, 0)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def conjugate(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussRational.coerce(other) - self

    def __mul__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re * o.re - self.im * o.im,
                             self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "GaussRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return GaussRational.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = GaussRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussRational({self.re!s}, {self.im!s})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return _imag_str(self.im)
        tail = _imag_str(abs(self.im))
        return f"{self.re}{'+' if self.im > 0 else '-'}{tail}"


def _imag_str(q: Fraction) -> str:
    if q == 1:
        return "i"
    if q == -1:
        return "-i"
    return f"{q}*i"


ZERO = GaussRational(0)
ONE = GaussRational(1)
I = GaussRational(0, 1)


@dataclass(frozen=True)
class Context:
    """Coordinate context: ``n`` base and ``n`` fiber coordinates.

    ``periodic`` allows fiber Fourier modes.  Two scalars interoperate only
    when their contexts are equal.
    """

    n: int
    periodic: bool = False

    @property
    def base_names(self) -> tuple[str, ...]:
        return tuple(f"x{k + 1}" for k in range(self.n))

    @property
    def fiber_names(self) -> tuple[str, ...]:
        return tuple(f"xi{k + 1}" for k in range(self.n))

    @property
    def names(self) -> tuple[str, ...]:
        return self.base_names + self.fiber_names

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r} for context n={self.n}") from None

    @property
    def key_length(self) -> int:
        # 2n exponents, n modes, one varpi power
        return 3 * self.n + 1


class PolyScalar:
    """Sparse polynomial with Gaussian-rational coefficients.

    A term key is a flat tuple ``(e_1..e_2n, m_1..m_n, p)``: exponents of the
    base and fiber coordinates, the fiber mode vector and the power of varpi.
    """

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: Context, terms: Mapping[tuple, GaussRational] | None = None,
                 _trusted: bool = False):
        object.__setattr__(self, "ctx", ctx)
        if _trusted:
            clean = terms
        else:
            clean = {}
            width = ctx.key_length
            for key, c in (terms or {}).items():
                key = tuple(key)
                if len(key) != width:
                    raise ValueError("term key has wrong length for context")
                if any(e < 0 for e in key[:2 * ctx.n]) or key[-1] < 0:
                    raise ValueError("negative exponent")
                if not ctx.periodic and any(key[2 * ctx.n:3 * ctx.n]):
                    raise ValueError("fiber modes require a periodic context")
                c = GaussRational.coerce(c)
                if not c.is_zero():
                    clean[key] = clean.get(key, ZERO) + c
                    if clean[key].is_zero():
                        del clean[key]
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("PolyScalar is immutable")

    # construction helpers
    @classmethod
    def zero(cls, ctx: Context) -> "PolyScalar":
        return cls(ctx, {}, _trusted=True)

    @classmethod
    def const(cls, ctx: Context, c) -> "PolyScalar":
        c = GaussRational.coerce(c)
        if c.is_zero():
            return cls.zero(ctx)
        return cls(ctx, {(0,) * ctx.key_length: c}, _trusted=True)

    @classmethod
    def one(cls, ctx: Context) -> "PolyScalar":
        return cls.const(ctx, 1)

    @classmethod
    def var(cls, ctx: Context, name: str) -> "PolyScalar":
        key = [0] * ctx.key_length
        key[ctx.index(name)] = 1
        return cls(ctx, {tuple(key): ONE}, _trusted=True)

    @classmethod
    def mode(cls, ctx: Context, m: Iterable[int]) -> "PolyScalar":
        m = tuple(int(v) for v in m)
        if len(m) != ctx.n:
            raise ValueError("mode vector has wrong length")
        if any(m) and not ctx.periodic:
            raise ValueError("fiber modes require a periodic context")
        key = (0,) * (2 * ctx.n) + m + (0,)
        return cls(ctx, {key: ONE}, _trusted=True)

    @classmethod
    def varpi(cls, ctx: Context) -> "PolyScalar":
        key = (0,) * (3 * ctx.n) + (1,)
        return cls(ctx, {key: ONE}, _trusted=True)

    # predicates
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(k) for k in self.terms)

    def constant_value(self) -> GaussRational:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.terms.get((0,) * self.ctx.key_length, ZERO)

    def degree(self) -> int:
        n2 = 2 * self.ctx.n
        return max((sum(k[:n2]) for k in self.terms), default=-1)

    def variables(self) -> set[str]:
        names = self.ctx.names
        used = set()
        for k in self.terms:
            for idx in range(2 * self.ctx.n):
                if k[idx]:
                    used.add(names[idx])
        return used

    def has_modes(self) -> bool:
        n = self.ctx.n
        return any(any(k[2 * n:3 * n]) for k in self.terms)

    # arithmetic
    def _coerce(self, other) -> "PolyScalar":
        if isinstance(other, PolyScalar):
            if other.ctx != self.ctx:
                raise ContextMismatchError(f"context mismatch: {self.ctx} vs {other.ctx}")
            return other
        return PolyScalar.const(self.ctx, other)

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not o.terms:
            return self
        if not self.terms:
            return o
        out = dict(self.terms)
        for k, c in o.terms.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v.is_zero():
                    del out[k]
                else:
                    out[k] = v
        return PolyScalar(self.ctx, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return PolyScalar(self.ctx, {k: -c for k, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (GaussRational, int, Fraction)):
            c = GaussRational.coerce(other)
            if c.is_zero():
                return PolyScalar.zero(self.ctx)
            return PolyScalar(self.ctx, {k: v * c for k, v in self.terms.items()}, _trusted=True)
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not self.terms or not o.terms:
            return PolyScalar.zero(self.ctx)
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in o.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                v = out.get(k)
                out[k] = c1 * c2 if v is None else v + c1 * c2
        return PolyScalar(self.ctx, {k: v for k, v in out.items() if not v.is_zero()},
                          _trusted=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a nonzero constant only."""
        if isinstance(other, PolyScalar):
            if other.ctx != self.ctx:
                raise ContextMismatchError("context mismatch")
            other = other.constant_value()
        c = GaussRational.coerce(other)
        return self * c.inverse()

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = PolyScalar.one(self.ctx)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, PolyScalar):
            return self.ctx == other.ctx and self.terms == other.terms
        try:
            return self.terms == PolyScalar.const(self.ctx, other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.ctx, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def conjugate(self) -> "PolyScalar":
        """Complex conjugation, taking real coordinates to themselves.

        ``E[m]`` goes to ``E[-m]`` and ``varpi`` to ``-varpi``.
        """
        n = self.ctx.n
        out = {}
        for k, c in self.terms.items():
            nk = k[:2 * n] + tuple(-m for m in k[2 * n:3 * n]) + (k[-1],)
            c = c.conjugate()
            if k[-1] % 2:
                c = -c
            out[nk] = c
        return PolyScalar(self.ctx, out, _trusted=True)

    # calculus
    def partial(self, name: str) -> "PolyScalar":
        """Partial derivative in the named coordinate."""
        idx = self.ctx.index(name)
        n = self.ctx.n
        fiber_slot = idx - n if idx >= n else None
        out: dict = {}

        def put(key, c):
            v = out.get(key)
            out[key] = c if v is None else v + c

        for k, c in self.terms.items():
            e = k[idx]
            if e:
                nk = list(k)
                nk[idx] = e - 1
                put(tuple(nk), c * e)
            if fiber_slot is not None:
                m = k[2 * n + fiber_slot]
                if m:
                    nk = list(k)
                    nk[-1] += 1
                    put(tuple(nk), c * m)
        return PolyScalar(self.ctx, {k: v for k, v in out.items() if not v.is_zero()},
                          _trusted=True)

    def evaluate(self, point: Mapping[str, object]) -> GaussRational:
        """Exact value at a point.

        A variable must be assigned whenever it occurs.  A mode term is
        evaluable only when ``m.xi`` is an integer, where it equals one.
        Terms carrying ``varpi`` are never evaluable.
        """
        n = self.ctx.n
        names = self.ctx.names
        vals = {k: GaussRational.coerce(v) for k, v in point.items()}
        total = ZERO
        for k, c in self.terms.items():
            if k[-1]:
                raise EvaluationError("varpi has no exact value")
            term = c
            for idx in range(2 * n):
                if k[idx]:
                    if names[idx] not in vals:
                        raise EvaluationError(f"unassigned variable {names[idx]}")
                    term = term * vals[names[idx]] ** k[idx]
            modes = k[2 * n:3 * n]
            if any(modes):
                phase = Fraction(0)
                for j, m in enumerate(modes):
                    if not m:
                        continue
                    name = names[n + j]
                    if name not in vals:
                        raise EvaluationError(f"unassigned variable {name}")
                    v = vals[name]
                    if not v.is_real():
                        raise EvaluationError("fiber coordinate must be real to evaluate a mode")
                    phase += m * v.re
                if phase.denominator != 1:
                    raise EvaluationError("mode phase is not an integer")
            total = total + term
        return total

    def substitute(self, values: Mapping[str, object]) -> "PolyScalar":
        """Substitute constants for some base or fiber variables.

        Only variables without modes attached may be substituted when they
        are fiber coordinates carrying modes.
        """
        n = self.ctx.n
        idxs = {self.ctx.index(name): GaussRational.coerce(v) for name, v in values.items()}
        out = PolyScalar.zero(self.ctx)
        acc: dict = {}
        for k, c in self.terms.items():
            nk = list(k)
            for idx, v in idxs.items():
                e = k[idx]
                if e:
                    c = c * v ** e
                    nk[idx] = 0
                if idx >= n and k[2 * n + idx - n]:
                    raise EvaluationError("cannot substitute a fiber coordinate carrying modes")
            if not c.is_zero():
                key = tuple(nk)
                acc[key] = acc.get(key, ZERO) + c
        out = PolyScalar(self.ctx, acc)
        return out

    # ordering and serialization
    def sorted_terms(self) -> list[tuple[tuple, GaussRational]]:
        """Terms in canonical graded-lex order (highest first)."""
        n2 = 2 * self.ctx.n

        def key(item):
            k = item[0]
            return (sum(k[:n2]), k[:n2], k[n2:-1], k[-1])

        return sorted(self.terms.items(), key=key, reverse=True)

    def leading_key(self) -> tuple:
        return self.sorted_terms()[0][0]

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"PolyScalar({format_poly(self)!r}, n={self.ctx.n})"


def monomial_string(ctx: Context, key: tuple) -> str:
    n = ctx.n
    names = ctx.names
    parts = []
    for idx in range(2 * n):
        e = key[idx]
        if e == 1:
            parts.append(names[idx])
        elif e > 1:
            parts.append(f"{names[idx]}^{e}")
    if key[-1] == 1:
        parts.append("varpi")
    elif key[-1] > 1:
        parts.append(f"varpi^{key[-1]}")
    modes = key[2 * n:3 * n]
    if any(modes):
        parts.append("E[" + ",".join(str(m) for m in modes) + "]")
    return "*".join(parts)


def _split_sign(c: GaussRational) -> tuple[bool, GaussRational]:
    negative = c.re < 0 or (c.re == 0 and c.im < 0)
    return negative, (-c if negative else c)


def format_terms(pieces: list[tuple[GaussRational, str]]) -> str:
    """Join signed ``coefficient * monomial`` pieces canonically."""
    if not pieces:
        return "0"
    out = []
    for pos, (c, mono) in enumerate(pieces):
        negative, c = _split_sign(c)
        if c == ONE and mono:
            body = mono
        elif c == ONE:
            body = "1"
        else:
            body = f"({c})" + (f"*{mono}" if mono else "")
        if pos == 0:
            out.append(("-" if negative else "") + body)
        else:
            out.append((" - " if negative else " + ") + body)
    return "".join(out)


def format_poly(p: PolyScalar) -> str:
    return format_terms([(c, monomial_string(p.ctx, k)) for k, c in p.sorted_terms()])


def exact_divide(a: PolyScalar, b: PolyScalar) -> PolyScalar | None:
    """Return ``q`` with ``a == q*b`` if one exists, else None.

    Multivariate long division in graded-lex order; fiber modes act as
    invertible monomials.
    """
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    ctx = a.ctx
    n2 = 2 * ctx.n
    lk, lc = b.sorted_terms()[0]
    q = PolyScalar.zero(ctx)
    r = a
    steps = 0
    limit = 4 * (len(a.terms) + 1) * (len(b.terms) + 1) + 64
    while not r.is_zero():
        steps += 1
        if steps > limit:
            return None
        rk, rc = r.sorted_terms()[0]
        diff = tuple(x - y for x, y in zip(rk, lk))
        if any(d < 0 for d in diff[:n2]) or diff[-1] < 0:
            return None
        t = PolyScalar(ctx, {diff: rc / lc}, _trusted=True)
        q = q + t
        r = r - t * b
    return q


def _cancel(num: PolyScalar, den: PolyScalar) -> tuple[PolyScalar, PolyScalar]:
    """Drop ``den`` against ``num`` when one divides the other."""
    if den.is_constant():
        return num, den
    q = exact_divide(num, den)
    if q is not None:
        return q, PolyScalar.one(num.ctx)
    q = exact_divide(den, num)
    if q is not None:
        return PolyScalar.one(num.ctx), q
    return num, den


class RationalFunction:
    """Element of the fraction field of PolyScalar.

    No gcd is taken; equality is by cross-multiplication.  Exact polynomial
    division is attempted to keep denominators small.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: PolyScalar, den: PolyScalar | None = None):
        if den is None:
            den = PolyScalar.one(num.ctx)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = PolyScalar.one(num.ctx)
        elif den.is_constant():
            num = num / den.constant_value()
            den = PolyScalar.one(num.ctx)
        else:
            q = exact_divide(num, den)
            if q is not None:
                num, den = q, PolyScalar.one(num.ctx)
            else:
                lc = den.sorted_terms()[0][1]
                if lc != ONE:
                    num, den = num / lc, den / lc
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @property
    def ctx(self) -> Context:
        return self.num.ctx

    @classmethod
    def coerce(cls, x, ctx: Context | None = None) -> "RationalFunction":
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, PolyScalar):
            return cls(x)
        if ctx is None:
            raise TypeError("need a context to coerce a constant")
        return cls(PolyScalar.const(ctx, x))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def to_poly(self) -> PolyScalar:
        if not self.den.is_constant():
            q = exact_divide(self.num, self.den)
            if q is None:
                raise ValueError("not a polynomial")
            return q
        return self.num / self.den.constant_value()

    def _c(self, other) -> "RationalFunction":
        return RationalFunction.coerce(other, self.ctx)

    def __add__(self, other):
        o = self._c(other)
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        if o.den.is_constant() or self.den.is_constant():
            return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)
        # a common denominator when one divides the other
        q = exact_divide(o.den, self.den)
        if q is not None:
            return RationalFunction(self.num * q + o.num, o.den)
        q = exact_divide(self.den, o.den)
        if q is not None:
            return RationalFunction(self.num + o.num * q, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._c(other))

    def __rsub__(self, other):
        return self._c(other) - self

    def __mul__(self, other):
        o = self._c(other)
        if self.is_zero() or o.is_zero():
            return RationalFunction(PolyScalar.zero(self.ctx))
        a, da = _cancel(self.num, o.den)
        b, db = _cancel(o.num, self.den)
        return RationalFunction(a * b, da * db)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        return self * self._c(other).inverse()

    def __rtruediv__(self, other):
        return self._c(other) * self.inverse()

    def __eq__(self, other):
        try:
            o = self._c(other)
        except TypeError:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        raise TypeError("RationalFunction is not hashable")

    def evaluate(self, point) -> GaussRational:
        d = self.den.evaluate(point)
        if d.is_zero():
            raise EvaluationError("denominator vanishes at the point")
        return self.num.evaluate(point) / d

    def partial(self, name: str) -> "RationalFunction":
        return RationalFunction(self.num.partial(name) * self.den - self.num * self.den.partial(name),
                                self.den * self.den)

    def __str__(self):
        if self.den.is_constant():
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__
