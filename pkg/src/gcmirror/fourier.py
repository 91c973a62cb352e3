"""Fourier-Mukai transforms on forms: the fiberwise vector-bundle transform and the torus-bundle version.

Fiberwise, everything lives in one exterior algebra over the generators
``f1..fn`` (the dual frame of V), ``dx1..dxn``, ``e1..en`` (the frame of V)
and ``px1..pxn``.  The kernel is ``kappa = sum_i e_i ^ f_i`` and the
projection keeps terms containing ``f1^...^fn``, read off after moving that
block to the right end.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .exterior import Generator, GeneratorSet, GradedElement, contract, exp_graded
from .gcs import GCStructure, proportional, pure_spinor
from .scalar import Context, GaussRational, PolyScalar
from .semiflat import AdaptedBlocks, mirror


class FiberDependenceError(ValueError):
    pass


# -- generator sets ----------------------------------------------------------

@lru_cache(maxsize=None)
def mixed_generators(n: int) -> GeneratorSet:
    """f1..fn, dx1..dxn (covectors) followed by e1..en, px1..pxn (vectors)."""
    gens = [Generator(f"f{k}", "covector", f"e{k}") for k in range(1, n + 1)]
    gens += [Generator(f"dx{k}", "covector", f"px{k}", f"x{k}") for k in range(1, n + 1)]
    gens += [Generator(f"e{k}", "vector", f"f{k}") for k in range(1, n + 1)]
    gens += [Generator(f"px{k}", "vector", f"dx{k}", f"x{k}") for k in range(1, n + 1)]
    return GeneratorSet(tuple(gens))


@lru_cache(maxsize=None)
def mirror_form_generators(n: int) -> GeneratorSet:
    """Spinor generators for a structure on the dual side: e1..en, dx1..dxn as covectors."""
    gens = [Generator(f"e{k}", "covector", f"f{k}") for k in range(1, n + 1)]
    gens += [Generator(f"dx{k}", "covector", f"px{k}", f"x{k}") for k in range(1, n + 1)]
    gens += [Generator(f"f{k}", "vector", f"e{k}") for k in range(1, n + 1)]
    gens += [Generator(f"px{k}", "vector", f"dx{k}", f"x{k}") for k in range(1, n + 1)]
    return GeneratorSet(tuple(gens))


def _names(gens: GeneratorSet, prefix: str) -> list[int]:
    return [k for k, g in enumerate(gens.gens) if g.name.startswith(prefix) and g.name[len(prefix):].isdigit()]


def kappa(ctx: Context) -> GradedElement:
    """The canonical element sum_i e_i ^ f_i."""
    gens = mixed_generators(ctx.n)
    out = GradedElement.zero(gens, ctx)
    for k in range(1, ctx.n + 1):
        out = out + GradedElement.monomial(gens, ctx, [f"e{k}", f"f{k}"])
    return out


def _sign_to_right(key: tuple, block: Sequence[int]) -> tuple[int, tuple]:
    """Sign for rewriting the ascending monomial ``key`` as (rest) ^ (block in order)."""
    bset = set(block)
    rest = tuple(k for k in key if k not in bset)
    seq = list(rest) + list(block)
    pos = {g: i for i, g in enumerate(key)}
    perm = [pos[g] for g in seq]
    inv = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
    return (-1 if inv % 2 else 1), rest


def integrate(a: GradedElement, block: Sequence[int]) -> GradedElement:
    """Keep the terms containing every generator of ``block``, moved to the right, and drop it."""
    bset = set(block)
    out = GradedElement.zero(a.gens, a.ctx)
    terms = {}
    for key, c in a.terms.items():
        if not bset <= set(key):
            continue
        sign, rest = _sign_to_right(key, block)
        terms[rest] = terms.get(rest, PolyScalar.zero(a.ctx)) + (c if sign > 0 else -c)
    return out + GradedElement(a.gens, a.ctx, terms)


def _require_base(phi: GradedElement):
    for c in phi.terms.values():
        if c.has_modes() or any(v in c.ctx.fiber_names for v in c.variables()):
            raise FiberDependenceError("coefficients must be pulled back from the base")


def ft_vector_bundle(phi: GradedElement, trivialization=1) -> GradedElement:
    """phi -> t * integral(phi ^ exp(kappa)) over the top power of V dual.

    Input terms use ``f*`` and ``dx*``; output terms use ``e*`` and ``dx*``.
    """
    gens = mixed_generators(phi.ctx.n)
    if phi.gens != gens:
        raise ValueError("input must live in the mixed generator set")
    if any(gens.gens[k].name[0] in "ep" for key in phi.terms for k in key):
        raise ValueError("input must be a form in f* and dx*")
    _require_base(phi)
    t = trivialization if isinstance(trivialization, PolyScalar) else PolyScalar.const(phi.ctx, trivialization)
    if t.is_zero():
        raise ValueError("trivialization must be nonzero")
    top = _names(gens, "f")
    return integrate(phi.wedge(exp_graded(kappa(phi.ctx))), top).scale(t)


def ft_inverse(psi: GradedElement, trivialization=1) -> GradedElement:
    """The transform back: kernel exp(sum_i f_i ^ e_i), integrating over e1^...^en."""
    gens = mixed_generators(psi.ctx.n)
    ctx = psi.ctx
    back = GradedElement.zero(gens, ctx)
    for k in range(1, ctx.n + 1):
        back = back + GradedElement.monomial(gens, ctx, [f"f{k}", f"e{k}"])
    t = trivialization if isinstance(trivialization, PolyScalar) else PolyScalar.const(ctx, trivialization)
    out = integrate(psi.wedge(exp_graded(back)), _names(gens, "e"))
    return out.scale(PolyScalar.const(ctx, t.constant_value().inverse()))


def round_trip_sign(n: int) -> int:
    """ft_inverse(ft_vector_bundle(phi)) = sign * phi, independent of the degree of phi."""
    return -1 if (n * (n - 1) // 2) % 2 else 1


# -- the four identities -----------------------------------------------------

def _vec(ctx: Context, prefix: str, coeffs: Sequence) -> GradedElement:
    gens = mixed_generators(ctx.n)
    return GradedElement.combination(gens, ctx, {f"{prefix}{k + 1}": c for k, c in enumerate(coeffs)})


@dataclass(frozen=True)
class IdentityReport:
    results: dict

    def ok(self) -> bool:
        return all(self.results.values())


def ft_identities_check(zeta: GradedElement, v: Sequence, w: Sequence, alpha: Sequence,
                        beta: Sequence, trivialization=1) -> IdentityReport:
    """(i) iota_v <-> v^, (ii) iota_w commutes, (iii) alpha^ <-> iota_alpha, (iv) beta^ commutes."""
    ctx = zeta.ctx
    V, W, A, B = _vec(ctx, "e", v), _vec(ctx, "px", w), _vec(ctx, "f", alpha), _vec(ctx, "dx", beta)
    ft = lambda z: ft_vector_bundle(z, trivialization)
    image = ft(zeta)
    return IdentityReport({
        "(i)": ft(contract(V, zeta)) == V.wedge(image),
        "(ii)": ft(contract(W, zeta)) == contract(W, image),
        "(iii)": ft(A.wedge(zeta)) == contract(A, image),
        "(iv)": ft(B.wedge(zeta)) == B.wedge(image),
    })


# -- spinor lines ------------------------------------------------------------

def structure_spinor(b: AdaptedBlocks) -> GradedElement:
    """Pure spinor of the assembled structure on V + T_M, in f* and dx*."""
    J = GCStructure.from_full(b.ctx, b.assemble())
    return pure_spinor(J, mixed_generators(b.n))


def mirror_spinor(b: AdaptedBlocks) -> GradedElement:
    """Pure spinor of the mirror structure on V-dual + T_M, relabeled into e* and dx*."""
    mb = mirror(b)
    K = GCStructure.from_full(b.ctx, mb.assemble())
    phi = pure_spinor(K, mirror_form_generators(b.n))
    return phi.relabel(mixed_generators(b.n), {})


def spinor_equations(b: AdaptedBlocks, psi: GradedElement) -> dict[str, bool]:
    """The equations defining the mirror line for the +i convention, one entry per frame element.

    ``iota_{-i J13 v} psi + (v + i J31^T v) ^ psi = 0`` for v = e_j and
    ``iota_{alpha + i J22^T alpha} psi + (i J12^T alpha) ^ psi = 0`` for alpha = f_j.
    These cut out the complex conjugate of the line spanned by ``mirror_spinor``.
    """
    ctx, n = b.ctx, b.n
    I = GaussRational(0, 1)
    out = {}
    for j in range(n):
        ej = [PolyScalar.zero(ctx)] * n
        ej[j] = PolyScalar.one(ctx)
        w = _vec(ctx, "px", [-(b.J13[r, j] * I) for r in range(n)])
        form = _vec(ctx, "e", ej) + _vec(ctx, "dx", [b.J31[j, r] * I for r in range(n)])
        res = (contract(w, psi) if not w.is_zero() else GradedElement.zero(psi.gens, ctx)) + form.wedge(psi)
        out[f"v=e{j + 1}"] = res.is_zero()
    for j in range(n):
        fj = [PolyScalar.zero(ctx)] * n
        fj[j] = PolyScalar.one(ctx)
        vec = _vec(ctx, "f", fj) + _vec(ctx, "px", [b.J22[j, r] * I for r in range(n)])
        form = _vec(ctx, "dx", [b.J12[j, r] * I for r in range(n)])
        res = contract(vec, psi) + (form.wedge(psi) if not form.is_zero() else GradedElement.zero(psi.gens, ctx))
        out[f"alpha=f{j + 1}"] = res.is_zero()
    return out


def spinor_mirror_check(b: AdaptedBlocks, trivialization=1) -> bool:
    """Whether the transform of the spinor of b spans the spinor line of the mirror."""
    if not b.is_constant():
        raise ValueError("the fiberwise statement needs constant blocks")
    image = ft_vector_bundle(structure_spinor(b), trivialization)
    return proportional(image, mirror_spinor(b)) is not None


# -- torus bundles -----------------------------------------------------------

@lru_cache(maxsize=None)
def torus_generators(n: int) -> GeneratorSet:
    """dx*, dxi* (source chart) and deta* (dual fiber) as covectors."""
    gens = [Generator(f"dx{k}", "covector", None, f"x{k}") for k in range(1, n + 1)]
    gens += [Generator(f"dxi{k}", "covector", None, f"xi{k}") for k in range(1, n + 1)]
    gens += [Generator(f"deta{k}", "covector", None, None) for k in range(1, n + 1)]
    return GeneratorSet(tuple(gens))


@lru_cache(maxsize=None)
def dual_chart_generators(n: int) -> GeneratorSet:
    """dx*, deta*: forms on the dual torus bundle (coefficients on the base)."""
    gens = [Generator(f"dx{k}", "covector", None, f"x{k}") for k in range(1, n + 1)]
    gens += [Generator(f"deta{k}", "covector", None, None) for k in range(1, n + 1)]
    return GeneratorSet(tuple(gens))


def source_form(phi: GradedElement) -> GradedElement:
    """Move a form on the (x, xi) chart into the torus generator set."""
    return phi.relabel(torus_generators(phi.ctx.n), {})


def mode_zero(c: PolyScalar) -> PolyScalar:
    """Fiber average: the zero mode, with volume normalized to one."""
    n = c.ctx.n
    out = {}
    for key, v in c.terms.items():
        if any(key[n:2 * n]):
            raise FiberDependenceError("coefficients may depend on the fiber only through Fourier modes")
        if not any(key[2 * n:3 * n]):
            out[key] = v
    return PolyScalar(c.ctx, out, _trusted=True)


def ft_torus(mu: GradedElement) -> GradedElement:
    """Wedge with exp(sum dxi_i ^ deta_i), integrate over the fiber torus.

    The integral takes the zero mode of the coefficient of dxi1^...^dxin
    after moving that block to the right end, with fiber orientation sign
    (-1)^n.  This commutes with d and sends exp(f dxi1^dx1) to deta1 + f dx1.
    """
    ctx = mu.ctx
    n = ctx.n
    tg = torus_generators(n)
    if mu.gens != tg:
        mu = source_form(mu)
    if any(tg.gens[k].name.startswith("deta") for key in mu.terms for k in key):
        raise ValueError("input must be a form on the (x, xi) chart")
    xi = GradedElement.zero(tg, ctx)
    for k in range(1, n + 1):
        xi = xi + GradedElement.monomial(tg, ctx, [f"dxi{k}", f"deta{k}"])
    block = _names(tg, "dxi")
    integrated = integrate(mu.wedge(exp_graded(xi)), block)
    orientation = -1 if n % 2 else 1
    out = GradedElement.zero(dual_chart_generators(n), ctx)
    terms = {}
    for key, c in integrated.terms.items():
        c = mode_zero(c)
        if c.is_zero():
            continue
        terms[key] = c if orientation > 0 else -c
    return out + GradedElement(tg, ctx, terms).relabel(dual_chart_generators(n), {})


def ft_torus_local(mu: GradedElement) -> GradedElement:
    """Term-by-term signed formula: theta ^ dxi_J -> (-1)^n (-1)^(k1+...+k_{n-b}) theta ^ deta_K.

    K is the complement of J (1-based indices) and the coefficient is replaced
    by its zero mode.
    """
    ctx = mu.ctx
    n = ctx.n
    tg = torus_generators(n)
    if mu.gens != tg:
        mu = source_form(mu)
    dxi = _names(tg, "dxi")
    dg = dual_chart_generators(n)
    out = GradedElement.zero(dg, ctx)
    for key, c in mu.terms.items():
        c = mode_zero(c)
        if c.is_zero():
            continue
        J = [k for k in key if k in dxi]
        theta = [tg.gens[k].name for k in key if k not in dxi]
        K = [j for j in range(1, n + 1) if dxi[j - 1] not in J]
        sign = (-1) ** (n + sum(K))
        names = theta + [f"deta{k}" for k in K]
        out = out + GradedElement.monomial(dg, ctx, names, c if sign > 0 else -c)
    return out
