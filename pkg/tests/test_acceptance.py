"""The thirteen acceptance criteria, each an exact check over a fixed seeded population.

Every test records one PASS/FAIL line in RESULTS; the lines are printed as
the tests run and again in the terminal summary.  Run this file directly to
get just those lines.
"""

import random
from fractions import Fraction
from itertools import combinations

from gcmirror.courant import integrability_by_nijenhuis
from gcmirror.exterior import GradedElement, exp_graded, format_form, parse_form
from gcmirror.fourier import ft_identities_check, ft_torus, mixed_generators, spinor_mirror_check, torus_generators
from gcmirror.gcs import b_transform, beta_transform, from_complex, from_symplectic, tau_dual, validate_gcs
from gcmirror.generators import antisymmetric, poly, random_adapted, random_kahler, random_semiflat_gk, \
    standard_complex, unimodular
from gcmirror.kahler import GKPair, buscher_check, buscher_transform, compatibility_conditions, \
    extract_metric_data, g_blocks_semiflat, is_lagrangian, j_compliment, k_inverse_check, validate_gk
from gcmirror.linalg import identity, inverse, poly_matrix, to_rational, zeros
from gcmirror.scalar import Context
from gcmirror.semiflat import (AdaptedBlocks, BraneDatum, b_complex_family, b_symplectic_family, brane_check,
                               brane_mirror, complex_family, dirac_structures, field_transform,
                               integrability_semiflat, lift_to_total_space, mirror, symplectic_family, transverse,
                               two_form_matrix, validate_adapted)

RESULTS = {}


def record(number, name, ok, note=""):
    line = f"criterion {number:>2} {name}: {'PASS' if ok else 'FAIL'}" + (f" ({note})" if note and not ok else "")
    RESULTS[number] = line
    print(line)
    assert ok, line


C1, C2, C3 = Context(1), Context(2), Context(3)
CONTEXTS = {1: C1, 2: C2, 3: C3}


# -- 1 -----------------------------------------------------------------------

def random_structure(rng, n):
    """A chain of the five constructors with entries of degree at most two."""
    ctx, m = CONTEXTS[n], 2 * n
    while True:
        A = unimodular(rng, ctx, m)
        if rng.random() < 0.5:
            J = from_complex(A @ standard_complex(ctx, m) @ inverse(A))
        else:
            J = from_symplectic(A.T @ standard_complex(ctx, m) @ A)
        for _ in range(rng.randint(1, 3)):
            step = rng.choice(["b", "beta", "tau"])
            if step == "tau":
                J = tau_dual(J)
            else:
                field = antisymmetric(rng, ctx, m, rng.randint(0, 2))
                J = (b_transform if step == "b" else beta_transform)(field, J)
        if all(a.degree() <= 2 for blk in J.blocks() for r in blk.rows for a in r if not a.is_zero()):
            return J


def test_criterion_01_axiom_suite():
    rng = random.Random(101)
    bad = []
    for k in range(500):
        n = (1, 2, 3)[k % 3]
        J = random_structure(rng, n)
        if validate_gcs(J):
            bad.append(k)
    record(1, "axiom suite, 500 structures", not bad, f"failing samples {bad[:5]}")


# -- 2 -----------------------------------------------------------------------

def test_criterion_02_mirror_involution():
    rng = random.Random(102)
    bad = 0
    for k in range(200):
        b = random_adapted(rng, CONTEXTS[(1, 2, 3)[k % 3]])
        mb = mirror(b)
        if validate_adapted(b) or validate_adapted(mb) or mirror(mb) != b:
            bad += 1
    record(2, "mirror involution, 200 blocks", bad == 0, f"{bad} failures")


# -- 3, 6 --------------------------------------------------------------------

def corpus():
    one2 = identity(C2, 2)
    named = [
        ("B' = x1 dx1^dx2", b_complex_family(two_form_matrix(C3, {(0, 1): "x1"})), True),
        ("B' = x3 dx1^dx2", b_complex_family(two_form_matrix(C3, {(0, 1): "x3"})), False),
        ("B31 = 2, B34 = x1", b_symplectic_family(two_form_matrix(C2, {(0, 1): 2}),
                                                  two_form_matrix(C2, {(0, 1): "x1"})), True),
        ("B31 = x1, B34 = 0", b_symplectic_family(two_form_matrix(C2, {(0, 1): "x1"}), zeros(C2, 2)), False),
        ("complex lift", complex_family(one2), True),
        ("symplectic lift", symplectic_family(one2), True),
    ]
    rng = random.Random(103)
    randoms = [(f"random {k}", random_adapted(rng, C2, max_degree=1), None) for k in range(50)]
    return named + randoms


CORPUS = corpus()


def test_criterion_03_integrability_equivalence():
    mismatches = []
    for name, b, expected in CORPUS:
        res = integrability_semiflat(b, first_only=False)
        ok, witnesses = integrability_by_nijenhuis(lift_to_total_space(b), first_only=True)
        same = res.integrable is ok and bool(res.witnesses) is (not res.integrable) and bool(witnesses) is (not ok)
        if expected is not None:
            same = same and res.integrable is expected
        if not same:
            mismatches.append(name)
    record(3, "bracket test agrees with Courant-Nijenhuis", not mismatches, ", ".join(mismatches))


def test_criterion_06_mirror_invariance():
    flips = [name for name, b, _ in CORPUS if bool(integrability_semiflat(b)) != bool(integrability_semiflat(mirror(b)))]
    record(6, "integrability invariant under mirror", not flips, ", ".join(flips))


# -- 4, 5 --------------------------------------------------------------------

def test_criterion_04_b_complex_family():
    closed = integrability_semiflat(b_complex_family(two_form_matrix(C3, {(0, 1): "x1"})))
    open_ = integrability_semiflat(b_complex_family(two_form_matrix(C3, {(0, 1): "x3"})))
    record(4, "B-complex integrable iff B' closed", bool(closed) and not open_)


def test_criterion_05_b_symplectic_family():
    flat = b_symplectic_family(two_form_matrix(C2, {(0, 1): 2}), two_form_matrix(C2, {(0, 1): "x1"}))
    curved = b_symplectic_family(two_form_matrix(C2, {(0, 1): "x1"}), two_form_matrix(C2, {(0, 1): 1}))
    open_b = b_symplectic_family(two_form_matrix(C3, {(0, 1): 1}), two_form_matrix(C3, {(0, 1): "x3"}))
    verdicts = bool(integrability_semiflat(flat)) and not integrability_semiflat(curved) \
        and not integrability_semiflat(open_b)
    # mirror is the B + beta transform of the canonical complex structure
    B31 = two_form_matrix(C2, {(0, 1): "x1 + 2"})
    B34 = two_form_matrix(C2, {(0, 1): "x2"})
    one = identity(C2, 2)
    got = mirror(b_symplectic_family(B31, B34), check=False)
    blocks = got == AdaptedBlocks(C2, one - B31 @ B34, -one, B31, -B34)
    transformed = got == field_transform(field_transform(complex_family(one), "B34", B34), "beta21", B31)
    record(5, "B-symplectic verdicts and mirror blocks", verdicts and blocks and transformed)


# -- 7 -----------------------------------------------------------------------

def random_mixed(rng, ctx):
    gens = mixed_generators(ctx.n)
    covectors = list(range(2 * ctx.n))
    terms = {}
    for _ in range(rng.randint(1, 4)):
        key = tuple(sorted(rng.sample(covectors, rng.randint(0, len(covectors)))))
        terms[key] = poly(rng, ctx, 1, ctx.base_names)
    return GradedElement(gens, ctx, terms)


def test_criterion_07_fourier_identities():
    rng = random.Random(107)
    bad = 0
    for n in (1, 2, 3, 4):
        ctx = Context(n)
        for _ in range(200):
            zeta = random_mixed(rng, ctx)
            frame = lambda: [poly(rng, ctx, 1, ctx.base_names) for _ in range(n)]
            if not ft_identities_check(zeta, frame(), frame(), frame(), frame()).ok():
                bad += 1
    record(7, "transform identities (i)-(iv), 800 elements", bad == 0, f"{bad} failures")


# -- 8 -----------------------------------------------------------------------

def test_criterion_08_spinor_lines():
    rng = random.Random(108)
    bad = 0
    for k in range(50):
        b = random_adapted(rng, CONTEXTS[(1, 2, 3)[k % 3]], max_degree=0, constant=True)
        t = Fraction(rng.choice([-3, -1, 2, 5]), rng.randint(1, 4))
        if not (spinor_mirror_check(b) and spinor_mirror_check(b, t)):
            bad += 1
    record(8, "spinor line carried to the mirror line, 50 blocks", bad == 0, f"{bad} failures")


# -- 9 -----------------------------------------------------------------------

def test_criterion_09_circle_example():
    ctx = Context(1, periodic=True)
    got = []
    for f in ("i", "x1", "1 + i*x1"):
        mu = exp_graded(parse_form(f"({f})*dxi1^dx1", torus_generators(1), ctx))
        got.append(format_form(ft_torus(mu)))
    expected = ["(i)*dx1 + deta1", "x1*dx1 + deta1", "(i)*x1*dx1 + dx1 + deta1"]
    record(9, "circle example strings", got == expected, repr(got))


# -- 10 ----------------------------------------------------------------------

def test_criterion_10_buscher():
    rng = random.Random(110)
    bad = 0
    for _ in range(50):
        b, bp, _ = random_semiflat_gk(rng, C2)
        if not all(buscher_check(g_blocks_semiflat(b, bp)).values()):
            bad += 1
    q = lambda: Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    for _ in range(50):
        a, c, d = q(), q(), q()
        # diagonally dominant at the origin, with linear terms on the diagonal and in B
        h = poly_matrix(C2, [[f"{abs(a) + abs(c) + 1} + ({q()})*x1 + ({q()})*x2", str(c)],
                             [str(c), f"{abs(c) + abs(d) + 1} + ({q()})*x2"]])
        beta = f"{q()} + ({q()})*x1 + ({q()})*x2"
        B = poly_matrix(C2, [[0, beta], [f"-({beta})", 0]])
        hh, Bh = buscher_transform(h, B)
        hr, Br = to_rational(h), to_rational(B)
        if not ((hr + Br) @ hh @ (hr - Br) == hr and (hr + Br) @ Bh @ (hr - Br) == -Br):
            bad += 1
    record(10, "Buscher rules, 50 pairs and 50 (h, B)", bad == 0, f"{bad} failures")


# -- 11 ----------------------------------------------------------------------

def test_criterion_11_foliations():
    rng = random.Random(111)
    bad = []
    for k in range(50):
        J, omega = random_kahler(rng, C2)
        p = GKPair(from_complex(J), from_symplectic(omega))
        checks = k_inverse_check(p, extract_metric_data(p))
        ok = not validate_gk(p) and checks["K+ right inverse"]
        for d in range(5):
            for P in combinations(range(4), d):
                compatible = all(compatibility_conditions(p, P).values())
                ok = ok and compatible == is_lagrangian(omega, P)
                if compatible:
                    Q = j_compliment(p, P)
                    ok = ok and Q.same_for_k_minus
        if not ok:
            bad.append(k)
    record(11, "K+ inverse, K+(P) = K-(P), compatible iff Lagrangian", not bad, f"failing samples {bad[:5]}")


# -- 12 ----------------------------------------------------------------------

def test_criterion_12_branes():
    rng = random.Random(112)
    subsets = [frozenset(s) for d in range(3) for s in combinations(range(2), d)]
    bad = 0
    for _ in range(20):
        b = random_adapted(rng, C2)
        mb = mirror(b)
        for S in subsets:
            for W in subsets:
                d = BraneDatum(S, W)
                if brane_check(b, d) != brane_check(mb, brane_mirror(d, 2)):
                    bad += 1
    record(12, "brane verdicts match under mirror, 20 x 16 data", bad == 0, f"{bad} failures")


# -- 13 ----------------------------------------------------------------------

def test_criterion_13_dirac():
    rng = random.Random(113)
    population = [b for _, b, _ in CORPUS[:6]] + [random_adapted(rng, CONTEXTS[(1, 2, 3)[k % 3]]) for k in range(30)]
    bad = 0
    for b in population:
        delta, delta_hat = dirac_structures(b)
        ok = delta.is_isotropic() and delta_hat.is_isotropic() and transverse(delta, delta_hat)
        ok = ok and dirac_structures(mirror(b)) == (delta_hat, delta)
        if integrability_semiflat(b):
            ok = ok and delta.is_involutive() and delta_hat.is_involutive()
        if not ok:
            bad += 1
    record(13, "Dirac structures isotropic, transverse, exchanged, involutive", bad == 0, f"{bad} failures")


if __name__ == "__main__":
    import sys
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    failed = 0
    for t in tests:
        try:
            t()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
