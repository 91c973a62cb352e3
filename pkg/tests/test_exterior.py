
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gcmirror.courant import lie_derivative
from gcmirror.exterior import (GeneratorMismatchError, GeneratorSet, GradedElement, chart_forms, clifford_act,
                               contract, contract_multivector, de_rham_d, exp_graded, format_form, parse_form)
from gcmirror.gcs import form_generators
from gcmirror.scalar import Context

from oracles import derivation_contract, exp_series, wedge_oracle
from strategies import forms, polys

C2 = Context(2)
C3 = Context(3)
P2 = Context(2, periodic=True)
XY = GeneratorSet.frames([("px", "dx"), ("py", "dy"), ("pz", "dz")], ["x1", "x2", "x3"])
CHART = chart_forms(C3, fiber=False, vectors=True)
PCHART = chart_forms(P2, fiber=True, vectors=True)


def F(text, gens=XY, ctx=C3):
    return parse_form(text, gens, ctx)


class TestGenerators:
    def test_unique_names(self):
        with pytest.raises(ValueError):
            GeneratorSet.frames([("e1", "f1"), ("e1", "f2")])

    def test_pairing_is_bijection(self):
        g = form_generators(2)
        assert g.partner_index(g.index("f1")) == g.index("e1")


class TestWedge:
    def test_alternation(self):
        assert F("dx").wedge(F("dx")).is_zero()

    def test_antisymmetry(self):
        assert F("dx").wedge(F("dy")) == -(F("dy").wedge(F("dx")))

    def test_distributivity_oracle(self):
        a, b = F("1 + dx"), F("1 + dy")
        assert a.wedge(b).terms == wedge_oracle(a, b)
        assert a.wedge(b) == F("1 + dx + dy + dx^dy")

    def test_generator_set_mismatch(self):
        with pytest.raises(GeneratorMismatchError):
            F("dx").wedge(GradedElement.scalar(form_generators(3), C3, 1))

    @given(forms(CHART, C3), forms(CHART, C3))
    def test_matches_oracle(self, a, b):
        assert a.wedge(b).terms == wedge_oracle(a, b)

    @given(forms(CHART, C3), forms(CHART, C3), forms(CHART, C3))
    def test_associative(self, a, b, c):
        assert (a ^ b) ^ c == a ^ (b ^ c)

    @given(forms(CHART, C3), forms(CHART, C3), st.integers(0, 3), st.integers(0, 3))
    def test_koszul_sign(self, a, b, p, q):
        a, b = a.part(p), b.part(q)
        assert a ^ b == (b ^ a).scale(-1 if p * q % 2 else 1)


class TestContract:
    def test_leading_slot(self):
        assert contract(F("px"), F("dx^dy")) == F("dy")

    def test_unpaired(self):
        assert contract(F("px"), F("dy")).is_zero()

    def test_derivation_oracle(self):
        a = F("x1*dx^dy + dy^dz")
        got = contract(F("px"), a)
        assert got.terms == derivation_contract(XY.index("dx"), a.terms)
        assert got == F("x1*dy")

    def test_needs_partner(self):
        g = chart_forms(C2, fiber=False, vectors=False)
        with pytest.raises(ValueError):
            contract(GradedElement.generator(g, C2, "dx1"), GradedElement.generator(g, C2, "dx2"))

    @given(forms(CHART, C3), forms(CHART, C3), st.sampled_from(["px1", "px2", "px3"]))
    def test_graded_derivation(self, a, b, v):
        u = GradedElement.generator(CHART, C3, v)
        for p in range(4):
            ap = a.part(p)
            lhs = contract(u, ap ^ b)
            rhs = (contract(u, ap) ^ b) + (ap ^ contract(u, b)).scale(-1 if p % 2 else 1)
            assert lhs == rhs

    @given(forms(CHART, C3), st.sampled_from(["px1", "px2", "px3"]))
    def test_square_is_zero(self, a, v):
        u = GradedElement.generator(CHART, C3, v)
        assert contract(u, contract(u, a)).is_zero()

    def test_multivector_order(self):
        # iota_{px ^ py} = iota_py o iota_px
        biv = F("px^py")
        assert contract_multivector(biv, F("dx^dy")) == contract(F("py"), contract(F("px"), F("dx^dy")))
        assert contract_multivector(biv, F("dx^dy")) == F("1")


class TestExp:
    def test_nilpotent(self):
        assert exp_graded(F("dx^dy")) == F("1 + dx^dy")

    def test_symplectic_spinor(self):
        assert exp_graded(F("-i*dx^dy")) == F("1 - i*dx^dy")

    def test_series_oracle(self):
        g = chart_forms(Context(4), fiber=False)
        c = Context(4)
        b = parse_form("dx1^dx2 + dx3^dx4", g, c)
        expected = GradedElement.scalar(g, c, 1) + exp_series(lambda p, q: p ^ q, b, 4)
        assert exp_graded(b) == expected
        assert exp_graded(b) == parse_form("1 + dx1^dx2 + dx3^dx4 + dx1^dx2^dx3^dx4", g, c)

    def test_rejects_other_degrees(self):
        with pytest.raises(ValueError):
            exp_graded(F("dx"))


class TestClifford:
    def test_vector_on_dx(self):
        assert clifford_act(F("px"), F("0"), F("dx")) == F("1")

    def test_form_on_one(self):
        assert clifford_act(F("0"), F("dx"), F("1")) == F("dx")

    @given(forms(CHART, C3))
    def test_double_application(self, phi):
        # u.u = alpha(v) with the unnormalized evaluation pairing
        v, alpha = GradedElement.generator(CHART, C3, "px1"), GradedElement.generator(CHART, C3, "dx1")
        once = clifford_act(v, alpha, phi)
        assert clifford_act(v, alpha, once) == phi


class TestDeRham:
    def test_examples(self):
        assert de_rham_d(F("x1*dy")) == F("dx^dy")
        assert de_rham_d(F("dx^dy")).is_zero()

    def test_nonclosed_two_form(self):
        g = chart_forms(C3, fiber=False)
        b = parse_form("x3*dx1^dx2", g, C3)
        assert de_rham_d(b) == parse_form("dx3^dx1^dx2", g, C3)
        assert not de_rham_d(b).is_zero()

    def test_mode_coefficient(self):
        phi = parse_form("E[1,0]*dx1", PCHART, P2)
        assert de_rham_d(phi) == parse_form("varpi*E[1,0]*dxi1^dx1", PCHART, P2)

    @given(forms(PCHART, P2, modes=True, max_degree=2))
    def test_d_squared(self, phi):
        assert de_rham_d(de_rham_d(phi)).is_zero()

    @given(forms(CHART, C3, max_degree=2), forms(CHART, C3, max_degree=2))
    def test_leibniz(self, a, b):
        for p in range(4):
            ap = a.part(p)
            sign = -1 if p % 2 else 1
            assert de_rham_d(ap ^ b) == (de_rham_d(ap) ^ b) + (ap ^ de_rham_d(b)).scale(sign)

    @given(st.lists(polys(C3, max_degree=2), min_size=3, max_size=3),
           st.lists(polys(C3, max_degree=2), min_size=3, max_size=3))
    def test_cartan_formula_matches_lie_derivative(self, X, eta):
        coords = C3.base_names
        vec = GradedElement.combination(CHART, C3, {f"p{c}": a for c, a in zip(coords, X)})
        one = GradedElement.combination(CHART, C3, {f"d{c}": a for c, a in zip(coords, eta)})
        cartan = contract(vec, de_rham_d(one)) + de_rham_d(contract(vec, one))
        lie = lie_derivative(X, eta, coords)
        assert cartan == GradedElement.combination(CHART, C3, {f"d{c}": a for c, a in zip(coords, lie)})


class TestFormat:
    def test_round_trip(self):
        a = F("(1/2)*x1*dx^dy + dz - i")
        assert F(format_form(a)) == a

    @given(forms(PCHART, P2, modes=True))
    def test_round_trip_random(self, a):
        assert parse_form(format_form(a), PCHART, P2) == a
