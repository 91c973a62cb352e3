from fractions import Fraction

import pytest
from hypothesis import given

from gcmirror.exterior import GradedElement, exp_graded
from gcmirror.gcs import (GCStructure, InvalidStructureError, annihilates, b_transform, beta_transform, eigenbundle,
                          form_generators, from_complex, from_symplectic, pairing, proportional, pure_spinor,
                          tau_dual, two_form, validate_gcs)
from gcmirror.generators import antisymmetric, random_gcs, standard_complex, unimodular
from gcmirror.linalg import identity, inverse, poly_matrix, zeros
from gcmirror.scalar import Context, GaussRational, I, PolyScalar

from oracles import inverse_2x2
from strategies import rng_from, seeds

C2 = Context(2)
C3 = Context(3)
C4 = Context(4)
STD = poly_matrix(C2, [[0, -1], [1, 0]])
OMEGA = poly_matrix(C2, [[0, 1], [-1, 0]])
SKEWED = poly_matrix(C2, [[1, -2], [1, -1]])


def const(A):
    return poly_matrix(C2, A)


def constant_gcs(seed, m=2):
    rng = rng_from(seed)
    c = Context(m)
    A = unimodular(rng, c, m)
    J = from_complex(A @ standard_complex(c, m) @ inverse(A)) if rng.random() < 0.5 else \
        from_symplectic(A.T @ standard_complex(c, m) @ A)
    return b_transform(antisymmetric(rng, c, m, 0), J)


def basis_vectors(ctx, m):
    one, z = PolyScalar.one(ctx), PolyScalar.zero(ctx)
    return [[one if i == k else z for i in range(2 * m)] for k in range(2 * m)]


class TestValidate:
    def test_complex_type(self):
        assert validate_gcs(GCStructure(C2, STD, zeros(C2, 2), zeros(C2, 2), -STD.T)) == []

    def test_symplectic_type(self):
        assert validate_gcs(GCStructure(C2, zeros(C2, 2), -inverse(OMEGA), OMEGA, zeros(C2, 2))) == []

    def test_square_plus_one_fails_first_equation(self):
        one = identity(C2, 2)
        failures = validate_gcs(GCStructure(C2, zeros(C2, 2), one, one, zeros(C2, 2)))
        labels = {f.label for f in failures}
        assert "e:1" in labels and "e:4" in labels
        assert failures[0].entry == (0, 0)

    def test_report_names_offending_entry(self):
        bad = GCStructure(C2, SKEWED, zeros(C2, 2), zeros(C2, 2), SKEWED)
        assert {(f.label, f.entry) for f in validate_gcs(bad)} == {("e:5", (0, 0)), ("e:5", (0, 1)), ("e:5", (1, 0)), ("e:5", (1, 1))}

    def test_mismatched_blocks(self):
        with pytest.raises(ValueError):
            GCStructure(C2, STD, zeros(C2, 2), zeros(C2, 3), STD)


class TestConstructors:
    def test_from_complex_blocks(self):
        J = from_complex(STD)
        assert J.blocks() == (STD, zeros(C2, 2), zeros(C2, 2), -STD.T)

    def test_from_symplectic_unit(self):
        J = from_symplectic(OMEGA)
        # frozen from the 2x2 inverse oracle: -omega^-1
        expected = [[-x for x in row] for row in inverse_2x2(0, 1, -1, 0)]
        assert J.J2 == const(expected) == const([[0, 1], [-1, 0]])
        assert J.J3 == OMEGA

    def test_from_symplectic_scaled(self):
        J = from_symplectic(const([[0, 2], [-2, 0]]))
        expected = [[-x for x in row] for row in inverse_2x2(0, 2, -2, 0)]
        assert J.J2 == const(expected) == const([[0, Fraction(1, 2)], [Fraction(-1, 2), 0]])

    def test_rejects_non_complex(self):
        with pytest.raises(InvalidStructureError):
            from_complex(identity(C2, 2))

    def test_rejects_singular(self):
        with pytest.raises(InvalidStructureError):
            from_symplectic(zeros(C2, 2))

    def test_rejects_symmetric(self):
        with pytest.raises(InvalidStructureError):
            from_symplectic(const([[0, 1], [1, 0]]))

    def test_polynomial_symplectic_needs_polynomial_inverse(self):
        with pytest.raises(InvalidStructureError):
            from_symplectic(poly_matrix(C2, [[0, "x1"], ["-x1", 0]]))


class TestTransforms:
    def test_zero_field(self):
        J = from_symplectic(OMEGA)
        assert b_transform(zeros(C2, 2), J) == J
        assert beta_transform(zeros(C2, 2), J) == J

    @given(seeds)
    def test_group_law(self, seed):
        rng = rng_from(seed)
        J = random_gcs(rng, C4, 4)
        B = antisymmetric(rng, C4, 4, 1)
        assert b_transform(-B, b_transform(B, J)) == J
        assert beta_transform(-B, beta_transform(B, J)) == J

    def test_rejects_non_antisymmetric(self):
        with pytest.raises(InvalidStructureError):
            b_transform(identity(C2, 2), from_complex(STD))
        with pytest.raises(InvalidStructureError):
            beta_transform(identity(C2, 2), from_complex(STD))

    def test_tau_on_complex_type(self):
        J = tau_dual(from_complex(STD))
        assert J.blocks() == (-STD.T, zeros(C2, 2), zeros(C2, 2), STD)

    @given(seeds)
    def test_tau_involution_and_field_exchange(self, seed):
        rng = rng_from(seed)
        J = random_gcs(rng, C4, 4)
        B = antisymmetric(rng, C4, 4, 1)
        assert tau_dual(tau_dual(J)) == J
        assert tau_dual(b_transform(B, J)) == beta_transform(B, tau_dual(J))

    @given(seeds)
    def test_outputs_valid_identically(self, seed):
        J = random_gcs(rng_from(seed), C4, 4)
        assert validate_gcs(J) == []
        assert validate_gcs(tau_dual(J)) == []


class TestPairing:
    @given(seeds)
    def test_orthogonality(self, seed):
        J = random_gcs(rng_from(seed), C2, 2)
        basis = basis_vectors(C2, 2)
        images = [J.apply(u) for u in basis]
        for a, ja in zip(basis, images):
            for b, jb in zip(basis, images):
                assert pairing(ja, jb) == pairing(a, b)

    def test_tau_preserves_pairing(self):
        basis = basis_vectors(C2, 2)
        swap = [u[2:] + u[:2] for u in basis]
        for a, sa in zip(basis, swap):
            for b, sb in zip(basis, swap):
                assert pairing(sa, sb) == pairing(a, b)

    def test_normalization(self):
        one, z = GaussRational(1), GaussRational(0)
        assert pairing([one, z, z, z], [z, z, one, z]) == GaussRational(Fraction(-1, 2))


class TestEigenbundle:
    def test_symplectic_dimension(self):
        E = eigenbundle(from_symplectic(OMEGA))
        assert E.dim == 2 and E.is_isotropic() and E.is_transverse_to_conjugate()

    def test_complex_dimension(self):
        E = eigenbundle(from_complex(STD))
        assert E.dim == 2 and E.is_isotropic()

    @given(seeds)
    def test_random_transverse(self, seed):
        E = eigenbundle(constant_gcs(seed, 4))
        assert E.dim == 4 and E.is_isotropic() and E.is_transverse_to_conjugate()

    def test_polynomial_entries_rejected(self):
        B = poly_matrix(C2, [[0, "x1"], ["-x1", 0]])
        J = b_transform(B, from_symplectic(OMEGA))
        assert not J.is_constant()
        with pytest.raises(InvalidStructureError):
            eigenbundle(J)

    def test_invalid_structure_detected(self):
        one = identity(C2, 2)
        with pytest.raises(InvalidStructureError):
            eigenbundle(GCStructure(C2, zeros(C2, 2), one, one, zeros(C2, 2)))


class TestPureSpinor:
    def test_symplectic(self):
        g = form_generators(2)
        expected = exp_graded(two_form(OMEGA, g).scale(-I))
        assert pure_spinor(from_symplectic(OMEGA), g) == expected

    def test_complex(self):
        # frozen output of the 4-dimensional annihilator solve
        g = form_generators(2)
        f1 = GradedElement.generator(g, C2, "f1")
        f2 = GradedElement.generator(g, C2, "f2")
        assert pure_spinor(from_complex(STD), g) == f1 + f2.scale(I)

    def test_b_transform_of_symplectic(self):
        g = form_generators(2)
        B = const([[0, 3], [-3, 0]])
        phi = pure_spinor(b_transform(B, from_symplectic(OMEGA)), g)
        expected = exp_graded(two_form(B, g).scale(-1)) ^ exp_graded(two_form(OMEGA, g).scale(-I))
        assert proportional(phi, expected) is not None

    @given(seeds)
    def test_annihilated_by_eigenbundle(self, seed):
        J = constant_gcs(seed, 4)
        phi = pure_spinor(J)
        assert all(annihilates(u, phi) for u in eigenbundle(J).basis)

    @given(seeds)
    def test_b_transform_spinor(self, seed):
        rng = rng_from(seed)
        J = constant_gcs(seed, 2)
        B = antisymmetric(rng, C2, 2, 0)
        if B.is_zero():
            return
        g = form_generators(2)
        moved = exp_graded(two_form(B, g).scale(-1)) ^ pure_spinor(J, g)
        assert proportional(pure_spinor(b_transform(B, J), g), moved) is not None

    def test_normalized(self):
        phi = pure_spinor(from_symplectic(const([[0, 2], [-2, 0]])))
        assert phi.sorted_terms()[0][1] == PolyScalar.one(C2)
