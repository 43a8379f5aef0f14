"""Isovector family, exact verification, and the bracket algebra."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bssym.exppoly import ExpPoly
from bssym.forms import DiffForm, contract, structural_forms, wedge
from bssym.isovectors import (
    DispersionError,
    Generator,
    Isovector,
    NotInFamilyError,
    SolutionSpec,
    basis_isovector,
    bracket,
    bracket_gh,
    decompose,
    generator_of,
    gh_of,
    in_solution_ideal,
    isovector_from_constants,
    isovector_from_generator,
    pde_defect,
    pretty_combination,
    solution_isovector,
    structure_constants,
    verify_isovector,
)
from bssym.model import make_context

DEFAULT = make_context(Fraction(1, 20), Fraction(1, 25))
ZERO_RATE = make_context(Fraction(0), Fraction(2))

consts = st.fractions(
    min_value=Fraction(-5), max_value=Fraction(5), max_denominator=12
)
const_tuples = st.tuples(consts, consts, consts, consts, consts, consts)
mode_exponents = st.lists(
    st.fractions(min_value=Fraction(-2), max_value=Fraction(2), max_denominator=4),
    min_size=0,
    max_size=2,
    unique=True,
)


def family_member(constants, bs, ctx, name=""):
    modes = SolutionSpec.empty()
    for b in bs:
        modes = modes + SolutionSpec.mode_for(b, ctx)
    return isovector_from_constants(constants, modes, ctx, name=name)


# -- family construction and verification -----------------------------------


def test_basis_isovectors_verify_exactly():
    for i in range(1, 7):
        rep = verify_isovector(basis_isovector(i, DEFAULT), DEFAULT)
        assert rep.passed, f"N{i} failed: {rep.to_json()}"


def test_lambda_is_f_phi_golden_values():
    expected = {
        1: "-49/800*t^2 + 3/4*t*x - 25/2*x^2 + 1/2*t",
        2: "-49/800*t + 3/8*x + 1/4",
        3: "-49/800",
        4: "3/4*t - 25*x",
        5: "3/4",
        6: "1",
    }
    for i, want in expected.items():
        rep = verify_isovector(basis_isovector(i, DEFAULT), DEFAULT)
        assert str(rep.lam) == want


def test_generator_round_trip_on_basis():
    for i in range(1, 7):
        N = basis_isovector(i, DEFAULT)
        gen = generator_of(N)
        assert isovector_from_generator(gen) == N


def test_generator_golden_strings():
    assert str(generator_of(basis_isovector(3, DEFAULT)).F) == "-49/800*phi + B"
    assert str(generator_of(basis_isovector(5, DEFAULT)).F) == "3/4*phi + A"
    assert str(generator_of(basis_isovector(6, DEFAULT)).F) == "phi"


@given(const_tuples, mode_exponents)
def test_family_members_are_isovectors(constants, bs):
    N = family_member(constants, bs, DEFAULT)
    rep = verify_isovector(N, DEFAULT)
    assert rep.passed, rep.to_json()


@given(const_tuples, mode_exponents)
def test_decompose_inverts_construction(constants, bs):
    N = family_member(constants, bs, DEFAULT)
    got_constants, got_modes = decompose(N, DEFAULT)
    assert got_constants == tuple(Fraction(c) for c in constants)
    rebuilt = isovector_from_constants(got_constants, got_modes, DEFAULT)
    assert rebuilt == N


def test_bare_x_translation_decomposes_into_the_family():
    # F = A alone is the x-translation; it sits inside the family with a
    # compensating constant term C6 = -rtilde/sigma2
    N = isovector_from_generator(Generator(c=ExpPoly.var("A"), d=ExpPoly.zero()))
    rep = verify_isovector(N, DEFAULT)
    assert rep.passed
    constants, modes = decompose(N, DEFAULT)
    assert constants == (0, 0, 0, 0, Fraction(1), Fraction(-3, 4))
    assert -Fraction(3, 4) == -DEFAULT.rtilde / DEFAULT.sigma2
    assert modes.is_zero()


def test_x_translation_constants():
    # the pure x-translation (N^x = -1, all else via prolongation)
    zero = Fraction(0)
    N = isovector_from_constants(
        (zero, zero, zero, zero, Fraction(-1), Fraction(3, 4)),
        SolutionSpec.empty(),
        DEFAULT,
    )
    assert str(N.Nx) == "1"
    assert N.Nt.is_zero()
    constants, modes = decompose(N, DEFAULT)
    assert constants == (zero, zero, zero, zero, Fraction(-1), Fraction(3, 4))
    assert modes.is_zero()


def test_verification_needs_correct_multiplier():
    # bare boost candidate F = A t: the contact condition holds but the
    # 2-form condition leaves an exact nonzero remainder
    boost = Generator(c=ExpPoly.var("A") * ExpPoly.var("t"), d=ExpPoly.zero())
    N = isovector_from_generator(boost)
    rep = verify_isovector(N, DEFAULT)
    assert rep.alpha_ok
    assert not rep.certificate.in_ideal
    assert str(rep.certificate.remainder) == "A*dx^dt"
    assert not rep.passed


def test_solution_isovectors_verify():
    for modes in (
        SolutionSpec.single(1, DEFAULT.r, 0),  # discounted bond direction
        SolutionSpec.mode_for(1, DEFAULT),  # the underlying itself
        SolutionSpec.mode_for(2, DEFAULT),
    ):
        N = solution_isovector(modes, DEFAULT)
        rep = verify_isovector(N, DEFAULT)
        assert rep.passed
        assert rep.lam.is_zero()


def test_dispersion_relation_enforced():
    with pytest.raises(DispersionError):
        SolutionSpec.single(1, Fraction(1), Fraction(1)).check_dispersion(DEFAULT)
    # mode_for solves the relation for a; check the zero-rate instance
    spec = SolutionSpec.mode_for(1, ZERO_RATE)
    ((coeff, a, b),) = spec.modes
    assert (b, a) == (1, Fraction(0) - ZERO_RATE.rtilde - ZERO_RATE.sigma2 / 2)


def test_pde_defect_detects_solutions():
    good = SolutionSpec.mode_for(2, DEFAULT).to_exppoly()
    assert pde_defect(good, DEFAULT).is_zero()
    bad = ExpPoly.var("x") * ExpPoly.var("x")
    assert not pde_defect(bad, DEFAULT).is_zero()


def test_in_solution_ideal():
    Nu = solution_isovector(SolutionSpec.mode_for(1, DEFAULT), DEFAULT)
    assert in_solution_ideal(Nu, DEFAULT)
    assert not in_solution_ideal(basis_isovector(5, DEFAULT), DEFAULT)
    # brackets of basis members with solution members stay in the ideal,
    # even when the result is not a pure exponential mode
    N1 = basis_isovector(1, DEFAULT)
    assert in_solution_ideal(bracket(N1, Nu), DEFAULT)


# -- bracket algebra ---------------------------------------------------------


def _basis(ctx):
    return {i: basis_isovector(i, ctx) for i in range(1, 7)}


def test_bracket_golden_relations():
    N = _basis(DEFAULT)
    assert bracket(N[2], N[5]) == Fraction(1, 2) * N[5]
    assert bracket(N[3], N[1]) == Fraction(-2) * N[2]
    assert bracket(N[1], N[2]) == N[1]
    assert bracket(N[4], N[5]) == Fraction(-1) / DEFAULT.sigma2 * N[6]


def test_bracket_antisymmetry_and_jacobi():
    N = _basis(DEFAULT)
    for i, j in itertools.combinations(range(1, 7), 2):
        lhs = bracket(N[i], N[j])
        rhs = bracket(N[j], N[i])
        assert lhs == Fraction(-1) * rhs
    for i, j, k in itertools.combinations(range(1, 7), 3):
        total = (
            bracket(N[i], bracket(N[j], N[k]))
            + bracket(N[j], bracket(N[k], N[i]))
            + bracket(N[k], bracket(N[i], N[j]))
        )
        assert all(c.is_zero() for c in total.components)


def test_structure_constants_table():
    table = structure_constants(DEFAULT)
    expected = {
        (1, 2): ((1, Fraction(1)),),
        (1, 3): ((2, Fraction(2)),),
        (1, 5): ((4, Fraction(1)),),
        (2, 3): ((3, Fraction(1)),),
        (2, 4): ((4, Fraction(-1, 2)),),
        (2, 5): ((5, Fraction(1, 2)),),
        (3, 4): ((5, Fraction(-1)),),
        (4, 5): ((6, Fraction(-25)),),
    }
    for i in range(1, 7):
        for j in range(1, 7):
            if (i, j) in expected:
                assert table[(i, j)] == expected[(i, j)]
            elif (j, i) in expected:
                want = tuple((k, -c) for k, c in expected[(j, i)])
                assert table[(i, j)] == want
            else:
                assert table[(i, j)] == ()


def test_closure_under_bracket():
    # every bracket of basis elements decomposes back into the basis span
    N = _basis(DEFAULT)
    for i in range(1, 7):
        for j in range(1, 7):
            br = bracket(N[i], N[j])
            constants, modes = decompose(br, DEFAULT)
            assert modes.is_zero()


def test_pretty_combination():
    assert pretty_combination(()) == "0"
    assert pretty_combination(((5, Fraction(1, 2)),)) == "1/2 · N5"
    assert pretty_combination(((1, Fraction(1)),)) == "1 · N1"
    assert (
        pretty_combination(((2, Fraction(-1)), (4, Fraction(3))))
        == "-1 · N2 + 3 · N4"
    )


@given(const_tuples, const_tuples)
@settings(max_examples=20)
def test_gh_duality_on_family(cs1, cs2):
    M = family_member(cs1, [], DEFAULT)
    N = family_member(cs2, [], DEFAULT)
    left = gh_of(bracket(M, N))
    right = bracket_gh(M, N)
    assert left.g == right.g
    assert left.h == right.h


def test_gh_split():
    N5 = basis_isovector(5, DEFAULT)
    pair = gh_of(N5)
    assert pair.g.is_zero()
    assert str(pair.h) == "3/4"  # rtilde/sigma2 at the default model
    Nu = solution_isovector(SolutionSpec.mode_for(1, DEFAULT), DEFAULT)
    pair_u = gh_of(Nu)
    assert pair_u.h.is_zero()
    assert pair_u.g == SolutionSpec.mode_for(1, DEFAULT).to_exppoly()


def test_solution_brackets_vanish():
    Nu = solution_isovector(SolutionSpec.mode_for(1, DEFAULT), DEFAULT)
    Nv = solution_isovector(SolutionSpec.mode_for(2, DEFAULT), DEFAULT)
    br = bracket(Nu, Nv)
    assert all(c.is_zero() for c in br.components)


def test_bracket_with_solution_gives_solution():
    # the solution directions form an ideal: [basis, N_u] has no
    # (N^t, N^x, h) part and its g-part solves the equation
    Nu = solution_isovector(
        SolutionSpec.single(1, DEFAULT.r, 0) + SolutionSpec.mode_for(1, DEFAULT),
        DEFAULT,
    )
    for i in range(1, 7):
        br = bracket(basis_isovector(i, DEFAULT), Nu)
        assert in_solution_ideal(br, DEFAULT)


# -- error paths -------------------------------------------------------------


def test_generator_rejects_quadratic_B_dependence():
    N = basis_isovector(1, DEFAULT)
    doubled = Isovector(
        (N.Nt * ExpPoly.var("B"), N.Nx, N.Nphi, N.NA, N.NB), name="bad"
    )
    with pytest.raises(ValueError):
        generator_of(doubled)


def test_decompose_rejects_outsiders():
    N = basis_isovector(1, DEFAULT)
    cubic = Isovector(
        (N.Nt * ExpPoly.var("t"), N.Nx, N.Nphi, N.NA, N.NB), name="bad"
    )
    with pytest.raises(NotInFamilyError):
        decompose(cubic, DEFAULT)

    off_model = basis_isovector(1, ZERO_RATE)
    with pytest.raises(NotInFamilyError):
        decompose(off_model, DEFAULT)


def test_isovector_from_constants_validates_length():
    with pytest.raises(ValueError):
        isovector_from_constants((1, 2, 3), SolutionSpec.empty(), DEFAULT)


def test_basis_index_validated():
    with pytest.raises(ValueError):
        basis_isovector(0, DEFAULT)
    with pytest.raises(ValueError):
        basis_isovector(7, DEFAULT)
