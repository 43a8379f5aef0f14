"""Differential forms on the five-jet and the structural forms."""

from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from bssym.exppoly import VARS, ExpPoly
from bssym.forms import (
    DiffForm,
    contract,
    exterior_derivative,
    lie_derivative,
    structural_forms,
    wedge,
)
from bssym.isovectors import basis_isovector, Isovector
from bssym.model import make_context

coeffs = st.fractions(
    min_value=Fraction(-10), max_value=Fraction(10), max_denominator=20
)


@st.composite
def functions(draw, max_terms=3):
    p = ExpPoly.zero()
    for _ in range(draw(st.integers(min_value=0, max_value=max_terms))):
        exps = draw(st.tuples(*(st.integers(0, 2) for _ in VARS)))
        p = p + ExpPoly.term(draw(coeffs), exps)
    return p


@st.composite
def one_forms(draw):
    form = DiffForm.zero(1)
    for name in ("dt", "dx", "dphi", "dA", "dB"):
        form = form + DiffForm.covector(name) * draw(functions())
    return form


contexts = st.builds(
    make_context,
    st.fractions(min_value=Fraction(0), max_value=Fraction(3), max_denominator=100),
    st.fractions(
        min_value=Fraction(1, 100), max_value=Fraction(4), max_denominator=100
    ),
)

DEFAULT = make_context(Fraction(1, 20), Fraction(1, 25))


@given(one_forms(), one_forms())
def test_wedge_antisymmetry(u, v):
    assert wedge(u, v) == -wedge(v, u)
    assert wedge(u, u).is_zero()


@given(one_forms(), one_forms(), one_forms())
def test_wedge_associativity_and_linearity(u, v, w):
    assert wedge(wedge(u, v), w) == wedge(u, wedge(v, w))
    assert wedge(u + v, w) == wedge(u, w) + wedge(v, w)


@given(functions())
def test_d_squared_zero_on_functions(f):
    df = exterior_derivative(DiffForm.function(f))
    assert exterior_derivative(df).is_zero()


@given(one_forms())
def test_d_squared_zero_on_one_forms(u):
    assert exterior_derivative(exterior_derivative(u)).is_zero()


@given(functions(), one_forms())
def test_leibniz_rule(f, u):
    # d(f u) = df ^ u + f du
    left = exterior_derivative(u * f)
    df = exterior_derivative(DiffForm.function(f))
    right = wedge(df, u) + exterior_derivative(u) * f
    assert left == right


def test_degree_bounds():
    dt = DiffForm.covector("dt")
    top = wedge(
        dt,
        wedge(
            DiffForm.covector("dx"),
            wedge(
                DiffForm.covector("dphi"),
                wedge(DiffForm.covector("dA"), DiffForm.covector("dB")),
            ),
        ),
    )
    assert top.degree == 5
    assert wedge(top, dt).is_zero()


def test_contact_form_strings():
    alpha, dalpha, beta = structural_forms(DEFAULT)
    assert str(alpha) == "-B*dt - A*dx + dphi"
    assert str(dalpha) == "-dA^dx - dB^dt"
    assert str(beta) == "(-1/20*phi + 3/100*A + B)*dx^dt + 1/50*dA^dt"


@given(contexts)
def test_dalpha_is_context_free(ctx):
    alpha, dalpha, _ = structural_forms(ctx)
    assert exterior_derivative(alpha) == dalpha
    dx, dA = DiffForm.covector("dx"), DiffForm.covector("dA")
    dt, dB = DiffForm.covector("dt"), DiffForm.covector("dB")
    assert dalpha == wedge(dx, dA) + wedge(dt, dB)


@given(contexts)
def test_dbeta_structural_identity(ctx):
    # d(beta) recombines into the contact forms: no new generators appear
    alpha, dalpha, beta = structural_forms(ctx)
    dt, dx = DiffForm.covector("dt"), DiffForm.covector("dx")
    rt = ExpPoly.constant(ctx.rtilde)
    shift = dx - dt * rt
    expected = wedge(dalpha, shift) - wedge(wedge(alpha, dx), dt) * ExpPoly.constant(
        ctx.r
    )
    assert exterior_derivative(beta) == expected


def test_contraction_of_generic_vector_into_dalpha():
    # N _| (dx^dA + dt^dB) = N^x dA - N^A dx + N^t dB - N^B dt
    comps = tuple(
        ExpPoly.term(Fraction(k + 1), exps)
        for k, exps in enumerate(
            [(1, 0, 0, 0, 0), (0, 2, 0, 0, 0), (0, 0, 1, 1, 0), (0, 0, 0, 0, 2),
             (1, 1, 1, 1, 1)]
        )
    )
    N = Isovector(comps, name="generic")
    _, dalpha, _ = structural_forms(DEFAULT)
    got = contract(N, dalpha)
    want = (
        DiffForm.covector("dA") * N.Nx
        - DiffForm.covector("dx") * N.NA
        + DiffForm.covector("dB") * N.Nt
        - DiffForm.covector("dt") * N.NB
    )
    assert got == want


@given(functions())
def test_lie_derivative_on_functions_is_directional(f):
    N = basis_isovector(2, DEFAULT)
    form = DiffForm.function(f)
    got = lie_derivative(N, form)
    assert got.coeff(()) == N.apply(f)


@given(one_forms())
def test_cartan_formula_consistency(u):
    # L_N u = N _| du + d(N _| u)
    N = basis_isovector(4, DEFAULT)
    got = lie_derivative(N, u)
    want = contract(N, exterior_derivative(u)) + exterior_derivative(
        contract(N, u)
    )
    assert got == want


def test_coeff_lookup_by_name_and_index():
    _, dalpha, _ = structural_forms(DEFAULT)
    assert dalpha.coeff(("dx", "dA")) == ExpPoly.one()
    assert dalpha.coeff((1, 3)) == ExpPoly.one()
    assert dalpha.coeff(("dA", "dx")) == -ExpPoly.one()
    assert dalpha.coeff(("dx", "dphi")).is_zero()
