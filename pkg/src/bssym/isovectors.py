"""Isovectors of the pricing equation: construction, verification, brackets.

An isovector is a vector field N on the 5-jet manifold whose Lie derivative
preserves the structural ideal I = <alpha, dalpha, beta>.  Verification is
split exactly as the theory dictates:

  * L_N alpha = lambda * alpha with lambda = F_phi, where F = N _| alpha is
    the generator function (this also settles L_N dalpha = d(lambda alpha));
  * L_N beta is decided by the ideal membership solver.

The full solution family is parametrized by six exact constants C1..C6 and a
set of exponential solution modes g; `isovector_from_constants` encodes that
parametrization literally, and `decompose` inverts it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .exppoly import ExpPoly
from .forms import DiffForm, contract, lie_derivative, structural_forms
from .ideal import MembershipCertificate, ideal_membership
from .model import ModelContext

_T = ExpPoly.var("t")
_X = ExpPoly.var("x")
_PHI = ExpPoly.var("phi")
_A = ExpPoly.var("A")
_B = ExpPoly.var("B")


class DispersionError(ValueError):
    """A solution mode violates the dispersion relation of the equation."""

    def __init__(self, mode, value):
        coeff, a, b = mode
        super().__init__(
            f"mode {coeff}*exp({a}*t + {b}*x) violates the dispersion "
            f"relation: a + (sigma2/2) b^2 + rtilde b - r = {value} != 0"
        )
        self.mode = mode
        self.value = value


class NotInFamilyError(ValueError):
    """A vector field is outside the C1..C6 + solution-mode family."""


@dataclass(frozen=True)
class SolutionSpec:
    """Exponential solution modes sum(c * exp(a t + b x)) with exact data."""

    modes: Tuple[Tuple[Fraction, Fraction, Fraction], ...] = ()

    @staticmethod
    def empty() -> "SolutionSpec":
        return SolutionSpec(())

    @staticmethod
    def single(coeff, a, b) -> "SolutionSpec":
        return SolutionSpec(((Fraction(coeff), Fraction(a), Fraction(b)),))

    @staticmethod
    def mode_for(b, ctx: ModelContext, coeff=1) -> "SolutionSpec":
        """The mode with spatial rate b whose time rate solves the dispersion."""
        b = Fraction(b)
        a = ctx.r - ctx.rtilde * b - ctx.sigma2 / 2 * b * b
        return SolutionSpec.single(coeff, a, b)

    def __add__(self, other: "SolutionSpec") -> "SolutionSpec":
        return SolutionSpec(self.modes + other.modes)

    def is_zero(self) -> bool:
        return all(c == 0 for c, _, _ in self.modes)

    def to_exppoly(self) -> ExpPoly:
        out = ExpPoly.zero()
        for coeff, a, b in self.modes:
            out = out + ExpPoly.term(coeff, a=a, b=b)
        return out

    def check_dispersion(self, ctx: ModelContext) -> None:
        for mode in self.modes:
            _, a, b = mode
            value = a + ctx.sigma2 / 2 * b * b + ctx.rtilde * b - ctx.r
            if value != 0:
                raise DispersionError(mode, value)

    def to_json(self) -> list:
        return [
            {"coeff": str(c), "a": str(a), "b": str(b)} for c, a, b in self.modes
        ]


def pde_defect(g: ExpPoly, ctx: ModelContext) -> ExpPoly:
    """Exact defect g_t + (sigma2/2) g_xx + rtilde g_x - r g of a candidate
    solution of the log-frame equation; zero iff g solves it."""
    return (
        g.diff("t")
        + ctx.sigma2 / 2 * g.diff("x").diff("x")
        + ctx.rtilde * g.diff("x")
        - ctx.r * g
    )


def in_solution_ideal(N: Isovector, ctx: ModelContext) -> bool:
    """True when N is a pure solution-mode field: N^t = N^x = 0, h = 0, and
    the inhomogeneity g solves the equation exactly."""
    if not (N.Nt.is_zero() and N.Nx.is_zero()):
        return False
    pair = gh_of(N)
    if not pair.h.is_zero():
        return False
    return pde_defect(pair.g, ctx).is_zero()


@dataclass(frozen=True)
class Generator:
    """Generator function F = c + B*d with c free of B and d = d(t)."""

    c: ExpPoly
    d: ExpPoly

    def __post_init__(self):
        if self.c.depends_on("B"):
            raise ValueError("generator part c must be free of B")
        for name in ("x", "phi", "A", "B"):
            if self.d.depends_on(name):
                raise ValueError("generator part d must be a function of t only")

    @property
    def F(self) -> ExpPoly:
        return self.c + _B * self.d

    def __eq__(self, other):
        if not isinstance(other, Generator):
            return NotImplemented
        return self.c == other.c and self.d == other.d

    def to_json(self) -> dict:
        return {"c": str(self.c), "d": str(self.d)}


@dataclass(frozen=True)
class Isovector:
    """Vector field on the jet manifold, components in (t, x, phi, A, B) order."""

    components: Tuple[ExpPoly, ExpPoly, ExpPoly, ExpPoly, ExpPoly]
    name: str = ""
    provenance: Optional[tuple] = None  # (C1..C6, SolutionSpec) when known

    @property
    def Nt(self) -> ExpPoly:
        return self.components[0]

    @property
    def Nx(self) -> ExpPoly:
        return self.components[1]

    @property
    def Nphi(self) -> ExpPoly:
        return self.components[2]

    @property
    def NA(self) -> ExpPoly:
        return self.components[3]

    @property
    def NB(self) -> ExpPoly:
        return self.components[4]

    def apply(self, f: ExpPoly) -> ExpPoly:
        """Act on a function as a derivation: sum of N^v * df/dv."""
        out = ExpPoly.zero()
        for comp, var in zip(self.components, ("t", "x", "phi", "A", "B")):
            if not comp.is_zero():
                out = out + comp * f.diff(var)
        return out

    def __add__(self, other: "Isovector") -> "Isovector":
        comps = tuple(a + b for a, b in zip(self.components, other.components))
        return Isovector(comps)

    def __sub__(self, other: "Isovector") -> "Isovector":
        comps = tuple(a - b for a, b in zip(self.components, other.components))
        return Isovector(comps)

    def __rmul__(self, scalar) -> "Isovector":
        return Isovector(tuple(scalar * c for c in self.components))

    __mul__ = __rmul__

    def __eq__(self, other):
        if not isinstance(other, Isovector):
            return NotImplemented
        return self.components == other.components

    def __str__(self) -> str:
        label = self.name or "N"
        parts = [
            f"{label}^{var} = {comp}"
            for var, comp in zip(("t", "x", "phi", "A", "B"), self.components)
        ]
        return "; ".join(parts)

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "components": {
                var: str(comp)
                for var, comp in zip(("t", "x", "phi", "A", "B"), self.components)
            },
        }
        if self.provenance is not None:
            constants, modes = self.provenance
            out["constants"] = [str(c) for c in constants]
            out["modes"] = modes.to_json()
        return out


@dataclass(frozen=True)
class GHPair:
    """The inhomogeneous and homogeneous parts of N^phi = g + h*phi."""

    g: ExpPoly
    h: ExpPoly

    def to_json(self) -> dict:
        return {"g": str(self.g), "h": str(self.h)}


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of checking L_N(I) subset I for one candidate isovector."""

    name: str
    generator: ExpPoly
    lam: ExpPoly
    alpha_ok: bool
    alpha_defect: DiffForm
    certificate: MembershipCertificate

    @property
    def passed(self) -> bool:
        return self.alpha_ok and self.certificate.in_ideal

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "generator": str(self.generator),
            "lambda": str(self.lam),
            "alpha_ok": self.alpha_ok,
            "alpha_defect": str(self.alpha_defect),
            "beta_in_ideal": self.certificate.in_ideal,
            "certificate": self.certificate.to_json(),
            "passed": self.passed,
        }


# -- generator correspondence ----------------------------------------------


def generator_of(N: Isovector) -> Generator:
    """F = N _| alpha, split as c + B*d."""
    F = N.Nphi - _A * N.Nx - _B * N.Nt
    if F.degree_in("B") > 1:
        raise ValueError(
            "generator is quadratic or higher in B; no isovector induces it"
        )
    d = F.coeff_of("B", 1)
    c = F.coeff_of("B", 0)
    return Generator(c=c, d=d)


def isovector_from_generator(gen: Generator) -> Isovector:
    """Rebuild the five components from F by the canonical prolongation.

        N^t = -F_B     N^x = -F_A     N^phi = F - A F_A - B F_B
        N^A = F_x + A F_phi           N^B = F_t + B F_phi
    """
    F = gen.F
    FB = F.diff("B")
    FA = F.diff("A")
    Fphi = F.diff("phi")
    Nt = -FB
    Nx = -FA
    Nphi = F - _A * FA - _B * FB
    NA = F.diff("x") + _A * Fphi
    NB = F.diff("t") + _B * Fphi
    return Isovector((Nt, Nx, Nphi, NA, NB))


# -- the exact solution family ----------------------------------------------


def isovector_from_constants(
    constants: Sequence, modes: SolutionSpec, ctx: ModelContext, name: str = ""
) -> Isovector:
    """Isovector with parameters C1..C6 and solution modes g.

    Writing d(t) = C1 t^2 + C2 t + C3 and mu(t) = C4 t + C5, the components
    are built from

        f(t,x) = (1/2) d'(t) x + mu(t)
        k(t)   = -(stilde^2 / 2 sigma2) d(t) + (rtilde/sigma2) mu(t)
                 + d'(t)/4 + C6
        h(t,x) = (rtilde / 2 sigma2) d'(t) x - (d''(t) / 4 sigma2) x^2
                 - (mu'(t)/sigma2) x + k(t)

    as N^t = -d, N^x = -f, N^phi = g + h*phi, with the prolonged components
    N^A = g_x + h_x phi + A f_x + A h and
    N^B = g_t + h_t phi + A f_t + B d' + B h.
    """
    if len(tuple(constants)) != 6:
        raise ValueError("expected six constants C1..C6")
    C1, C2, C3, C4, C5, C6 = (Fraction(c) for c in constants)
    modes.check_dispersion(ctx)
    s2 = ctx.sigma2
    rt = ctx.rtilde
    st = ctx.stilde

    d = C1 * _T * _T + C2 * _T + C3
    dp = d.diff("t")
    dpp = dp.diff("t")
    mu = C4 * _T + C5
    mup = mu.diff("t")
    f = Fraction(1, 2) * dp * _X + mu
    k = -(st * st / (2 * s2)) * d + (rt / s2) * mu + Fraction(1, 4) * dp + C6
    h = (
        (rt / (2 * s2)) * dp * _X
        - Fraction(1, 4) / s2 * dpp * _X * _X
        - (1 / s2) * mup * _X
        + k
    )
    g = modes.to_exppoly()

    Nt = -d
    Nx = -f
    Nphi = g + h * _PHI
    NA = g.diff("x") + h.diff("x") * _PHI + _A * f.diff("x") + _A * h
    NB = (
        g.diff("t")
        + h.diff("t") * _PHI
        + _A * f.diff("t")
        + _B * dp
        + _B * h
    )
    return Isovector(
        (Nt, Nx, Nphi, NA, NB),
        name=name,
        provenance=((C1, C2, C3, C4, C5, C6), modes),
    )


def basis_isovector(i: int, ctx: ModelContext) -> Isovector:
    """Basis element N_i (g = 0, C_j = delta_ij), i in 1..6."""
    if not 1 <= i <= 6:
        raise ValueError(f"basis index must be 1..6, got {i}")
    constants = [0] * 6
    constants[i - 1] = 1
    return isovector_from_constants(
        constants, SolutionSpec.empty(), ctx, name=f"N{i}"
    )


def solution_isovector(
    modes: SolutionSpec, ctx: ModelContext, name: str = "N_g"
) -> Isovector:
    """Pure solution-mode isovector (all C_i = 0)."""
    return isovector_from_constants([0] * 6, modes, ctx, name=name)


# -- verification ------------------------------------------------------------


def verify_isovector(N: Isovector, ctx: ModelContext) -> VerificationReport:
    """Machine check of L_N(I) subset I with exact arithmetic."""
    alpha, _, beta = structural_forms(ctx)
    F = contract(N, alpha).coeff(())
    lam = F.diff("phi")
    alpha_defect = lie_derivative(N, alpha) - alpha * lam
    L_beta = lie_derivative(N, beta)
    certificate = ideal_membership(L_beta, ctx)
    return VerificationReport(
        name=N.name,
        generator=F,
        lam=lam,
        alpha_ok=alpha_defect.is_zero(),
        alpha_defect=alpha_defect,
        certificate=certificate,
    )


# -- Lie algebra --------------------------------------------------------------


def bracket(M: Isovector, N: Isovector) -> Isovector:
    """Commutator [M, N] acting componentwise: M(N^v) - N(M^v)."""
    comps = tuple(
        M.apply(nc) - N.apply(mc) for mc, nc in zip(M.components, N.components)
    )
    name = ""
    if M.name and N.name:
        name = f"[{M.name},{N.name}]"
    return Isovector(comps, name=name)


def gh_of(N: Isovector) -> GHPair:
    """Split N^phi = g + h*phi; requires N^phi affine in phi, free of A, B."""
    nphi = N.Nphi
    h = nphi.diff("phi")
    if h.depends_on("phi"):
        raise ValueError("N^phi is not affine in phi")
    g = nphi - h * _PHI
    for var in ("phi", "A", "B"):
        if g.depends_on(var) or h.depends_on(var):
            raise ValueError(f"N^phi involves {var}; no g/h split exists")
    return GHPair(g=g, h=h)


def bracket_gh(M: Isovector, N: Isovector) -> GHPair:
    """g/h data of [M, N] computed directly from the first-order parts.

        g_[M,N] = M^t g_N,t + M^x g_N,x + g_M h_N
                  - N^t g_M,t - N^x g_M,x - g_N h_M
        h_[M,N] = M^t h_N,t + M^x h_N,x - N^t h_M,t - N^x h_M,x
    """
    gm = gh_of(M)
    gn = gh_of(N)
    g = (
        M.Nt * gn.g.diff("t")
        + M.Nx * gn.g.diff("x")
        + gm.g * gn.h
        - N.Nt * gm.g.diff("t")
        - N.Nx * gm.g.diff("x")
        - gn.g * gm.h
    )
    h = (
        M.Nt * gn.h.diff("t")
        + M.Nx * gn.h.diff("x")
        - N.Nt * gm.h.diff("t")
        - N.Nx * gm.h.diff("x")
    )
    return GHPair(g=g, h=h)


# -- decomposition back into the family ---------------------------------------


def _constant_of(poly: ExpPoly, what: str) -> Fraction:
    if not poly.is_constant():
        raise NotInFamilyError(f"{what} is not constant: {poly}")
    return poly.constant_value()


def decompose(N: Isovector, ctx: ModelContext):
    """Invert the family parametrization: N -> (C1..C6, SolutionSpec).

    Raises NotInFamilyError when N is not of the six-parameter family form.
    """
    d = -N.Nt
    for var in ("x", "phi", "A", "B"):
        if d.depends_on(var):
            raise NotInFamilyError(f"N^t depends on {var}")
    if not d.is_polynomial() or d.degree_in("t") > 2:
        raise NotInFamilyError(f"N^t = {N.Nt} is not a quadratic polynomial in t")
    C1 = _constant_of(d.coeff_of("t", 2), "C1")
    C2 = _constant_of(d.coeff_of("t", 1), "C2")
    C3 = _constant_of(d.coeff_of("t", 0), "C3")

    f = -N.Nx
    dp = d.diff("t")
    mu = f - Fraction(1, 2) * dp * _X
    for var in ("x", "phi", "A", "B"):
        if mu.depends_on(var):
            raise NotInFamilyError(f"N^x + (1/2) d'(t) x depends on {var}")
    if not mu.is_polynomial() or mu.degree_in("t") > 1:
        raise NotInFamilyError(f"mu = {mu} is not affine in t")
    C4 = _constant_of(mu.coeff_of("t", 1), "C4")
    C5 = _constant_of(mu.coeff_of("t", 0), "C5")

    pair = gh_of(N)
    probe = isovector_from_constants(
        (C1, C2, C3, C4, C5, 0), SolutionSpec.empty(), ctx
    )
    h0 = gh_of(probe).h
    C6 = _constant_of(pair.h - h0, "C6")

    modes = []
    for (exps, sig), coeff in pair.g.sorted_terms():
        if exps != (0, 0, 0, 0, 0):
            raise NotInFamilyError(
                f"g contains a non-exponential term: {pair.g}"
            )
        modes.append((coeff, sig[0], sig[1]))
    spec = SolutionSpec(tuple(modes))
    spec.check_dispersion(ctx)

    constants = (C1, C2, C3, C4, C5, C6)
    rebuilt = isovector_from_constants(constants, spec, ctx)
    if rebuilt != N:
        for var, a, b in zip(
            ("t", "x", "phi", "A", "B"), rebuilt.components, N.components
        ):
            if a != b:
                raise NotInFamilyError(
                    f"component N^{var} mismatch: family form gives {a}, "
                    f"input has {b}"
                )
    return constants, spec


def pretty_combination(terms) -> str:
    """Render ((k, coeff), ...) as e.g. "1/2 · N5"; empty input is "0"."""
    if not terms:
        return "0"
    chunks = []
    for k, coeff in terms:
        body = f"{coeff} · N{k}"
        if not chunks:
            chunks.append(body)
        elif body.startswith("-"):
            chunks.append("- " + body[1:])
        else:
            chunks.append("+ " + body)
    return " ".join(chunks)


def structure_constants(ctx: ModelContext) -> dict:
    """Brackets of the six basis isovectors expanded back in the basis.

    Returns a dict mapping (i, j) to a tuple of (k, coeff) pairs; every
    bracket must land in the span of N1..N6 with no solution-mode part.
    """
    basis = {i: basis_isovector(i, ctx) for i in range(1, 7)}
    table = {}
    for i in range(1, 7):
        for j in range(1, 7):
            br = bracket(basis[i], basis[j])
            constants, spec = decompose(br, ctx)
            if not spec.is_zero():
                raise NotInFamilyError(
                    f"[N{i},N{j}] has a nonzero solution-mode part"
                )
            table[(i, j)] = tuple(
                (k + 1, c) for k, c in enumerate(constants) if c != 0
            )
    return table
