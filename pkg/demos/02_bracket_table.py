"""Close the algebra: the 6x6 bracket table and the g/h shadow.

The finite part of the symmetry algebra closes on the six basis fields;
every bracket decomposes exactly back into the basis.  The same brackets
can be computed on the (g, h) data alone, and both routes must agree.
"""

from fractions import Fraction

from bssym import (
    SolutionSpec,
    basis_isovector,
    bracket,
    bracket_gh,
    gh_of,
    make_context,
    pretty_combination,
    solution_isovector,
    structure_constants,
)


def main():
    ctx = make_context(Fraction(1, 20), Fraction(1, 25))
    table = structure_constants(ctx)

    width = 14
    header = "".join(f"N{j}".ljust(width) for j in range(1, 7))
    print(" " * 6 + header)
    for i in range(1, 7):
        cells = [
            pretty_combination(table[(i, j)]).ljust(width) for j in range(1, 7)
        ]
        print(f"[N{i},.] " + "".join(cells))

    # duality: brackets computed on full components versus on (g, h) pairs
    N2, N5 = basis_isovector(2, ctx), basis_isovector(5, ctx)
    full = gh_of(bracket(N2, N5))
    shadow = bracket_gh(N2, N5)
    print(f"\n[N2,N5] gh split: g = {full.g}, h = {full.h}")
    print(f"same via gh route: g = {shadow.g}, h = {shadow.h}")

    # the solution directions form an abelian ideal
    Nu = solution_isovector(SolutionSpec.mode_for(1, ctx), ctx)
    Nv = solution_isovector(SolutionSpec.mode_for(2, ctx), ctx)
    uv = bracket(Nu, Nv)
    print(f"\n[N_u,N_v] components all zero: "
          f"{all(c.is_zero() for c in uv.components)}")


if __name__ == "__main__":
    main()
