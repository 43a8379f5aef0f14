"""One-parameter symmetry flows and their action on solutions.

Four of the basis isovectors integrate to closed-form flows; index them by
their basis number:

    3: time translation        psi(t,u) = exp(-kappa stilde^2/(2 sigma2)) phi(t+kappa, u)
    4: boost                   psi(t,x) = exp((kappa/sigma2)(rtilde t - x)
                                              - kappa^2 t/(2 sigma2)) phi(t, x+kappa t)
    5: space translation       psi(t,x) = exp(kappa rtilde/sigma2) phi(t, x+kappa)
    6: scaling                 psi(t,u) = exp(kappa) phi(t, u)

In the price frame the boost reads
    psi(t,S) = exp(kappa t (2 rtilde - kappa)/(2 sigma2)) S^(-kappa/sigma2)
               C(t, e^(kappa t) S)
and the space translation rescales the spot by e^kappa.  Each flow maps
solutions to solutions; `certify_transform` machine-checks that claim with
the discrete residual operators.

Solutions are "surfaces": objects with a `frame` attribute and a vectorized
`value(t, u)` method that returns NaN outside their domain.  Closed forms
evaluate exactly at pulled-back points; grid solutions are interpolated with
a cubic spline, and the certificate records that interpolation took place so
a failed verdict can be attributed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .exppoly import ExpPoly
from .grids import Grid, GridSolution, ResidualReport, residual_e, residual_e2
from .isovectors import Isovector, gh_of
from .model import ModelContext
from .pricing import ClosedFormSolution, LogClosedForm

FLOW_GENERATORS = (3, 4, 5, 6)


class TransformDomainError(ValueError):
    """The pulled-back solution is nowhere evaluable on the requested grid."""

    def __init__(self, message, n_clipped=None, n_total=None):
        super().__init__(message)
        self.n_clipped = n_clipped
        self.n_total = n_total


@dataclass(frozen=True)
class FiniteTransform:
    """Finite flow exp(kappa * N_i) for i in {3, 4, 5, 6}."""

    generator: int
    kappa: float
    frame: str = "price"

    def __post_init__(self):
        if self.generator not in FLOW_GENERATORS:
            raise ValueError(
                f"no closed-form flow for generator {self.generator}; "
                f"available: {FLOW_GENERATORS}"
            )
        if self.frame not in ("price", "log"):
            raise ValueError(f"frame must be 'price' or 'log', got {self.frame!r}")

    def pullback(self, ctx: ModelContext, t, u):
        """Map evaluation points to base-solution points."""
        k = self.kappa
        if self.generator == 3:
            return t + k, u
        if self.generator == 4:
            if self.frame == "log":
                return t, u + k * t
            return t, np.exp(k * t) * u
        if self.generator == 5:
            if self.frame == "log":
                return t, u + k
            return t, np.exp(k) * u
        return t, u

    def prefactor(self, ctx: ModelContext, t, u):
        k = self.kappa
        s2 = ctx.sigma2_f
        if self.generator == 3:
            return np.exp(-k * ctx.stilde_f**2 / (2.0 * s2)) * np.ones_like(
                np.asarray(t, dtype=float)
            )
        if self.generator == 4:
            if self.frame == "log":
                arg = (k / s2) * (ctx.rtilde_f * t - u) - k * k * t / (2.0 * s2)
                return np.exp(arg)
            arg = k * t * (2.0 * ctx.rtilde_f - k) / (2.0 * s2)
            return np.exp(arg) * np.asarray(u, dtype=float) ** (-k / s2)
        if self.generator == 5:
            return np.exp(k * ctx.rtilde_f / s2) * np.ones_like(
                np.asarray(t, dtype=float)
            )
        return np.exp(k) * np.ones_like(np.asarray(t, dtype=float))

    def to_json(self) -> dict:
        return {"generator": self.generator, "kappa": self.kappa, "frame": self.frame}


class TransformedSurface:
    """Lazy application of a finite transform to a base surface."""

    def __init__(self, base, transform: FiniteTransform, ctx: ModelContext):
        if base.frame != transform.frame:
            raise ValueError(
                f"frame mismatch: surface is {base.frame!r}, "
                f"transform acts on {transform.frame!r}"
            )
        self.base = base
        self.transform = transform
        self.ctx = ctx
        self.frame = transform.frame

    def value(self, t, u):
        t = np.asarray(t, dtype=float)
        u = np.asarray(u, dtype=float)
        t, u = np.broadcast_arrays(t, u)
        tp, up = self.transform.pullback(self.ctx, t, u)
        pref = self.transform.prefactor(self.ctx, t, u)
        return pref * self.base.value(tp, up)


class GridSurface:
    """Cubic-spline interpolant over a fully evaluable grid solution."""

    def __init__(self, sol: GridSolution):
        if not np.all(np.isfinite(sol.values)):
            raise ValueError("cannot interpolate a grid solution with gaps")
        g = sol.grid
        kx = min(3, g.nt - 1)
        ky = min(3, g.nx - 1)
        self._spline = RectBivariateSpline(
            g.t_values, g.x_values, sol.values, kx=kx, ky=ky
        )
        self.frame = sol.frame
        self._bounds = (
            float(g.t_values[0]),
            float(g.t_values[-1]),
            float(g.x_values[0]),
            float(g.x_values[-1]),
        )
        self.order = (kx, ky)

    def value(self, t, u):
        t = np.asarray(t, dtype=float)
        u = np.asarray(u, dtype=float)
        t, u = np.broadcast_arrays(t, u)
        x = np.log(u) if self.frame == "price" else u
        t_lo, t_hi, x_lo, x_hi = self._bounds
        with np.errstate(invalid="ignore"):
            ok = (t >= t_lo) & (t <= t_hi) & (x >= x_lo) & (x <= x_hi)
        out = np.full(t.shape, np.nan)
        if np.any(ok):
            out[ok] = self._spline.ev(t[ok], x[ok])
        return out if out.ndim else float(out)


class BoxRestrictedSurface:
    """A surface clipped to a bounding box; outside it evaluates to NaN.

    Certification treats the base solution as known on the certification
    grid only, so pulled-back points must stay inside the grid's bounding
    box; this wrapper realizes that clipping for closed forms, which would
    otherwise evaluate anywhere before maturity.
    """

    def __init__(self, base, t_lo, t_hi, u_lo, u_hi):
        self.base = base
        self.frame = base.frame
        self._box = (float(t_lo), float(t_hi), float(u_lo), float(u_hi))

    def value(self, t, u):
        t = np.asarray(t, dtype=float)
        u = np.asarray(u, dtype=float)
        t, u = np.broadcast_arrays(t, u)
        t_lo, t_hi, u_lo, u_hi = self._box
        eps_t = 1e-12 * max(abs(t_lo), abs(t_hi), 1.0)
        eps_u = 1e-12 * max(abs(u_lo), abs(u_hi), 1.0)
        with np.errstate(invalid="ignore"):
            ok = (
                (t >= t_lo - eps_t)
                & (t <= t_hi + eps_t)
                & (u >= u_lo - eps_u)
                & (u <= u_hi + eps_u)
            )
        out = np.full(t.shape, np.nan)
        if np.any(ok):
            vals = np.asarray(self.base.value(t[ok], u[ok]))
            out[ok] = vals
        return out if out.ndim else float(out)


def restrict_to_grid(surface, grid: Grid):
    """Clip a surface to the bounding box of a grid (in its own frame)."""
    if surface.frame == "price":
        u_lo, u_hi = float(np.exp(grid.x_values[0])), float(np.exp(grid.x_values[-1]))
    else:
        u_lo, u_hi = float(grid.x_values[0]), float(grid.x_values[-1])
    return BoxRestrictedSurface(
        surface, grid.t_values[0], grid.t_values[-1], u_lo, u_hi
    )


def as_surface(sol, interpolated=None):
    """Wrap a GridSolution as an interpolating surface; pass others through.

    Returns (surface, used_interpolation).
    """
    if isinstance(sol, GridSolution):
        return GridSurface(sol), True
    if not hasattr(sol, "value") or not hasattr(sol, "frame"):
        raise TypeError(f"not a solution surface: {sol!r}")
    return sol, bool(interpolated)


def apply_transform(transform: FiniteTransform, sol, ctx: ModelContext):
    """Apply a finite flow to a solution surface (or GridSolution)."""
    surface, _ = as_surface(sol)
    return TransformedSurface(surface, transform, ctx)


@dataclass(frozen=True)
class Pipeline:
    """A sequence of finite transforms applied left to right."""

    transforms: tuple

    def __post_init__(self):
        if not self.transforms:
            raise ValueError("empty transform pipeline")
        frames = {tr.frame for tr in self.transforms}
        if len(frames) != 1:
            raise ValueError(f"pipeline mixes frames: {sorted(frames)}")

    @property
    def frame(self) -> str:
        return self.transforms[0].frame

    def apply(self, sol, ctx: ModelContext):
        surface, _ = as_surface(sol)
        for tr in self.transforms:
            surface = TransformedSurface(surface, tr, ctx)
        return surface

    def to_json(self) -> list:
        return [tr.to_json() for tr in self.transforms]


def compose(*transforms: FiniteTransform) -> Pipeline:
    return Pipeline(tuple(transforms))


def sample_surface(surface, grid: Grid) -> GridSolution:
    """Evaluate a surface at all grid nodes (price frame samples at S = e^x)."""
    T, X = grid.meshes()
    u = np.exp(X) if surface.frame == "price" else X
    values = surface.value(T, u)
    return GridSolution(grid, values, frame=surface.frame)


@dataclass(frozen=True)
class CertificationResult:
    """Residual-based verdict for a transformed solution on a grid."""

    report: ResidualReport
    tol: float
    verdict: bool
    n_clipped_nodes: int
    used_interpolation: bool
    samples: GridSolution = None  # the transformed values on the grid

    def to_json(self) -> dict:
        return {
            "verdict": "pass" if self.verdict else "fail",
            "tol": self.tol,
            "rel_max_residual": self.report.rel_max,
            "report": self.report.to_json(),
            "n_clipped_nodes": self.n_clipped_nodes,
            "used_interpolation": self.used_interpolation,
        }


def certify_transform(
    transform: Union[FiniteTransform, Pipeline],
    sol,
    grid: Grid,
    ctx: ModelContext,
    tol: float,
) -> CertificationResult:
    """Apply a transform (or pipeline) and residual-check the result.

    The verdict compares the max interior relative residual against tol.
    The base solution is treated as known on the certification grid only,
    so pullbacks that leave the grid's bounding box mark their nodes as
    clipped; clipped nodes are excluded and counted, and if nothing remains
    evaluable the transform has left the domain entirely and a
    TransformDomainError is raised.
    """
    base_surface, interpolated = as_surface(sol)
    if not isinstance(base_surface, GridSurface):
        base_surface = restrict_to_grid(base_surface, grid)
    if isinstance(transform, Pipeline):
        surface = transform.apply(base_surface, ctx)
    else:
        surface = TransformedSurface(base_surface, transform, ctx)
    sampled = sample_surface(surface, grid)
    n_bad = int(np.sum(~np.isfinite(sampled.values)))
    try:
        if surface.frame == "price":
            report = residual_e(sampled, ctx)
        else:
            report = residual_e2(sampled, ctx)
    except ValueError as exc:
        raise TransformDomainError(
            f"transformed solution is not evaluable on the grid interior "
            f"({n_bad} of {sampled.values.size} nodes clipped)",
            n_clipped=n_bad,
            n_total=int(sampled.values.size),
        ) from exc
    return CertificationResult(
        report=report,
        tol=float(tol),
        verdict=bool(report.rel_max <= tol),
        n_clipped_nodes=n_bad,
        used_interpolation=interpolated,
        samples=sampled,
    )


# -- infinitesimal actions ------------------------------------------------------


@dataclass(frozen=True)
class InfinitesimalAction:
    """First-order action of an isovector on log-frame solutions:

        (N~ phi)(t, x) = -N^t phi_t - N^x phi_x + g + h phi
    """

    source: Isovector
    minus_nt: ExpPoly
    minus_nx: ExpPoly
    g: ExpPoly
    h: ExpPoly

    @staticmethod
    def from_isovector(N: Isovector) -> "InfinitesimalAction":
        for var in ("phi", "A", "B"):
            if N.Nt.depends_on(var) or N.Nx.depends_on(var):
                raise ValueError(
                    f"N^t and N^x must depend only on (t, x); found {var}"
                )
        pair = gh_of(N)
        return InfinitesimalAction(
            source=N, minus_nt=-N.Nt, minus_nx=-N.Nx, g=pair.g, h=pair.h
        )

    def to_json(self) -> dict:
        return {
            "name": self.source.name,
            "-N^t": str(self.minus_nt),
            "-N^x": str(self.minus_nx),
            "g": str(self.g),
            "h": str(self.h),
        }


class ActionSurface:
    """Log-frame surface N~(phi) for a base solution with derivatives."""

    frame = "log"

    def __init__(self, action: InfinitesimalAction, base):
        if base.frame != "log":
            raise ValueError("infinitesimal actions act on log-frame solutions")
        if not getattr(base, "has_derivatives", False):
            raise ValueError(
                "base solution does not expose derivatives; sample it on a "
                "grid and use the stencil route instead"
            )
        self.action = action
        self.base = base

    def value(self, t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        t, x = np.broadcast_arrays(t, x)
        act = self.action
        out = act.g.eval_grid(t, x) + act.h.eval_grid(t, x) * self.base.value(t, x)
        if not act.minus_nt.is_zero():
            out = out + act.minus_nt.eval_grid(t, x) * self.base.dt(t, x)
        if not act.minus_nx.is_zero():
            out = out + act.minus_nx.eval_grid(t, x) * self.base.dx(t, x)
        return out


def infinitesimal_action(N: Isovector, sol):
    """Build N~(phi) for a log-frame solution.

    Closed-form solutions use their analytic derivatives and return a
    surface; grid solutions use central stencils and return a GridSolution
    whose border ring is NaN (no full stencil there).
    """
    action = InfinitesimalAction.from_isovector(N)
    if isinstance(sol, GridSolution):
        if sol.frame != "log":
            raise ValueError("infinitesimal actions act on log-frame solutions")
        g = sol.grid
        if g.nt < 3 or g.nx < 3:
            raise ValueError("grid too coarse for derivative stencils")
        v = sol.values
        T, X = g.meshes()
        phi_t = np.full_like(v, np.nan)
        phi_x = np.full_like(v, np.nan)
        phi_t[1:-1, :] = (v[2:, :] - v[:-2, :]) / (2.0 * g.dt)
        phi_x[:, 1:-1] = (v[:, 2:] - v[:, :-2]) / (2.0 * g.dx)
        out = action.g.eval_grid(T, X) + action.h.eval_grid(T, X) * v
        if not action.minus_nt.is_zero():
            out = out + action.minus_nt.eval_grid(T, X) * phi_t
        if not action.minus_nx.is_zero():
            out = out + action.minus_nx.eval_grid(T, X) * phi_x
        return GridSolution(g, out, frame="log")
    return ActionSurface(action, sol)
