"""Grids, grid solutions, discrete residual operators, and the FD solver.

Grids are uniform in calendar time t and in log-price x; the price frame is
a view of the same nodes at S = e^x, so price-frame stencils are the standard
three-point formulas on a non-uniformly spaced axis.  Both residual operators
are second order and act only on interior nodes whose full stencil is
evaluable (NaN marks a clipped node and propagates into the stencil).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .model import ModelContext
from .pricing import OptionSpec

_UNIFORM_RTOL = 1e-9


def _check_axis(vals: np.ndarray, name: str) -> None:
    if vals.ndim != 1 or vals.size < 2:
        raise ValueError(f"{name} needs at least two nodes")
    steps = np.diff(vals)
    if np.any(steps <= 0):
        raise ValueError(f"{name} must be strictly ascending")
    h = steps[0]
    if np.max(np.abs(steps - h)) > _UNIFORM_RTOL * max(abs(h), 1e-300):
        raise ValueError(f"{name} must be uniformly spaced")


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform rectangular grid in (t, x)."""

    t_values: np.ndarray
    x_values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t_values", np.asarray(self.t_values, dtype=float))
        object.__setattr__(self, "x_values", np.asarray(self.x_values, dtype=float))
        _check_axis(self.t_values, "t_values")
        _check_axis(self.x_values, "x_values")

    @property
    def nt(self) -> int:
        return self.t_values.size

    @property
    def nx(self) -> int:
        return self.x_values.size

    @property
    def dt(self) -> float:
        return float(self.t_values[1] - self.t_values[0])

    @property
    def dx(self) -> float:
        return float(self.x_values[1] - self.x_values[0])

    @property
    def s_values(self) -> np.ndarray:
        return np.exp(self.x_values)

    def meshes(self):
        return np.meshgrid(self.t_values, self.x_values, indexing="ij")


def make_grid(t_lo, t_hi, nt, x_lo, x_hi, nx) -> Grid:
    return Grid(np.linspace(t_lo, t_hi, nt), np.linspace(x_lo, x_hi, nx))


@dataclass(eq=False)
class GridSolution:
    """Values on a grid; frame 'log' means phi(t,x), 'price' means C(t, e^x).

    NaN entries mark nodes where a transformed solution was not evaluable.
    """

    grid: Grid
    values: np.ndarray
    frame: str = "log"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.nt, self.grid.nx):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.grid.nt}, {self.grid.nx})"
            )
        if self.frame not in ("log", "price"):
            raise ValueError(f"frame must be 'log' or 'price', got {self.frame!r}")


def to_log_frame(sol: GridSolution) -> GridSolution:
    """Reinterpret a price-frame solution as phi(t, x) = C(t, e^x).

    Node values are unchanged because the grid already stores log-price
    nodes; only the frame tag flips.
    """
    if sol.frame != "price":
        raise ValueError("to_log_frame expects a price-frame solution")
    return GridSolution(sol.grid, sol.values.copy(), frame="log")


def from_log_frame(sol: GridSolution) -> GridSolution:
    """Inverse of to_log_frame (exact on nodes)."""
    if sol.frame != "log":
        raise ValueError("from_log_frame expects a log-frame solution")
    return GridSolution(sol.grid, sol.values.copy(), frame="price")


@dataclass(frozen=True)
class ResidualReport:
    """Summary of a discrete PDE residual over the evaluable interior."""

    op: str
    max_abs_residual: float
    interior_norm: float
    stencil: str
    scale: float
    n_interior: int
    n_clipped: int

    @property
    def rel_max(self) -> float:
        if self.max_abs_residual == 0.0:
            return 0.0
        if self.scale == 0.0:
            return float("inf")
        return self.max_abs_residual / self.scale

    def to_json(self) -> dict:
        return {
            "op": self.op,
            "max_abs_residual": self.max_abs_residual,
            "interior_norm": self.interior_norm,
            "rel_max": self.rel_max,
            "scale": self.scale,
            "stencil": self.stencil,
            "n_interior": self.n_interior,
            "n_clipped": self.n_clipped,
        }


def _finish_report(op: str, res: np.ndarray, values: np.ndarray, stencil: str) -> ResidualReport:
    mask = np.isfinite(res)
    n_interior = int(mask.sum())
    if n_interior == 0:
        raise ValueError("no evaluable interior nodes for the residual stencil")
    finite_vals = values[np.isfinite(values)]
    scale = float(np.max(np.abs(finite_vals))) if finite_vals.size else 0.0
    picked = res[mask]
    return ResidualReport(
        op=op,
        max_abs_residual=float(np.max(np.abs(picked))),
        interior_norm=float(np.sqrt(np.mean(picked * picked))),
        stencil=stencil,
        scale=scale,
        n_interior=n_interior,
        n_clipped=int(res.size - n_interior),
    )


def residual_e2(sol: GridSolution, ctx: ModelContext) -> ResidualReport:
    """Discrete residual of phi_t + (sigma2/2) phi_xx + rtilde phi_x - r phi.

    Central second-order stencils on the uniform (t, x) grid, interior only.
    """
    if sol.frame != "log":
        raise ValueError("residual_e2 expects a log-frame solution")
    g = sol.grid
    if g.nt < 3 or g.nx < 3:
        raise ValueError("grid too coarse for central stencils (need 3 nodes)")
    v = sol.values
    dt, dx = g.dt, g.dx
    mid = v[1:-1, 1:-1]
    phi_t = (v[2:, 1:-1] - v[:-2, 1:-1]) / (2.0 * dt)
    phi_x = (v[1:-1, 2:] - v[1:-1, :-2]) / (2.0 * dx)
    phi_xx = (v[1:-1, 2:] - 2.0 * mid + v[1:-1, :-2]) / (dx * dx)
    res = (
        phi_t
        + 0.5 * ctx.sigma2_f * phi_xx
        + ctx.rtilde_f * phi_x
        - ctx.r_f * mid
    )
    return _finish_report("E2", res, v, "central-2nd-order-uniform")


def residual_e(sol: GridSolution, ctx: ModelContext) -> ResidualReport:
    """Discrete residual of C_t + (sigma2/2) S^2 C_SS + r S C_S - r C.

    The S axis is the image of the uniform x axis, so the space stencils are
    the second-order three-point formulas for non-uniform spacing.
    """
    if sol.frame != "price":
        raise ValueError("residual_e expects a price-frame solution")
    g = sol.grid
    if g.nt < 3 or g.nx < 3:
        raise ValueError("grid too coarse for central stencils (need 3 nodes)")
    v = sol.values
    S = g.s_values
    hp = S[2:] - S[1:-1]
    hm = S[1:-1] - S[:-2]
    f0 = v[1:-1, 1:-1]
    fp = v[1:-1, 2:]
    fm = v[1:-1, :-2]
    denom = hp * hm * (hp + hm)
    c_s = (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) / denom
    c_ss = 2.0 * (hm * fp + hp * fm - (hp + hm) * f0) / denom
    c_t = (v[2:, 1:-1] - v[:-2, 1:-1]) / (2.0 * g.dt)
    Sm = S[1:-1]
    res = (
        c_t
        + 0.5 * ctx.sigma2_f * Sm * Sm * c_ss
        + ctx.r_f * Sm * c_s
        - ctx.r_f * f0
    )
    return _finish_report("E", res, v, "central-2nd-order-nonuniform-S")


# -- finite differences --------------------------------------------------------


def _fd_boundaries(spec: OptionSpec, ctx: ModelContext, t: np.ndarray, grid: Grid):
    """Dirichlet boundary values from the deep in/out-of-the-money asymptotics."""
    tau = spec.maturity - t
    disc = spec.strike * np.exp(-ctx.r_f * tau)
    s_lo = float(np.exp(grid.x_values[0]))
    s_hi = float(np.exp(grid.x_values[-1]))
    if spec.kind == "call":
        lo = np.zeros_like(t)
        hi = s_hi - disc
    else:
        lo = disc - s_lo
        hi = np.zeros_like(t)
    return lo, hi


def fd_solve(spec: OptionSpec, ctx: ModelContext, grid: Grid) -> GridSolution:
    """Crank-Nicolson solve of the log-frame equation, backward from payoff.

    The grid must end at the option maturity (the terminal slice is the
    payoff exactly).  The first step from the payoff is split into two
    backward-Euler half steps to damp the kink at the strike.
    """
    T = spec.maturity
    t = grid.t_values
    if abs(t[-1] - T) > 1e-9 * max(1.0, abs(T)):
        raise ValueError(
            f"grid must end at maturity {T}, last t node is {t[-1]}"
        )
    if grid.nx < 3:
        raise ValueError("fd_solve needs at least 3 space nodes")
    nt, nx = grid.nt, grid.nx
    dx = grid.dx
    a = 0.5 * ctx.sigma2_f / (dx * dx)
    b = ctx.rtilde_f / (2.0 * dx)
    lower = a - b
    diag = -2.0 * a - ctx.r_f
    upper = a + b

    lo_all, hi_all = _fd_boundaries(spec, ctx, t, grid)
    values = np.empty((nt, nx))
    values[-1] = spec.payoff(grid.s_values)
    values[-1, 0] = lo_all[-1]
    values[-1, -1] = hi_all[-1]

    n_in = nx - 2

    def _step(v_old, lo_new, hi_new, lo_old, hi_old, dt, theta):
        """One theta-step of size dt backward in time."""
        ab = np.zeros((3, n_in))
        ab[0, 1:] = -theta * dt * upper
        ab[1, :] = 1.0 - theta * dt * diag
        ab[2, :-1] = -theta * dt * lower
        rhs = v_old[1:-1] + (1.0 - theta) * dt * (
            lower * v_old[:-2] + diag * v_old[1:-1] + upper * v_old[2:]
        )
        rhs[0] += theta * dt * lower * lo_new
        rhs[-1] += theta * dt * upper * hi_new
        v_new = np.empty(nx)
        v_new[1:-1] = solve_banded((1, 1), ab, rhs)
        v_new[0] = lo_new
        v_new[-1] = hi_new
        return v_new

    for n in range(nt - 2, -1, -1):
        dt = float(t[n + 1] - t[n])
        v_old = values[n + 1]
        if n == nt - 2:
            # Rannacher start: two implicit half steps off the payoff kink
            t_mid = t[n] + 0.5 * dt
            lo_mid, hi_mid = _fd_boundaries(
                spec, ctx, np.asarray([t_mid]), grid
            )
            v_mid = _step(
                v_old, float(lo_mid[0]), float(hi_mid[0]),
                lo_all[n + 1], hi_all[n + 1], 0.5 * dt, 1.0,
            )
            values[n] = _step(
                v_mid, lo_all[n], hi_all[n], float(lo_mid[0]), float(hi_mid[0]),
                0.5 * dt, 1.0,
            )
        else:
            values[n] = _step(
                v_old, lo_all[n], hi_all[n], lo_all[n + 1], hi_all[n + 1],
                dt, 0.5,
            )
    return GridSolution(grid, values, frame="log")


# -- CSV interchange -----------------------------------------------------------


def write_csv(sol: GridSolution, path) -> None:
    """Write "t,x,value" (log frame) or "t,S,value" (price frame), row-major
    by time; floats round-trip exactly via repr."""
    axis = sol.grid.x_values if sol.frame == "log" else sol.grid.s_values
    col = "x" if sol.frame == "log" else "S"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", col, "value"])
        for i, tv in enumerate(sol.grid.t_values):
            for j, uv in enumerate(axis):
                writer.writerow([repr(float(tv)), repr(float(uv)),
                                 repr(float(sol.values[i, j]))])


def read_csv(path) -> GridSolution:
    """Inverse of write_csv; the frame is recovered from the header."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header == ["t", "x", "value"]:
            frame = "log"
        elif header == ["t", "S", "value"]:
            frame = "price"
        else:
            raise ValueError(f"unrecognized grid CSV header: {header}")
        rows = [(float(a), float(b), float(c)) for a, b, c in reader]
    if not rows:
        raise ValueError("empty grid CSV")
    t_vals = sorted({row[0] for row in rows})
    u_vals = sorted({row[1] for row in rows})
    nt, nx = len(t_vals), len(u_vals)
    if nt * nx != len(rows):
        raise ValueError("grid CSV is not a full rectangular grid")
    values = np.array([row[2] for row in rows]).reshape(nt, nx)
    x = np.log(u_vals) if frame == "price" else np.array(u_vals)
    grid = Grid(np.array(t_vals), x)
    return GridSolution(grid, values, frame=frame)
