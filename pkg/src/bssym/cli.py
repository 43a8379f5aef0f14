"""Batch command-line harness.

Subcommands: verify, brackets, transform, price, residual.  A flat
"key = value" config file (with '#' comments) holds the same settings as the
flags; flags override the file; unknown keys are rejected.  Exit codes are
strict: 0 success, 1 mathematical failure, 2 usage or config error.

Output is deterministic byte-for-byte for identical configuration: JSON is
emitted with sorted keys and fixed indentation, CSV rows use repr floats,
and nothing time- or environment-dependent is written.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .grids import GridSolution, make_grid, residual_e, residual_e2, fd_solve, write_csv
from .isovectors import (
    Isovector,
    SolutionSpec,
    basis_isovector,
    bracket,
    bracket_gh,
    gh_of,
    in_solution_ideal,
    pretty_combination,
    solution_isovector,
    structure_constants,
    verify_isovector,
)
from .exppoly import ExpPoly
from .model import make_context, parse_rational
from .pricing import ClosedFormSolution, OptionSpec, bs_price
from .transforms import (
    FiniteTransform,
    TransformDomainError,
    certify_transform,
    compose,
)


class ConfigError(Exception):
    """Bad configuration or usage; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    r: Fraction = Fraction(1, 20)
    sigma2: Fraction = Fraction(1, 25)
    strike: float = 100.0
    maturity: float = 1.0
    kind: str = "call"
    grid_t: tuple = (0.0, 0.8)
    grid_x: tuple = (math.log(0.5), math.log(200.0))
    nt: int = 801
    nx: int = 601
    pipeline: tuple = ()
    residual_rel: float = 5e-4
    group_law_abs: float = 1e-10
    format: str = "json"
    out: str = None


_CONFIG_KEYS = (
    "r", "sigma2", "strike", "maturity", "kind", "grid_t", "grid_x",
    "nt", "nx", "pipeline", "residual_rel", "group_law_abs", "format", "out",
)


def _parse_range(text: str, key: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 2:
        raise ConfigError(f"{key} must be 'lo:hi', got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"{key} bounds must be numbers, got {text!r}") from None
    if not lo < hi:
        raise ConfigError(f"{key} needs lo < hi, got {text!r}")
    return (lo, hi)


def parse_pipeline(text: str) -> tuple:
    """Parse "i:kappa,i:kappa" into ((i, kappa), ...)."""
    text = text.strip()
    if not text:
        return ()
    stages = []
    for chunk in text.split(","):
        parts = chunk.split(":")
        if len(parts) != 2:
            raise ConfigError(f"pipeline stage must be 'i:kappa', got {chunk!r}")
        try:
            i = int(parts[0])
            kappa = float(parts[1])
        except ValueError:
            raise ConfigError(f"bad pipeline stage {chunk!r}") from None
        stages.append((i, kappa))
    return tuple(stages)


def _coerce(key: str, raw: str):
    try:
        if key in ("r", "sigma2"):
            return parse_rational(raw)
        if key in ("strike", "maturity", "residual_rel", "group_law_abs"):
            value = float(raw)
            if not value > 0:
                raise ConfigError(f"{key} must be positive, got {raw!r}")
            return value
        if key in ("nt", "nx"):
            value = int(raw)
            if value < 2:
                raise ConfigError(f"{key} must be at least 2, got {raw!r}")
            return value
        if key in ("grid_t", "grid_x"):
            return _parse_range(raw, key)
        if key == "pipeline":
            return parse_pipeline(raw)
        if key == "kind":
            if raw not in ("call", "put"):
                raise ConfigError(f"kind must be call or put, got {raw!r}")
            return raw
        if key == "format":
            if raw not in ("json", "csv"):
                raise ConfigError(f"format must be json or csv, got {raw!r}")
            return raw
        if key == "out":
            return raw
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None
    raise ConfigError(f"unknown config key: {key!r}")


def load_config_file(path: str) -> dict:
    """Flat "key = value" lines; '#' starts a comment; unknown keys rejected."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ConfigError(
                    f"{path}:{lineno}: expected 'key = value', got {line.rstrip()!r}"
                )
            key, raw = (part.strip() for part in body.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown config key: {key!r}")
            values[key] = _coerce(key, raw)
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = replace(cfg, **load_config_file(args.config))
    flag_map = {
        "r": args.r,
        "sigma2": args.sigma2,
        "strike": args.strike,
        "maturity": args.maturity,
        "grid_t": args.grid_t,
        "grid_x": args.grid_x,
        "nt": args.nt,
        "nx": args.nx,
        "pipeline": args.pipeline,
        "residual_rel": args.tol,
        "format": args.format,
        "out": args.out,
    }
    overrides = {}
    for key, raw in flag_map.items():
        if raw is None:
            continue
        overrides[key] = _coerce(key, str(raw))
    return replace(cfg, **overrides)


def _json_bytes(obj) -> bytes:
    return (
        json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    ).encode("utf-8")


def _emit(data: bytes, out: str | None) -> None:
    if out:
        parent = os.path.dirname(out)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _context(cfg: RunConfig):
    return make_context(cfg.r, cfg.sigma2)


def _grid(cfg: RunConfig):
    try:
        return make_grid(
            cfg.grid_t[0], cfg.grid_t[1], cfg.nt,
            cfg.grid_x[0], cfg.grid_x[1], cfg.nx,
        )
    except ValueError as exc:
        raise ConfigError(f"bad grid: {exc}") from None


def _sample_nu(ctx) -> Isovector:
    """Deterministic two-mode solution isovector used by verify/brackets."""
    modes = SolutionSpec.single(1, ctx.r, 0) + SolutionSpec.mode_for(1, ctx)
    return solution_isovector(modes, ctx, name="N_u")


# -- subcommands -----------------------------------------------------------


def cmd_verify(cfg: RunConfig, debug_faulty_n5: bool = False) -> int:
    ctx = _context(cfg)
    candidates = []
    for i in range(1, 7):
        N = basis_isovector(i, ctx)
        if i == 5 and debug_faulty_n5:
            N = Isovector(
                (N.Nt, N.Nx, ExpPoly.zero(), N.NA, N.NB), name="N5[h:=0]"
            )
        candidates.append(N)
    candidates.append(_sample_nu(ctx))
    reports = [verify_isovector(N, ctx) for N in candidates]
    all_passed = all(rep.passed for rep in reports)
    obj = {
        "schema": 1,
        "command": "verify",
        "model": ctx.to_json(),
        "isovectors": [rep.to_json() for rep in reports],
        "all_passed": all_passed,
    }
    _emit(_json_bytes(obj), cfg.out)
    return 0 if all_passed else 1


def cmd_brackets(cfg: RunConfig) -> int:
    ctx = _context(cfg)
    table = structure_constants(ctx)
    entries = []
    for i in range(1, 7):
        for j in range(1, 7):
            terms = table[(i, j)]
            entries.append(
                {
                    "i": i,
                    "j": j,
                    "terms": [{"k": k, "coeff": str(c)} for k, c in terms],
                    "pretty": pretty_combination(terms),
                }
            )

    Nu = _sample_nu(ctx)
    Nv = solution_isovector(SolutionSpec.mode_for(2, ctx), ctx, name="N_v")
    basis = [basis_isovector(i, ctx) for i in range(1, 7)]
    j_ideal = all(in_solution_ideal(bracket(N, Nu), ctx) for N in basis)
    uv_zero = all(c.is_zero() for c in bracket(Nu, Nv).components)
    duality = True
    for M in basis + [Nu]:
        for N in basis + [Nu]:
            left = gh_of(bracket(M, N))
            right = bracket_gh(M, N)
            if left.g != right.g or left.h != right.h:
                duality = False
    checks = {
        "[Ni,Nu] in J": "pass" if j_ideal else "fail",
        "[Nu,Nv]=0": "pass" if uv_zero else "fail",
        "gh duality": "pass" if duality else "fail",
    }
    ok = j_ideal and uv_zero and duality

    if cfg.format == "csv":
        buf = io.StringIO()
        buf.write("i,j,entry\n")
        for e in entries:
            buf.write(f"{e['i']},{e['j']},{e['pretty']}\n")
        _emit(buf.getvalue().encode(), cfg.out)
    else:
        obj = {
            "schema": 1,
            "command": "brackets",
            "model": ctx.to_json(),
            "table": entries,
            "j_checks": checks,
        }
        _emit(_json_bytes(obj), cfg.out)
    return 0 if ok else 1


def cmd_transform(cfg: RunConfig) -> int:
    if not cfg.pipeline:
        raise ConfigError("transform needs a nonempty pipeline ('i:kappa,...')")
    if not cfg.out:
        raise ConfigError("transform needs --out (directory for stage files)")
    ctx = _context(cfg)
    spec = OptionSpec(cfg.strike, cfg.maturity, cfg.kind)
    grid = _grid(cfg)
    call = ClosedFormSolution(spec, ctx)
    try:
        transforms = [
            FiniteTransform(i, kappa, frame="price") for i, kappa in cfg.pipeline
        ]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    os.makedirs(cfg.out, exist_ok=True)
    verdicts = []
    for stage in range(1, len(transforms) + 1):
        pipe = compose(*transforms[:stage])
        try:
            result = certify_transform(pipe, call, grid, ctx, cfg.residual_rel)
        except TransformDomainError as exc:
            obj = {
                "schema": 1,
                "command": "transform",
                "error": {
                    "stage": stage,
                    "kind": "pullback-out-of-domain",
                    "message": str(exc),
                    "n_clipped": exc.n_clipped,
                    "n_total": exc.n_total,
                },
            }
            sys.stdout.buffer.write(_json_bytes(obj))
            return 1
        csv_path = os.path.join(cfg.out, f"stage_{stage}.csv")
        write_csv(result.samples, csv_path)
        verdicts.append(
            {
                "stage": stage,
                "transforms": pipe.to_json(),
                "csv": os.path.basename(csv_path),
                **result.to_json(),
            }
        )
    obj = {
        "schema": 1,
        "command": "transform",
        "model": ctx.to_json(),
        "option": {"strike": cfg.strike, "maturity": cfg.maturity, "kind": cfg.kind},
        "stages": verdicts,
        "all_passed": all(v["verdict"] == "pass" for v in verdicts),
    }
    data = _json_bytes(obj)
    with open(os.path.join(cfg.out, "verdicts.json"), "wb") as fh:
        fh.write(data)
    sys.stdout.buffer.write(data)
    return 0 if obj["all_passed"] else 1


def cmd_price(cfg: RunConfig) -> int:
    ctx = _context(cfg)
    spec = OptionSpec(cfg.strike, cfg.maturity, cfg.kind)
    grid = _grid(cfg)
    if grid.t_values[-1] > spec.maturity + 1e-12:
        raise ConfigError(
            f"grid_t extends past maturity {spec.maturity}"
        )
    T, X = grid.meshes()
    values = bs_price(spec, ctx, T, np.exp(X))
    sol = GridSolution(grid, values, frame="price")
    if cfg.format == "csv":
        buf = io.StringIO()
        _write_csv_text(sol, buf)
        _emit(buf.getvalue().encode(), cfg.out)
    else:
        obj = {
            "schema": 1,
            "command": "price",
            "model": ctx.to_json(),
            "option": {
                "strike": cfg.strike, "maturity": cfg.maturity, "kind": cfg.kind,
            },
            "grid": {
                "t": [float(v) for v in grid.t_values],
                "S": [float(v) for v in grid.s_values],
            },
            "table": [[float(v) for v in row] for row in values],
        }
        _emit(_json_bytes(obj), cfg.out)
    return 0


def _write_csv_text(sol: GridSolution, buf) -> None:
    axis = sol.grid.x_values if sol.frame == "log" else sol.grid.s_values
    col = "x" if sol.frame == "log" else "S"
    buf.write(f"t,{col},value\n")
    for i, tv in enumerate(sol.grid.t_values):
        for j, uv in enumerate(axis):
            buf.write(f"{float(tv)!r},{float(uv)!r},{float(sol.values[i, j])!r}\n")


_FD_LEVELS = ((301, 101), (601, 201), (1201, 401))


def cmd_residual(cfg: RunConfig) -> int:
    ctx = _context(cfg)
    spec = OptionSpec(cfg.strike, cfg.maturity, cfg.kind)
    grid = _grid(cfg)
    call = ClosedFormSolution(spec, ctx)
    T, X = grid.meshes()
    sol_price = GridSolution(grid, call.value(T, np.exp(X)), frame="price")
    rep_e = residual_e(sol_price, ctx)
    rep_e2 = residual_e2(GridSolution(grid, sol_price.values, frame="log"), ctx)

    # strike-centered convergence study for the FD solver
    x_mid = math.log(cfg.strike)
    errors = []
    terminal_ok = True
    fd_report = None
    for nx, nt in _FD_LEVELS:
        g = make_grid(0.0, spec.maturity, nt, x_mid - 3.0, x_mid + 3.0, nx)
        fd = fd_solve(spec, ctx, g)
        if not np.array_equal(fd.values[-1], spec.payoff(g.s_values)):
            terminal_ok = False
        j = (nx - 1) // 2
        err = abs(fd.values[0, j] - bs_price(spec, ctx, 0.0, cfg.strike))
        errors.append(float(err))
        fd_report = residual_e2(fd, ctx)
    ratios = [errors[i] / errors[i + 1] for i in range(len(errors) - 1)]

    obj = {
        "schema": 1,
        "command": "residual",
        "model": ctx.to_json(),
        "option": {
            "strike": cfg.strike, "maturity": cfg.maturity, "kind": cfg.kind,
        },
        "closed_form": {"E": rep_e.to_json(), "E2": rep_e2.to_json()},
        "fd": {
            "levels": [{"nx": nx, "nt": nt} for nx, nt in _FD_LEVELS],
            "errors_at_strike": errors,
            "convergence_ratios": ratios,
            "terminal_matches_payoff": terminal_ok,
            "finest_E2": fd_report.to_json(),
        },
    }
    if cfg.format == "csv":
        buf = io.StringIO()
        buf.write("section,key,value\n")
        for op, rep in (("E", rep_e), ("E2", rep_e2)):
            for key, value in sorted(rep.to_json().items()):
                buf.write(f"closed_form.{op},{key},{value}\n")
        for idx, err in enumerate(errors):
            buf.write(f"fd,error_level_{idx},{err!r}\n")
        for idx, ratio in enumerate(ratios):
            buf.write(f"fd,ratio_{idx},{ratio!r}\n")
        buf.write(f"fd,terminal_matches_payoff,{terminal_ok}\n")
        _emit(buf.getvalue().encode(), cfg.out)
    else:
        _emit(_json_bytes(obj), cfg.out)
    return 0


# -- entry point -------------------------------------------------------------


def _add_common_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--r", help="interest rate as p/q")
    sp.add_argument("--sigma2", help="variance rate as p/q")
    sp.add_argument("--strike", type=float)
    sp.add_argument("--maturity", type=float)
    sp.add_argument("--grid-t", dest="grid_t", help="t range as lo:hi")
    sp.add_argument("--grid-x", dest="grid_x", help="x range as lo:hi")
    sp.add_argument("--nt", type=int)
    sp.add_argument("--nx", type=int)
    sp.add_argument("--pipeline", help="transform pipeline 'i:kappa,i:kappa'")
    sp.add_argument("--tol", type=float, help="relative residual tolerance")
    sp.add_argument("--format", choices=("json", "csv"))
    sp.add_argument("--out", help="output file (or directory for transform)")
    sp.add_argument("--config", help="flat key=value config file")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bssym",
        description="symmetry algebra of the pricing equation: verification, "
        "brackets, flows, pricing and residual audits",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("verify", "brackets", "transform", "price", "residual"):
        sp = sub.add_parser(name)
        _add_common_flags(sp)
        if name == "verify":
            sp.add_argument(
                "--debug-faulty-n5",
                action="store_true",
                help="replace N5 by a deliberately broken variant (h forced to 0)",
            )
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "verify":
            return cmd_verify(cfg, debug_faulty_n5=args.debug_faulty_n5)
        if args.command == "brackets":
            return cmd_brackets(cfg)
        if args.command == "transform":
            return cmd_transform(cfg)
        if args.command == "price":
            return cmd_price(cfg)
        if args.command == "residual":
            return cmd_residual(cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
