"""Batch front end.

Exit codes: 0 when the checked property holds, 1 when it fails, 2 on usage or
input errors.  ``--format json`` prints one JSON object per run.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import dynamics, ellipsoid, io, loops, quantum, symplectic
from .core import DimensionError, PlaneSpec, max_abs

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple
    tol: float = 1e-9
    hbar: float | None = None
    radius: float = 1.0
    plane: str = "conjugate"
    format: str = "text"
    seed: int | None = None
    samples: int = 1024
    t: float = 1.0
    dt: float = 1e-3
    times: tuple | None = None
    allow_nonsymplectic: bool = False
    random_symplectic: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.tol > 0:
            raise io.InputError("--tol must be positive")
        if self.hbar is not None and not self.hbar > 0:
            raise io.InputError("--hbar must be positive")
        if not self.radius > 0:
            raise io.InputError("--radius must be positive")


def axis_name(i: int, n: int) -> str:
    return f"x{i + 1}" if i < n else f"p{i - n + 1}"


def select_planes(spec: str, n: int) -> list[tuple[int, int]]:
    """Resolve a plane selector to zero-based coordinate pairs.

    ``conjugate`` (every x_j,p_j plane), ``all`` (every coordinate pair), ``j``
    (conjugate plane j, one-based) or ``i,k`` (one-based axes, 1..2n).
    """
    spec = spec.strip().lower()
    if spec == "conjugate":
        return [(j, n + j) for j in range(n)]
    if spec == "all":
        return [(i, k) for i in range(2 * n) for k in range(i + 1, 2 * n)]
    try:
        parts = [int(s) for s in spec.split(",")]
    except ValueError:
        raise io.InputError(f"--plane: cannot parse {spec!r}") from None
    if len(parts) == 1:
        j = parts[0]
        if not 1 <= j <= n:
            raise io.InputError(f"--plane {j}: mode index must be in 1..{n}")
        return [(j - 1, n + j - 1)]
    if len(parts) == 2:
        i, k = parts
        if i == k or not (1 <= i <= 2 * n and 1 <= k <= 2 * n):
            raise io.InputError(f"--plane {spec}: axes must be distinct and in 1..{2 * n}")
        return [(i - 1, k - 1)]
    raise io.InputError(f"--plane: cannot parse {spec!r}")


def _parse_times(text: str) -> tuple:
    try:
        return tuple(float(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid time list {text!r}") from None


# Commands.  Each returns (report dict, exit code, text lines).


def cmd_check_symplectic(cfg: RunConfig):
    M = io.read_matrix(cfg.inputs[0])
    if M.shape[0] % 2:
        raise io.InputError(f"{cfg.inputs[0]}: symplectic matrices have even size, got {M.shape[0]}")
    n = M.shape[0] // 2
    rep = symplectic.block_conditions_report(M, cfg.tol)
    det = float(np.linalg.det(M))
    ok = rep.symplectic
    report = {
        "command": "check-symplectic",
        "n": n,
        "tol": cfg.tol,
        "symplectic": ok,
        "residual_stjs": rep.stjs,
        "residual_sjst": rep.sjst,
        "block_conditions": rep.residuals,
        "det": det,
        "matrix": io.matrix_document(M),
    }
    lines = [
        f"matrix: {M.shape[0]}x{M.shape[0]} (n = {n})",
        f"  S^T J S - J   max residual {rep.stjs:.3e}",
        f"  S J S^T - J   max residual {rep.sjst:.3e}",
    ]
    lines += [f"  {k:<20s}  {v:.3e}{'  FAIL' if v > cfg.tol else ''}" for k, v in rep.residuals.items()]
    lines += [f"  det             {det:.15g}", f"symplectic: {'yes' if ok else 'no'} (tol {cfg.tol:g})"]
    return report, EXIT_OK if ok else EXIT_FAIL, lines


def cmd_egg_sections(cfg: RunConfig):
    M = io.read_matrix(cfg.inputs[0])
    if M.shape[0] % 2:
        raise io.InputError(f"{cfg.inputs[0]}: phase-space matrices have even size, got {M.shape[0]}")
    n = M.shape[0] // 2
    ok_sym, resid = symplectic.is_symplectic(M, cfg.tol)
    base = {"command": "egg-sections", "n": n, "radius": cfg.radius, "tol": cfg.tol, "symplectic": ok_sym, "residual_stjs": resid}
    if not ok_sym and not cfg.allow_nonsymplectic:
        base["error"] = "matrix is not symplectic; pass --allow-nonsymplectic to compute areas anyway"
        return base, EXIT_FAIL, [f"not symplectic (residual {resid:.3e}); use --allow-nonsymplectic"]
    if abs(np.linalg.det(M)) < 1e-300:
        raise io.InputError(f"{cfg.inputs[0]}: matrix is singular")
    e = ellipsoid.egg(symplectic.SymplecticMatrix(M, cfg.tol), cfg.radius) if ok_sym else ellipsoid.linear_image(M, cfg.radius)
    target = math.pi * cfg.radius**2
    rows = []
    egg_ok = True
    for i, k in select_planes(cfg.plane, n):
        plane = PlaneSpec.coordinate(n, i, k)
        sec = ellipsoid.section_area(e, plane).area
        sha = ellipsoid.shadow_area(e, plane).area
        conj = k == i + n
        if conj and abs(sec - target) > cfg.tol * target:
            egg_ok = False
        rows.append(
            {
                "plane": f"{axis_name(i, n)},{axis_name(k, n)}",
                "axes": [i + 1, k + 1],
                "conjugate": conj,
                "section_area": sec,
                "shadow_area": sha,
                "section_deviation": sec - target,
                "shadow_deviation": sha - target,
            }
        )
    base.update({"reference_area": target, "planes": rows, "conjugate_sections_equal": egg_ok})
    lines = [f"{'plane':<8s} {'section':>20s} {'shadow':>20s} {'section - piR^2':>18s}"]
    lines += [f"{r['plane']:<8s} {r['section_area']:20.15f} {r['shadow_area']:20.15f} {r['section_deviation']:18.3e}" for r in rows]
    lines.append(f"conjugate sections = pi R^2: {'yes' if egg_ok else 'no'}")
    return base, EXIT_OK if egg_ok else EXIT_FAIL, lines


def cmd_poincare(cfg: RunConfig):
    loop = io.read_loop(cfg.inputs[0], cfg.samples)
    value = loops.poincare_invariant(loop)
    report = {"command": "poincare", "n": loop.n, "samples": loop.N, "tol": cfg.tol, "invariant": value}
    lines = [f"I(gamma) = {value:.15g}  (n = {loop.n}, N = {loop.N})"]
    M = None
    if len(cfg.inputs) > 1 and cfg.inputs[1] is not None:
        M = io.read_matrix(cfg.inputs[1])
        source = str(cfg.inputs[1])
    elif cfg.random_symplectic:
        M = symplectic.random_symplectic(loop.n, cfg.seed, 1.0).matrix
        source = f"random_symplectic(seed={cfg.seed})"
    if M is None:
        return report, EXIT_OK, lines
    if M.shape != (2 * loop.n, 2 * loop.n):
        raise io.InputError(f"matrix is {M.shape[0]}x{M.shape[1]}, loop needs {2 * loop.n}x{2 * loop.n}")
    moved = loops.poincare_invariant(loops.transform_loop(M, loop))
    diff = moved - value
    ok = abs(diff) <= cfg.tol * (1.0 + abs(value))
    report.update(
        {
            "matrix_source": source,
            "matrix_symplectic": symplectic.is_symplectic(M, cfg.tol)[0],
            "transformed_invariant": moved,
            "difference": diff,
            "preserved": ok,
        }
    )
    lines += [f"I(S gamma) = {moved:.15g}", f"difference = {diff:.3e}  preserved: {'yes' if ok else 'no'}"]
    return report, EXIT_OK if ok else EXIT_FAIL, lines


def cmd_flow(cfg: RunConfig):
    spec = io.read_system(cfg.inputs[0])
    ball = cfg.extra.get("ball")
    report = {"command": "flow", "t": cfg.t, "tol": cfg.tol, "system": spec["kind"]}
    lines = []
    if spec["kind"] == "quadratic":
        h = dynamics.QuadraticHamiltonian(spec["M"])
        try:
            phi = dynamics.linear_flow(h, cfg.t, tol=math.inf)
        except OverflowError:
            report["diverged_at"] = cfg.t
            return report, EXIT_FAIL, [f"flow overflowed at t = {cfg.t:g}"]
        z0 = spec["z0"]
        zt = phi.matrix @ z0
        residual = symplectic.is_symplectic(phi.matrix)[1]
        report.update({"n": h.n, "method": "matrix exponential", "energy_drift": h.energy(zt) - h.energy(z0)})
    else:
        try:
            system = dynamics.ScalarPotentialSystem.catalog(spec["potential"], spec["params"], spec["mass"])
        except ValueError as exc:
            raise io.InputError(f"{cfg.inputs[0]}: {exc}") from exc
        if ball is not None:
            raise io.InputError("--ball shadow tracking needs a quadratic system")
        z0 = spec["z0"]
        try:
            traj = dynamics.integrate_flow(system, z0, cfg.t, cfg.dt)
        except dynamics.FlowDivergence as exc:
            report.update({"n": 1, "potential": spec["potential"], "dt": cfg.dt, "diverged_at": exc.time})
            return report, EXIT_FAIL, [f"trajectory diverged at t = {exc.time:.6g}"]
        fin = traj.final
        zt = fin.state
        residual = fin.symplectic_residual
        report.update(
            {
                "n": 1,
                "potential": spec["potential"],
                "dt": cfg.dt,
                "method": "rk4 + variational equations",
                "energy_drift": system.energy(*zt) - system.energy(*z0),
            }
        )
    ok = residual <= cfg.tol
    report.update(
        {
            "initial_state": z0,
            "final_state": zt,
            "return_distance": float(np.max(np.abs(zt - z0))),
            "jacobian_symplectic_residual": residual,
        }
    )
    lines += [
        f"final state      {np.array2string(zt, precision=12)}",
        f"|z(t) - z(0)|    {report['return_distance']:.3e}",
        f"Jacobian residual {residual:.3e} (tol {cfg.tol:g})",
    ]
    if ball is not None:
        j = cfg.extra.get("plane_index", 1)
        if not 1 <= j <= h.n:
            raise io.InputError(f"--plane {j}: mode index must be in 1..{h.n}")
        times = cfg.times if cfg.times is not None else tuple(float(x) for x in np.linspace(0.0, cfg.t, 11))
        target = math.pi * ball**2
        hist = dynamics.shadow_history(h, ball, times, j - 1)
        shadows = [{"t": t, "shadow_area": a, "ratio": a / target} for t, a in hist]
        never_below = all(a >= target * (1.0 - cfg.tol) for _, a in hist)
        ok = ok and never_below
        report.update({"ball_radius": ball, "plane": j, "shadows": shadows, "shadows_never_below": never_below})
        lines.append(f"{'t':>10s} {'shadow':>20s} {'shadow / piR^2':>16s}")
        lines += [f"{s['t']:10.4f} {s['shadow_area']:20.15f} {s['ratio']:16.12f}" for s in shadows]
        lines.append(f"shadow never below pi R^2: {'yes' if never_below else 'no'}")
    return report, EXIT_OK if ok else EXIT_FAIL, lines


def cmd_uncertainty(cfg: RunConfig):
    path = cfg.inputs[0]
    M, file_hbar = io.read_covariance(path)
    hbar = cfg.hbar if cfg.hbar is not None else (file_hbar if file_hbar is not None else 1.0)
    if not hbar > 0:
        raise io.InputError(f"{path}: hbar must be positive")
    if M.shape[0] % 2:
        raise io.InputError(f"{path}: covariance matrices have even size, got {M.shape[0]}")
    if max_abs(M - M.T) > 1e-12 * max(1.0, max_abs(M)):
        raise io.InputError(f"{path}: covariance matrix is not symmetric")
    try:
        rep = quantum.uncertainty_report(M, hbar, cfg.tol)
    except (ValueError, DimensionError) as exc:
        raise io.InputError(f"{path}: {exc}") from exc
    n = M.shape[0] // 2
    report = {
        "command": "uncertainty",
        "n": n,
        "hbar": hbar,
        "tol": cfg.tol,
        "rs_residuals": rep.rs_residuals,
        "heisenberg_residuals": rep.heisenberg_residuals,
        "min_eigenvalue": rep.min_eigenvalue,
        "section_areas": rep.section_areas,
        "symplectic_spectrum": rep.spectrum,
        "quantum_valid": rep.quantum_valid,
        "rs_all": rep.rs_all,
        "saturated_modes": [j + 1 for j in rep.saturated_modes],
        "quantum_blob": rep.blob,
        "covariance": io.matrix_document(M),
    }
    lines = [f"{'mode':>4s} {'RS residual':>14s} {'Heisenberg':>14s} {'section area':>16s}"]
    for j in range(n):
        area = "-" if rep.section_areas is None else f"{rep.section_areas[j]:.12f}"
        lines.append(f"{j + 1:4d} {rep.rs_residuals[j]:14.6e} {rep.heisenberg_residuals[j]:14.6e} {area:>16s}")
    lines += [
        f"min eigenvalue of Sigma + i hbar/2 J: {rep.min_eigenvalue:.6e}",
        f"quantum valid: {'yes' if rep.quantum_valid else 'no'}",
        f"saturated modes: {report['saturated_modes'] or 'none'}",
        f"quantum blob: {'yes' if rep.blob else 'no'}",
    ]
    return report, EXIT_OK if rep.quantum_valid else EXIT_FAIL, lines


COMMANDS = {
    "check-symplectic": cmd_check_symplectic,
    "egg-sections": cmd_egg_sections,
    "poincare": cmd_poincare,
    "flow": cmd_flow,
    "uncertainty": cmd_uncertainty,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasegeom", description="Linear symplectic geometry checks.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="comparison tolerance (default 1e-9)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-symplectic", parents=[common], help="residuals of S^T J S = J and its block forms")
    p.add_argument("matrix")

    p = sub.add_parser("egg-sections", parents=[common], help="section and shadow areas of S(B_R)")
    p.add_argument("matrix")
    p.add_argument("--radius", "-R", type=float, default=1.0)
    p.add_argument("--plane", default="conjugate", help="conjugate | all | j | i,k (one-based)")
    p.add_argument("--allow-nonsymplectic", action="store_true")

    p = sub.add_parser("poincare", parents=[common], help="action integral of a loop and its symplectic image")
    p.add_argument("loop")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--matrix")
    g.add_argument("--random-symplectic", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", "-N", type=int, default=1024)

    p = sub.add_parser("flow", parents=[common], help="flow of a quadratic or 1-dof system")
    p.add_argument("system")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--ball", type=float, default=None, help="track shadows of the ball of this radius")
    p.add_argument("--plane", type=int, default=1, help="conjugate plane for --ball (one-based)")
    p.add_argument("--times", type=_parse_times, default=None, help="comma-separated times for --ball")

    p = sub.add_parser("uncertainty", parents=[common], help="uncertainty diagnostics of a covariance matrix")
    p.add_argument("covariance")
    p.add_argument("--hbar", type=float, default=None, help="overrides the file's hbar (default 1)")
    return parser


def _config(args) -> RunConfig:
    c = args.command
    if c == "check-symplectic":
        return RunConfig(c, (args.matrix,), args.tol, format=args.format)
    if c == "egg-sections":
        return RunConfig(c, (args.matrix,), args.tol, radius=args.radius, plane=args.plane, format=args.format, allow_nonsymplectic=args.allow_nonsymplectic)
    if c == "poincare":
        if args.samples < loops.MIN_SAMPLES:
            raise io.InputError(f"--samples must be at least {loops.MIN_SAMPLES}")
        return RunConfig(c, (args.loop, args.matrix), args.tol, format=args.format, seed=args.seed, samples=args.samples, random_symplectic=args.random_symplectic)
    if c == "flow":
        if args.ball is not None and not args.ball > 0:
            raise io.InputError("--ball must be positive")
        if not args.dt > 0:
            raise io.InputError("--dt must be positive")
        return RunConfig(c, (args.system,), args.tol, format=args.format, t=args.t, dt=args.dt, times=args.times, extra={"ball": args.ball, "plane_index": args.plane})
    return RunConfig(c, (args.covariance,), args.tol, hbar=args.hbar, format=args.format)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = _config(args)
        report, code, lines = COMMANDS[cfg.command](cfg)
    except (io.InputError, loops.OpenLoopError, DimensionError) as exc:
        if args.format == "json":
            stdout.write(io.dumps({"command": args.command, "error": str(exc)}))
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    if cfg.format == "json":
        stdout.write(io.dumps(report))
    else:
        stdout.write("\n".join(lines) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
