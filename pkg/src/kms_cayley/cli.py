"""Command-line front end.

Every subcommand prints one machine-readable payload (JSON unless a CSV
grid was requested) on standard output and exits 0.  Domain errors (sphere
below critical, endpoint mismatch, rank-zero limit requests) exit 2; usage
errors exit 1.  Output is deterministic byte for byte for fixed inputs.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .config import SolverConfig
from .cones import build_fan, membership, sphere_grid
from .errors import DomainError, KmsCayleyError, UsageError
from .groups import load_group, parse_word, validate_spec
from .limits import HMapCache, h_eval, n_infinity_sample, ray_limit
from .output import csv_lines, dumps
from .solvers import PartitionData, beta_of_u, critical_beta, u_of_beta
from .states import (DihedralHarmonic, ExponentialHarmonic, KmsState,
                     critical_state, harmonic_residual, kms_condition_check,
                     sample_q_beta)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(parser):
    parser.add_argument("--group", required=True,
                        help="built-in name (heisenberg, dihedral_infinite, "
                             "zn:<n>, cyclic:<m>) or a group JSON file")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--check", action="store_true",
                        help="re-verify the defining residual and fail if above tolerance")
    parser.add_argument("--eps-root", type=float, default=None)
    parser.add_argument("--eps-grad", type=float, default=None)
    parser.add_argument("--eps-geom", type=float, default=None)
    parser.add_argument("--eps-limit", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="kms-cayley", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the standing assumptions on a group")
    _common(p)

    p = sub.add_parser("critical-beta", help="least inverse temperature with abelian states")
    _common(p)

    p = sub.add_parser("beta-of-u", help="the beta making the partition sum at u equal one")
    _common(p)
    p.add_argument("--u", default=None,
                   help="comma-separated coordinates (omit for rank-zero groups)")

    p = sub.add_parser("q-beta", help="sphere of extreme abelian states at beta")
    _common(p)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--beta-critical", action="store_true")
    p.add_argument("--grid", type=int, default=64)

    p = sub.add_parser("kms-eval", help="evaluate a state on V_t V_u*")
    _common(p)
    p.add_argument("--beta-critical", action="store_true",
                   help="use the unique state at the critical beta")
    p.add_argument("--state", default=None,
                   help="JSON file {beta, mixture:[{w,u}|{w,dihedral_t}]}")
    p.add_argument("--t", required=True, help="comma-separated word")
    p.add_argument("--u-word", "--u", dest="u_word", required=True,
                   help="comma-separated word")

    p = sub.add_parser("harmonic-check", help="harmonicity defect on a Cayley ball")
    _common(p)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--u", default=None, help="exponential vector coordinates")
    p.add_argument("--t-param", type=float, default=None, help="dihedral family parameter")
    p.add_argument("--radius", type=int, default=6)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("kms-check", help="equilibrium-identity violation across word pairs")
    _common(p)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--u", default=None)
    p.add_argument("--t-param", type=float, default=None)
    p.add_argument("--max-len", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("fan", help="dump the polyhedral cone fan")
    _common(p)

    p = sub.add_parser("ninf", help="zero-temperature limit points")
    _common(p)
    p.add_argument("--v", default=None, help="single direction, comma-separated")
    p.add_argument("--grid", type=int, default=None, help="sample a sphere grid")

    p = sub.add_parser("dihedral", help="the closed-form infinite-dihedral family")
    _common(p)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--t-param", type=float, required=True)
    p.add_argument("--range", dest="n_range", type=int, default=4)

    p = sub.add_parser("report", help="write CSV grids and figures to a directory")
    _common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--beta", type=float, action="append", default=None,
                   help="may repeat; defaults to critical + 0.5 and + 1.0")
    p.add_argument("--grid", type=int, default=180)
    return top


def _config(args) -> SolverConfig:
    return SolverConfig.from_env(eps_root=args.eps_root, eps_grad=args.eps_grad,
                                 eps_geom=args.eps_geom, eps_limit=args.eps_limit)


def _parse_vector(text: str, rank: int) -> np.ndarray:
    try:
        v = np.array([float(x) for x in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad vector {text!r}: {exc}")
    if v.shape != (rank,):
        raise UsageError(f"vector {text!r} has length {len(v)}, expected {rank}")
    return v


def _emit(payload, lines=None):
    if lines is not None:
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        sys.stdout.write(dumps(payload) + "\n")


def _fail_check(name, value, tol):
    raise DomainError(f"check failed: {name} = {value!r} exceeds {tol!r}")


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------

def _cmd_validate(args, spec, config):
    report = validate_spec(spec, config)
    payload = {"group": spec.name, "ok": report.ok,
               "errors": report.errors, "warnings": report.warnings}
    if not report.ok:
        _emit(payload)
        return EXIT_DOMAIN
    _emit(payload)
    return EXIT_OK


def _cmd_critical_beta(args, spec, config):
    data = PartitionData.from_spec(spec)
    beta0 = critical_beta(data, config)
    payload = {"group": spec.name, "beta0": beta0}
    if args.check:
        if spec.rank == 0:
            h0 = float(np.sum(np.exp(-beta0 * spec.F)))
        else:
            h0 = float(np.exp(PartitionData.from_spec(spec).log_partition(
                u_of_beta(data, beta0, config), beta0)))
        payload["residual"] = abs(h0 - 1.0)
        if payload["residual"] > config.eps_root:
            _fail_check("critical residual", payload["residual"], config.eps_root)
    _emit(payload)
    return EXIT_OK


def _cmd_beta_of_u(args, spec, config):
    data = PartitionData.from_spec(spec)
    if spec.rank and args.u is None:
        raise UsageError(f"--u with {spec.rank} coordinates is required")
    u = _parse_vector(args.u, spec.rank) if spec.rank else np.zeros(0)
    beta = beta_of_u(data, u, config)
    payload = {"group": spec.name, "u": u.tolist(), "beta": beta}
    if args.check:
        res = abs(data.log_partition(u, beta))
        payload["residual"] = res
        if res > config.eps_root:
            _fail_check("partition residual", res, config.eps_root)
    _emit(payload)
    return EXIT_OK


def _cmd_q_beta(args, spec, config):
    data = PartitionData.from_spec(spec)
    beta0 = critical_beta(data, config)
    beta = beta0 if args.beta_critical else args.beta
    if beta is None:
        raise UsageError("q-beta needs --beta or --beta-critical")
    if spec.rank < 1:
        raise DomainError("rank-zero group: the state space has no sphere; "
                          "use critical-beta")
    if beta < beta0 - config.eps_geom:
        raise DomainError(f"no abelian states at beta={beta!r} < beta0={beta0!r}")
    points = sample_q_beta(spec, beta, args.grid, config, beta0=beta0)
    rows = []
    for pt in points:
        rows.append({"u": pt.u.tolist(), "p": pt.probability_vector().tolist(),
                     "residual": pt.residual()})
    if args.check:
        worst = max((r["residual"] for r in rows), default=0.0)
        if worst > config.eps_root:
            _fail_check("sphere residual", worst, config.eps_root)
    if args.format == "csv":
        header = [f"u{i+1}" for i in range(spec.rank)] + \
                 [f"p_{s}" for s in spec.generators] + ["residual"]
        lines = csv_lines(header, [r["u"] + r["p"] + [r["residual"]] for r in rows])
        _emit(None, lines)
    else:
        _emit({"group": spec.name, "beta": beta, "beta0": beta0, "points": rows})
    return EXIT_OK


def _make_state(args, spec, config):
    if args.state and args.beta_critical:
        raise UsageError("choose one of --state / --beta-critical")
    if args.state:
        try:
            with open(args.state) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read state file: {exc}")
        return KmsState.from_json(spec, data)
    if args.beta_critical:
        beta0, psi = critical_state(spec, config)
        return KmsState(beta0, [(1.0, psi)])
    raise UsageError("kms-eval needs --state or --beta-critical")


def _cmd_kms_eval(args, spec, config):
    state = _make_state(args, spec, config)
    t = parse_word(spec, args.t)
    u = parse_word(spec, args.u_word)
    from .states import state_eval
    value = state_eval(state, t, u)
    payload = {"group": spec.name, "beta": state.beta,
               "t": list(t), "u": list(u), "value": value}
    if args.check:
        full = sum(state.cylinder_mass((s,)) for s in spec.generators)
        payload["mass_consistency"] = abs(full - state.cylinder_mass(()))
        if payload["mass_consistency"] > 1e-10:
            _fail_check("mass consistency", payload["mass_consistency"], 1e-10)
    _emit(payload)
    return EXIT_OK


def _make_harmonic(args, spec, config):
    if (args.u is None) == (args.t_param is None):
        raise UsageError("give exactly one of --u (exponential) / --t-param (dihedral)")
    if args.u is not None:
        return ExponentialHarmonic(spec, args.beta, _parse_vector(args.u, spec.rank))
    return DihedralHarmonic(spec, args.beta, args.t_param)


def _cmd_harmonic_check(args, spec, config):
    psi = _make_harmonic(args, spec, config)
    residual = harmonic_residual(psi, args.radius)
    payload = {"group": spec.name, "beta": psi.beta, "radius": args.radius,
               "residual": residual}
    if args.check and residual > args.tol:
        _fail_check("harmonic residual", residual, args.tol)
    _emit(payload)
    return EXIT_OK


def _cmd_kms_check(args, spec, config):
    psi = _make_harmonic(args, spec, config)
    violation = kms_condition_check(psi, args.max_len)
    payload = {"group": spec.name, "beta": psi.beta, "max_len": args.max_len,
               "violation": violation}
    if args.check and violation > args.tol:
        _fail_check("kms violation", violation, args.tol)
    _emit(payload)
    return EXIT_OK


def _cmd_fan(args, spec, config):
    fan = build_fan(spec, config)
    cones = []
    for cone in fan.cones.values():
        cones.append({"Z": list(cone.label), "dim": cone.dim,
                      "rays": cone.rays.tolist(),
                      "center": cone.center.tolist()})
    if fan.zero_cone is not None:
        cones.append({"Z": list(fan.zero_cone.label), "dim": 0,
                      "rays": [], "center": None})
    if args.check:
        for v in sphere_grid(spec.rank, 256):
            membership(fan, v, config)
    _emit({"group": spec.name, "rank": spec.rank, "cones": cones})
    return EXIT_OK


def _cmd_ninf(args, spec, config):
    if spec.rank < 1:
        raise DomainError("rank-zero group has no abelian zero-temperature "
                          "limit set; use critical-beta")
    fan = build_fan(spec, config)
    cache = HMapCache()
    if (args.v is None) == (args.grid is None):
        raise UsageError("give exactly one of --v / --grid")
    if args.v is not None:
        v = _parse_vector(args.v, spec.rank)
        norm = float(np.linalg.norm(v))
        if norm <= 0:
            raise UsageError("direction must be nonzero")
        v = v / norm
        point = h_eval(fan, v, cache, config)
        payload = {"group": spec.name, "v": v.tolist(), "p": point.as_dict(),
                   "support": sorted(point.support, key=spec.index)}
        if args.check:
            gap = float(np.max(np.abs(point.p - ray_limit(spec, v, fan=fan,
                                                          config=config).p)))
            payload["oracle_gap"] = gap
            if gap > config.eps_limit:
                _fail_check("oracle gap", gap, config.eps_limit)
        _emit(payload)
        return EXIT_OK

    samples = n_infinity_sample(fan, args.grid, cache, config)
    header = [f"v{i+1}" for i in range(spec.rank)] + \
             [f"p_{s}" for s in spec.generators]
    if args.check:
        header.append("oracle_gap")
    rows = []
    worst = 0.0
    for v, point in samples:
        row = list(v) + list(point.p)
        if args.check:
            gap = float(np.max(np.abs(point.p - ray_limit(spec, v, fan=fan,
                                                          config=config).p)))
            worst = max(worst, gap)
            row.append(gap)
        rows.append(row)
    if args.check and worst > config.eps_limit:
        _fail_check("oracle gap", worst, config.eps_limit)
    if args.format == "csv":
        _emit(None, csv_lines(header, rows))
    else:
        _emit({"group": spec.name,
               "points": [{"v": list(map(float, v)), "p": pt.as_dict()}
                          for v, pt in samples]})
    return EXIT_OK


def _cmd_dihedral(args, spec, config):
    psi = DihedralHarmonic(spec, args.beta, args.t_param)
    ns = list(range(-args.n_range, args.n_range + 1))
    payload = {
        "group": spec.name, "beta": psi.beta, "t_param": psi.t_param,
        "c_beta": psi.c_beta,
        "x": {str(n): psi.psi_element((n, 0)) for n in ns},
        "y": {str(n): psi.psi_element((n, 1)) for n in ns},
    }
    if args.check:
        residual = harmonic_residual(psi, 6)
        payload["residual"] = residual
        if residual > 1e-10:
            _fail_check("dihedral residual", residual, 1e-10)
    _emit(payload)
    return EXIT_OK


def _cmd_report(args, spec, config):
    from .report import write_report
    betas = args.beta
    written = write_report(spec, args.out, betas=betas, grid=args.grid,
                           config=config)
    _emit({"group": spec.name, "written": written})
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "critical-beta": _cmd_critical_beta,
    "beta-of-u": _cmd_beta_of_u,
    "q-beta": _cmd_q_beta,
    "kms-eval": _cmd_kms_eval,
    "harmonic-check": _cmd_harmonic_check,
    "kms-check": _cmd_kms_check,
    "fan": _cmd_fan,
    "ninf": _cmd_ninf,
    "dihedral": _cmd_dihedral,
    "report": _cmd_report,
}


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _config(args)
        spec = load_group(args.group)
        return _COMMANDS[args.command](args, spec, config)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except KmsCayleyError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
