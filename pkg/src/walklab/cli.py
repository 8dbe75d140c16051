"""``walklab`` command line.

Exit codes: 0 success, 2 configuration error, 3 validation or check failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .cayley import is_connected, validate_connection_set
from .exceptions import ConfigError, WalklabError
from .groups import FiniteGroup, element_set, is_subgroup_with_id
from .io import (
    ExperimentConfig,
    atomic_write_text,
    dumps_matrix,
    dumps_probabilities,
    dumps_report,
    load_config,
)
from .operators import (
    EVOLUTION_TOL,
    angle_to_json,
    discretization_check,
    power,
    unitarity_residual,
)
from .phenomena import (
    ThetaSchedule,
    certify_ium,
    detect_ium,
    detect_period,
    detect_pst,
    evolve_schedule,
    pst_schedule,
    transfer_map,
)
from .tessellation import (
    ConnectionPartition,
    build_tessellations,
    classify_covering,
    commute_matrix,
    commute_settheoretic,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FAIL = 3
UNITARITY_LIMIT = 1e-8


class CheckFailed(Exception):
    """Raised by a command after its report is written, to request exit code 3."""


def _partition(cfg: ExperimentConfig) -> ConnectionPartition:
    C = validate_connection_set(cfg.group, cfg.connection)
    return ConnectionPartition(C, cfg.partition, overlap_allowed=cfg.overlap)


def _require(cfg: ExperimentConfig, *keys):
    missing = [k for k in keys if getattr(cfg, k) is None]
    if missing:
        raise ConfigError(f"$: missing required field(s) {missing} for this command")


def _tol(args, cfg: ExperimentConfig, default: float = EVOLUTION_TOL) -> float:
    if args.tol is not None:
        return args.tol
    return cfg.tol if cfg.tol is not None else default


def _label_pairs(G: FiniteGroup, pairs):
    out = []
    for p in pairs:
        q = dict(p)
        q["source"] = G.label(p["source"])
        q["target"] = G.label(p["target"])
        out.append(q)
    return out


def _header(command: str, cfg: ExperimentConfig) -> dict:
    return {
        "command": command,
        "name": cfg.name,
        "group": {"name": cfg.group.name, "order": cfg.group.order, "abelian": cfg.group.is_abelian},
    }


def _emit(out: Path, filename: str, report: dict) -> Path:
    path = atomic_write_text(out / filename, dumps_report(report))
    print(f"wrote {path}")
    return path


def _schedule_from_thetas(cfg: ExperimentConfig, P: ConnectionPartition) -> ThetaSchedule:
    if len(cfg.thetas) != P.k:
        raise ConfigError(f"$.thetas: {len(cfg.thetas)} angles given for {P.k} pieces")
    return ThetaSchedule(tuple(cfg.thetas), cfg.T or 1, "custom")


# commands


def cmd_validate(cfg: ExperimentConfig, args) -> dict:
    G = cfg.group
    report = _header("validate", cfg)
    failures = []

    try:
        C = validate_connection_set(G, cfg.connection)
    except WalklabError as exc:
        report["connection"] = {"valid": False, "error": str(exc)}
        failures.append(str(exc))
        C = None
    else:
        report["connection"] = {
            "valid": True,
            "size": len(C),
            "generates": C.generates,
            "power_closed": C.power_closed,
            "connected": is_connected(C),
        }

    pieces = []
    for i, piece in enumerate(cfg.partition):
        entry = {"index": i, "elements": [G.label(g) for g in element_set(piece)]}
        try:
            entry["subgroup"] = is_subgroup_with_id(G, piece)
        except WalklabError as exc:
            entry["subgroup"] = False
            entry["error"] = str(exc)
        if not entry["subgroup"]:
            failures.append(f"piece {i}: together with the identity it is not a subgroup")
        entry["gamma"] = len(element_set(piece)) + 1
        pieces.append(entry)
    report["pieces"] = pieces

    if C is not None and not failures:
        try:
            P = ConnectionPartition(C, cfg.partition, overlap_allowed=cfg.overlap)
            tess = build_tessellations(P)
            report["covering"] = classify_covering(P, tess).to_dict(G)
            k = P.k
            settheoretic = [[commute_settheoretic(G, P.pieces[i], P.pieces[j]) for j in range(k)] for i in range(k)]
            matrix = [[commute_matrix(tess[i].adjacency, tess[j].adjacency) for j in range(k)] for i in range(k)]
            report["commutation"] = {"settheoretic": settheoretic, "matrix": matrix,
                                     "all_commute": all(all(r) for r in matrix)}
        except WalklabError as exc:
            failures.append(str(exc))

    report["failures"] = failures
    report["pass"] = not failures
    print(f"connection: {report['connection']}")
    for p in pieces:
        print(f"piece {p['index']}: subgroup={p['subgroup']} gamma={p['gamma']}")
    if "covering" in report:
        cov = report["covering"]
        print(f"covering: {cov['kind']}, uniform={cov['uniform']}, k={cov['k']}, "
              f"gamma={cov['gamma_total']}, shared edges={len(cov['shared_edges'])}")
        print(f"all pieces commute: {report['commutation']['all_commute']}")
    _emit(args.out, "validate_report.json", report)
    if failures:
        for f in failures:
            print(f"FAIL: {f}", file=sys.stderr)
        raise CheckFailed()
    return report


def cmd_evolve(cfg: ExperimentConfig, args) -> dict:
    _require(cfg, "thetas", "T")
    P = _partition(cfg)
    schedule = _schedule_from_thetas(cfg, P)
    U = evolve_schedule(P, schedule.thetas)
    UT = power(U, schedule.T)
    probs = np.abs(UT.T) ** 2  # row a = distribution from source a
    residual = unitarity_residual(U)
    out = args.out
    for name, text in [("U.csv", dumps_matrix(U.matrix)), ("UT.csv", dumps_matrix(UT)),
                       ("probabilities.csv", dumps_probabilities(probs))]:
        print(f"wrote {atomic_write_text(out / name, text)}")
    report = _header("evolve", cfg)
    report.update({
        "schedule": schedule.to_dict(),
        "unitarity_residual": residual,
        "unitarity_limit": UNITARITY_LIMIT,
        "vertices": [cfg.group.label(g) for g in cfg.group.elements()],
        "pass": residual <= UNITARITY_LIMIT,
    })
    print(f"unitarity residual: {residual:.3e}")
    _emit(out, "evolve_report.json", report)
    if not report["pass"]:
        raise CheckFailed()
    return report


def cmd_pst(cfg: ExperimentConfig, args) -> dict:
    P = _partition(cfg)
    tol = _tol(args, cfg)
    if cfg.thetas is not None:
        schedule = _schedule_from_thetas(cfg, P)
    else:
        _require(cfg, "targets", "T")
        schedule = pst_schedule(P, cfg.T, cfg.targets)
    U = evolve_schedule(P, schedule.thetas)
    result = detect_pst(U, schedule.T, tol)
    witness = dict(result.witness)
    witness["pairs"] = _label_pairs(cfg.group, witness["pairs"])
    if "permutation" in witness:
        witness["permutation"] = [cfg.group.label(int(b)) for b in witness["permutation"]]
    passed = result.passed
    if schedule.intent == "pst":
        expected = transfer_map(P, schedule)
        witness["transfer_element"] = cfg.group.label(schedule.target_element)
        matches = result.witness.get("permutation") == [int(x) for x in expected]
        witness["matches_expected_transfer"] = matches
        passed = passed and matches
    report = _header("pst", cfg)
    report.update({"schedule": schedule.to_dict(), "result": {**result.to_dict(), "witness": witness,
                                                              "pass": passed}, "pass": passed})
    print(f"pst at T={schedule.T}: pass={passed}, {len(witness['pairs'])} transfer pairs")
    _emit(args.out, "pst_report.json", report)
    if not passed:
        raise CheckFailed()
    return report


def cmd_ium(cfg: ExperimentConfig, args) -> dict:
    P = _partition(cfg)
    tol = _tol(args, cfg)
    if cfg.thetas is not None:
        schedule = _schedule_from_thetas(cfg, P)
        U = evolve_schedule(P, schedule.thetas)
        result = detect_ium(power(U, schedule.T), tol)
        result.witness["T"] = schedule.T
    else:
        _require(cfg, "T")
        schedule, result = certify_ium(P, cfg.T, tol)
    report = _header("ium", cfg)
    report.update({"schedule": schedule.to_dict(), "result": result.to_dict(), "pass": result.passed})
    w = result.witness
    print(f"ium at T={schedule.T}: pass={result.passed}, |entry| in [{w['min_abs']:.12f}, {w['max_abs']:.12f}],"
          f" target {w['expected']:.12f}")
    _emit(args.out, "ium_report.json", report)
    if not result.passed:
        raise CheckFailed()
    return report


def cmd_period(cfg: ExperimentConfig, args) -> dict:
    P = _partition(cfg)
    tol = _tol(args, cfg)
    if cfg.thetas is not None:
        schedule = _schedule_from_thetas(cfg, P)
    else:
        _require(cfg, "targets", "T")
        schedule = pst_schedule(P, cfg.T, cfg.targets)
    max_period = cfg.max_period or max(64, 4 * schedule.T)
    U = evolve_schedule(P, schedule.thetas)
    result = detect_period(U, max_period, tol)
    report = _header("period", cfg)
    report.update({"schedule": schedule.to_dict(), "result": result.to_dict(), "pass": result.passed})
    print(f"period: {result.witness['period']} (searched up to {max_period})")
    _emit(args.out, "period_report.json", report)
    if not result.passed:
        raise CheckFailed()
    return report


def cmd_discretize(cfg: ExperimentConfig, args) -> dict:
    _require(cfg, "theta", "Tmax")
    P = _partition(cfg)
    tol = _tol(args, cfg)
    result = discretization_check(P, cfg.theta, cfg.Tmax, tol)
    report = _header("discretize", cfg)
    report.update({"result": result.to_dict(), "pass": result.passed,
                   "schedule": {"intent": "discretize", "theta": angle_to_json(cfg.theta)}})
    print(f"discretization: max deviation {result.max_deviation:.3e} over T=0..{cfg.Tmax} (tol {tol:g})")
    _emit(args.out, "discretize_report.json", report)
    if not result.passed:
        raise CheckFailed()
    return report


COMMANDS = {
    "validate": (cmd_validate, "check connection set, pieces, covering and commutation"),
    "evolve": (cmd_evolve, "dump U, U^T and probability rows"),
    "pst": (cmd_pst, "schedule and/or certify perfect state transfer"),
    "ium": (cmd_ium, "schedule and/or certify instantaneous uniform mixing"),
    "period": (cmd_period, "find the period of U up to a global phase"),
    "discretize": (cmd_discretize, "compare U^T with the continuous-time walk"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="walklab", description="Staggered quantum walks on Cayley graphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, required=True, help="experiment config (JSON)")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
        p.add_argument("--tol", type=float, default=None, help="override the check tolerance")
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.tol is not None and not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    handler = COMMANDS[args.command][0]
    try:
        handler(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WalklabError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except CheckFailed:
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
