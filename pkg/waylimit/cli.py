from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from collections.abc import Sequence
from typing import Any

import uvicorn
from pydantic import BaseModel, ValidationError

from waylimit.core.config import settings
from waylimit.core.logger import log_error, log_info
from waylimit.domain.channel_domain import FidelityOptions
from waylimit.domain.experiment_domain import RunConfig
from waylimit.domain.gate_domain import GateSpec
from waylimit.domain.model_domain import JCParams, OptimizerOptions
from waylimit.services.bloch_service import BlochService
from waylimit.services.bounds_service import BoundsService
from waylimit.services.experiment_service import ExperimentService
from waylimit.services.verification_service import SUITES, VerificationService


EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_MODEL = 4

SWEEP_HEADER = ("psi", "bound_main", "bound_alt", "bound_alt_simplified")
GATE_CHOICES = ("X", "Y", "Z", "H", "custom")


class UsageError(Exception):
    """Bad flag value; the message names the flag."""


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (fallback WAYLIMIT_SEED)")
    common.add_argument("--out", default=None, help="output path; stdout when omitted")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--tol-bound", type=float, default=None, help="slack for bound comparisons")
    common.add_argument("--tol-fidelity", type=float, default=None, help="fidelity refinement tolerance")
    return common


def _add_gate_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--gate", default="X", help="X, Y, Z, H or custom")
    parser.add_argument("--phi", type=float, default=0.0)
    parser.add_argument("--theta", type=float, default=math.pi)
    parser.add_argument("--ux", type=float, default=0.0)
    parser.add_argument("--uy", type=float, default=0.0)
    parser.add_argument("--uz", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="waylimit", description="Gate-infidelity bounds under conservation laws."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bounds = sub.add_parser("bounds", parents=[common], help="evaluate the closed-form bounds")
    bounds.add_argument("--theta", type=float, required=True)
    bounds.add_argument("--psi", type=float, required=True)
    bounds.add_argument("--sigma", type=float, required=True)
    bounds.add_argument("--c", type=float, default=None, help="read --sigma as σ(L_A) and divide by c")

    sweep = sub.add_parser("sweep", parents=[common], help="bounds over psi in [0, pi/2]")
    sweep.add_argument("--theta", type=float, required=True)
    sweep.add_argument("--sigma", type=float, required=True)
    sweep.add_argument("--points", type=int, default=101)

    verify = sub.add_parser("verify", parents=[common], help="run a property suite")
    verify.add_argument("--suite", choices=SUITES, required=True)
    verify.add_argument("--samples", type=int, default=100)

    jc = sub.add_parser("jc", parents=[common], help="Jaynes-Cummings experiment")
    _add_gate_flags(jc)
    jc.add_argument("--alpha", type=complex, default=0j, help="coherent amplitude, e.g. 0.5 or 0.3+0.4j")
    jc.add_argument("--nmax", type=int, default=8)
    jc.add_argument("--delta", type=float, default=0.0)
    jc.add_argument("--g", type=float, default=1.0)
    jc.add_argument("--t", type=float, default=0.5 * math.pi)

    spin = sub.add_parser("spin", parents=[common], help="rotationally invariant spin-N/2 experiment")
    _add_gate_flags(spin)
    spin.add_argument("--N", dest="big_n", type=int, required=True)
    spin.add_argument("--restarts", type=int, default=8)
    spin.add_argument("--budget", type=int, default=None)
    spin.add_argument("--phase-points", type=int, default=256)

    optimize = sub.add_parser("optimize", parents=[common], help="search the commutant for the best gate")
    _add_gate_flags(optimize)
    optimize.add_argument("--law", choices=("z", "x", "jc"), default="z")
    optimize.add_argument("--adim", type=int, default=2)
    optimize.add_argument("--restarts", type=int, default=8)
    optimize.add_argument("--budget", type=int, default=None)

    serve = sub.add_parser("serve", help="start the HTTP API")
    serve.add_argument("--host", default=settings.api_host)
    serve.add_argument("--port", type=int, default=settings.api_port)
    return parser


# -- helpers -------------------------------------------------------------------


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise UsageError(message)


def _check_angle(name: str, value: float) -> None:
    _require(math.isfinite(value) and 0.0 <= value <= math.pi, f"{name} must lie in [0, pi]")


def _check_sigma(value: float) -> None:
    _require(math.isfinite(value) and value >= 0.0, "--sigma must be a non-negative real")


def _run_config(args: argparse.Namespace, default_format: str) -> RunConfig:
    fields: dict[str, Any] = {"output_path": args.out, "format": args.format or default_format}
    if args.seed is not None:
        fields["seed"] = args.seed
    if args.tol_bound is not None:
        fields["tol_bound"] = args.tol_bound
    if args.tol_fidelity is not None:
        fields["tol_fidelity"] = args.tol_fidelity
    return RunConfig(**fields)


def _resolve_gate(args: argparse.Namespace) -> tuple[GateSpec, str]:
    bloch = BlochService()
    name = args.gate.upper() if args.gate.lower() != "custom" else "custom"
    _require(name in GATE_CHOICES, f"--gate must be one of {', '.join(GATE_CHOICES)}")
    if name != "custom":
        return bloch.named_gate(name), name
    _check_angle("--theta", args.theta)
    _require(math.hypot(args.ux, args.uy, args.uz) > 0.0, "--ux/--uy/--uz must not all be zero")
    spec = bloch.custom_gate(args.phi, args.theta, (args.ux, args.uy, args.uz))
    return spec, "custom"


def _write(text: str, config: RunConfig) -> None:
    if config.output_path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(config.output_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _json_text(payload: BaseModel | list[BaseModel]) -> str:
    if isinstance(payload, list):
        data: Any = [item.model_dump(mode="json") for item in payload]
    else:
        data = payload.model_dump(mode="json")
    return json.dumps(data, indent=2) + "\n"


def _only_json(config: RunConfig, command: str) -> None:
    _require(config.format == "json", f"--format csv is only available for sweep, not {command}")


def _optimizer_options(args: argparse.Namespace, config: RunConfig) -> OptimizerOptions:
    _require(args.restarts >= 1, "--restarts must be at least 1")
    fields: dict[str, Any] = {"restarts": args.restarts, "seed": config.seed}
    if args.budget is not None:
        _require(args.budget >= 1, "--budget must be at least 1")
        fields["budget"] = args.budget
    return OptimizerOptions(**fields)


# -- commands ----------------------------------------------------------------


def cmd_bounds(args: argparse.Namespace) -> int:
    config = _run_config(args, "json")
    _only_json(config, "bounds")
    _check_angle("--theta", args.theta)
    _check_angle("--psi", args.psi)
    _check_sigma(args.sigma)
    sigma = args.sigma
    if args.c is not None:
        _require(math.isfinite(args.c) and args.c > 0.0, "--c must be positive")
        sigma = sigma / args.c
    report = BoundsService().report(args.theta, args.psi, sigma)
    _write(_json_text(report), config)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _run_config(args, "csv")
    _check_angle("--theta", args.theta)
    _check_sigma(args.sigma)
    _require(args.points >= 2, "--points must be at least 2")
    rows = BoundsService().sweep(args.theta, args.sigma, args.points)
    if config.format == "json":
        _write(_json_text(rows), config)
        return EXIT_OK

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow([f"{getattr(row, key):.12g}" for key in SWEEP_HEADER])
    _write(buffer.getvalue(), config)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    config = _run_config(args, "json")
    _only_json(config, "verify")
    _require(args.samples >= 1, "--samples must be at least 1")
    report = VerificationService().run(
        args.suite, args.samples, config.seed, tol_bound=config.tol_bound, tol_fidelity=config.tol_fidelity
    )
    _write(_json_text(report), config)
    return EXIT_OK if report.passed else EXIT_PROPERTY


def cmd_jc(args: argparse.Namespace) -> int:
    config = _run_config(args, "json")
    _only_json(config, "jc")
    _require(args.nmax >= 1, "--nmax must be at least 1")
    _require(args.g >= 0.0, "--g must be non-negative")
    target, label = _resolve_gate(args)
    params = JCParams(detuning=args.delta, coupling=args.g, time=args.t, n_max=args.nmax)
    record = ExperimentService().run_jc(
        target, label, args.alpha, params, FidelityOptions(tolerance=config.tol_fidelity), config.tol_bound
    )
    _write(_json_text(record), config)
    return EXIT_OK if record.bound_respected else EXIT_PROPERTY


def cmd_spin(args: argparse.Namespace) -> int:
    config = _run_config(args, "json")
    _only_json(config, "spin")
    _require(args.big_n >= 1, "--N must be at least 1")
    _require(args.phase_points >= 1, "--phase-points must be at least 1")
    target, label = _resolve_gate(args)
    record = ExperimentService().run_spin(
        args.big_n, target, label, _optimizer_options(args, config), args.phase_points, config.tol_bound
    )
    _write(_json_text(record), config)
    return EXIT_OK if record.bound_respected else EXIT_PROPERTY


def cmd_optimize(args: argparse.Namespace) -> int:
    config = _run_config(args, "json")
    _only_json(config, "optimize")
    _require(args.adim >= 1, "--adim must be at least 1")
    _require(args.law != "jc" or args.adim >= 2, "--adim must be at least 2 for the jc law")
    target, label = _resolve_gate(args)
    record = ExperimentService().run_optimize(
        args.law, target, label, args.adim, _optimizer_options(args, config), config.tol_bound
    )
    _write(_json_text(record), config)
    return EXIT_OK if record.bound_respected else EXIT_PROPERTY


def cmd_serve(args: argparse.Namespace) -> int:
    log_info("starting api", host=args.host, port=args.port)
    uvicorn.run("waylimit.main:app", host=args.host, port=args.port)
    return EXIT_OK


COMMANDS = {
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "jc": cmd_jc,
    "spin": cmd_spin,
    "optimize": cmd_optimize,
    "serve": cmd_serve,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"waylimit {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as e:
        print(f"waylimit {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        log_error("output could not be written", path=getattr(args, "out", None), error=str(e))
        print(f"waylimit {args.command}: error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        if str(e) == "truncation_tail":
            print(
                f"waylimit {args.command}: error: ancilla state reaches the Fock cutoff; increase --nmax",
                file=sys.stderr,
            )
            return EXIT_MODEL
        print(f"waylimit {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
