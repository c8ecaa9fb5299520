"""Command-line entry point ``qavcap``.

Every subcommand prints one report (JSON by default, or ``metric,value``
CSV).  Domain errors exit with status 1 and a single JSON line on stderr;
usage errors exit with status 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import finite_n
from .core import JammerChannel, QuantumChannel, random_density_matrix
from .errors import DimensionError, InvariantError, ParseError, QavcapError
from .io import emit_report, load_channel, load_json, load_scheme, load_state, save_json
from .models import AvcKernel, ChannelSet
from .solvers import (
    SolverConfig,
    avqc_ea_capacity,
    classical_compound_capacity,
    compound_ea_capacity,
    ea_capacity,
    fqavc_ea_capacity,
    separation_report,
    symmetrizability_check,
)

CONFIG_KEYS = ("tol", "max_iter", "inner_tol", "seed", "restarts")


# ----------------------------------------------------------------------------
# argument helpers
# ----------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("solver settings (flags > --config file > defaults)")
    g.add_argument("--tol", type=float, default=None)
    g.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    g.add_argument("--inner-tol", dest="inner_tol", type=float, default=None)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--restarts", type=int, default=None)
    g.add_argument("--config", type=Path, default=None, help="JSON file with solver settings")
    g.add_argument(
        "--threads",
        type=_positive_int,
        default=None,
        help="worker threads (also QAVCAP_THREADS); results do not depend on it",
    )
    o = p.add_argument_group("output")
    o.add_argument("--format", choices=["json", "csv"], default="json")
    o.add_argument("--output", type=Path, default=None, help="write the report here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="qavcap",
        description="Entanglement-assisted capacities of compound, arbitrarily varying and jammer channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, help: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help, parents=[common])

    chan_help = "channel file or built-in name (identity2, depol:<p>, erasure:<p>, dephase:<p>, pauli-x, cx-jammer)"
    add("ea-capacity", "capacity of a single channel").add_argument("--channel", required=True, help=chan_help)
    for name, help in (
        ("compound", "compound capacity of a channel set"),
        ("avqc", "capacity of the arbitrarily varying channel generated by a set"),
    ):
        add(name, help).add_argument("--channel", action="append", required=True, help=chan_help + "; repeat per member")
    add("fqavc", "capacity with a jammer-controlled input").add_argument("--channel", required=True, help=chan_help)

    kern_help = "kernel file with W[y][x][s], or a built-in name (adder, noiseless)"
    add("classical-compound", "compound capacity over the jammer columns of a kernel").add_argument(
        "--kernel", required=True, help=kern_help
    )
    add("symmetrizable", "symmetrizability LP with certificate or Farkas witness").add_argument(
        "--kernel", required=True, help=kern_help
    )
    p = add("separation-report", "symmetrizability next to compound and assisted capacity")
    p.add_argument("--kernel", required=True, help=kern_help)
    p.add_argument("--bundle", type=Path, default=None, help="directory for intermediate artifacts")

    scheme_help = "scheme file or built-in name (comp:<n>, xbasis:<n>, superdense:<n>)"
    for name, help in (
        ("error-operator", "error operator of a scheme against the jammer"),
        ("worst-jammer", "worst (possibly entangled) jammer state"),
        ("theorem3-check", "permutation and de Finetti bounds for a scheme"),
    ):
        p = add(name, help)
        p.add_argument("--channel", required=True, help=chan_help)
        p.add_argument("--scheme", required=True, help=scheme_help)

    p = add("definetti-check", "test rho <= (n+1)^(d^2) tau")
    p.add_argument("--state", type=Path, default=None, help='JSON {"rho": matrix, "d": int}')
    p.add_argument("--d", type=int, default=2, help="local dimension")
    p.add_argument("--n", type=int, default=2, help="copies (random mode)")
    p.add_argument("--samples", type=int, default=100, help="random symmetrized states (random mode)")

    p = add("validate", "validate a channel, kernel, scheme or state file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--channel")
    g.add_argument("--kernel")
    g.add_argument("--scheme")
    g.add_argument("--state", type=Path)
    return parser


def resolve_config(args: argparse.Namespace) -> SolverConfig:
    settings: dict[str, Any] = {}
    if args.config is not None:
        data = load_json(args.config)
        if not isinstance(data, dict):
            raise ParseError(f"{args.config}: expected a JSON object")
        unknown = set(data) - set(CONFIG_KEYS) - {"threads"}
        if unknown:
            raise InvariantError(f"{args.config}: unknown settings {sorted(unknown)}", "config_keys")
        settings.update({k: v for k, v in data.items() if k in CONFIG_KEYS})
    for key in CONFIG_KEYS:
        value = getattr(args, key)
        if value is not None:
            settings[key] = value
    return SolverConfig.from_mapping(settings)


def resolve_threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("QAVCAP_THREADS")
    if env is None:
        return 1
    try:
        return _positive_int(env)
    except (ValueError, argparse.ArgumentTypeError):
        raise InvariantError(f"QAVCAP_THREADS must be a positive integer, got {env!r}", "threads") from None


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------


def _expect(obj, kind, spec: str):
    if not isinstance(obj, kind):
        names = {QuantumChannel: "channel", JammerChannel: "jammer channel (with d_A, d_S)", AvcKernel: "kernel"}
        raise DimensionError(f"{spec}: expected a {names[kind]}, got {type(obj).__name__}", axis="input")
    return obj


def _channel(spec: str) -> QuantumChannel:
    obj = load_channel(spec)
    if isinstance(obj, JammerChannel):
        return obj.map
    return _expect(obj, QuantumChannel, spec)


def _channel_set(specs: list[str]) -> ChannelSet:
    return ChannelSet([_channel(s) for s in specs], labels=list(specs))


def _jammer(spec: str) -> JammerChannel:
    return _expect(load_channel(spec), JammerChannel, spec)


def _kernel(spec: str) -> AvcKernel:
    return _expect(load_channel(spec), AvcKernel, spec)


def cmd_ea_capacity(args, cfg):
    return ea_capacity(_channel(args.channel), cfg)


def cmd_compound(args, cfg):
    return compound_ea_capacity(_channel_set(args.channel), cfg)


def cmd_avqc(args, cfg):
    return avqc_ea_capacity(_channel_set(args.channel), cfg)


def cmd_fqavc(args, cfg):
    return fqavc_ea_capacity(_jammer(args.channel), cfg)


def cmd_classical_compound(args, cfg):
    return classical_compound_capacity(_kernel(args.kernel).columns(), cfg)


def cmd_symmetrizable(args, cfg):
    return symmetrizability_check(_kernel(args.kernel))


def cmd_separation_report(args, cfg):
    rep = separation_report(_kernel(args.kernel), cfg)
    if args.bundle is not None:
        args.bundle.mkdir(parents=True, exist_ok=True)
        save_json(rep, args.bundle / "report.json")
        key = "symmetrizer" if rep.symmetrizable else "farkas_witness"
        save_json({key: rep.certificate}, args.bundle / "certificate.json")
        for name, value in rep.artifacts.items():
            save_json({name: value}, args.bundle / f"{name}.json")
    return rep


def _operator(args) -> finite_n.ErrorOperator:
    return finite_n.build_error_operator(_jammer(args.channel), load_scheme(args.scheme))


def cmd_error_operator(args, cfg):
    op = _operator(args)
    w = np.linalg.eigvalsh(op.F)
    return {"n": op.n, "d_S": op.d_S, "F": op.F, "lambda_min": w[0], "lambda_max": w[-1]}


def cmd_worst_jammer(args, cfg):
    value, sigma = finite_n.worst_case_jammer(_operator(args))
    return {"value": value, "sigma_star": sigma}


def cmd_theorem3_check(args, cfg):
    return finite_n.theorem3_bound_check(_jammer(args.channel), load_scheme(args.scheme), seed=cfg.seed)


def cmd_definetti_check(args, cfg):
    if args.state is not None:
        rho, meta = load_state(args.state)
        d = int(meta.get("d", args.d))
        return finite_n.definetti_bound_check(rho, d)
    rng = np.random.default_rng(cfg.seed)
    d, n = args.d, args.n
    checks = []
    for _ in range(args.samples):
        rho = finite_n.symmetrize_state(random_density_matrix(d ** n, rng), d, n)
        checks.append(finite_n.definetti_bound_check(rho, d, n))
    return {
        "d": d,
        "n": n,
        "samples": args.samples,
        "holds": all(c.holds for c in checks),
        "min_margin": min(c.margin for c in checks),
        "constant": checks[0].constant,
        "sharper_constant": checks[0].sharper_constant,
        "min_sharper_margin": min(c.sharper_margin for c in checks),
    }


def cmd_validate(args, cfg):
    if args.channel is not None:
        obj = load_channel(args.channel)
        ch = obj.map if isinstance(obj, JammerChannel) else obj
        if isinstance(ch, QuantumChannel):
            ch.validate()
            out = {"valid": True, "kind": "jammer" if ch is not obj else "channel", "d_in": ch.d_in, "d_out": ch.d_out}
            if ch is not obj:
                out.update(d_A=obj.d_A, d_S=obj.d_S)
            return out
        return {"valid": True, "kind": "kernel", "X": obj.X, "S": obj.S, "Y": obj.Y}
    if args.kernel is not None:
        k = _kernel(args.kernel)
        return {"valid": True, "kind": "kernel", "X": k.X, "S": k.S, "Y": k.Y}
    if args.scheme is not None:
        s = load_scheme(args.scheme)
        s.encoder.validate()
        s.decoder.validate()
        return {"valid": True, "kind": "scheme", "n": s.n, "m": s.m, "k": s.k}
    rho, _ = load_state(args.state)
    return {"valid": True, "kind": "state", "dim": rho.shape[0]}


COMMANDS = {
    "ea-capacity": cmd_ea_capacity,
    "compound": cmd_compound,
    "avqc": cmd_avqc,
    "fqavc": cmd_fqavc,
    "classical-compound": cmd_classical_compound,
    "symmetrizable": cmd_symmetrizable,
    "separation-report": cmd_separation_report,
    "error-operator": cmd_error_operator,
    "worst-jammer": cmd_worst_jammer,
    "definetti-check": cmd_definetti_check,
    "theorem3-check": cmd_theorem3_check,
    "validate": cmd_validate,
}


def _diagnostic(exc: Exception) -> str:
    info: dict[str, Any] = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("axis", "invariant", "magnitude"):
        value = getattr(exc, attr, None)
        if value is not None:
            info[attr] = float(value) if isinstance(value, np.floating) else value
    return json.dumps(info, sort_keys=True)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        resolve_threads(args)
        report = COMMANDS[args.command](args, cfg)
        text = emit_report(report, args.format, args.output)
    except (QavcapError, OSError, ValueError) as exc:
        print(_diagnostic(exc), file=sys.stderr)
        return 1
    if args.output is None:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
