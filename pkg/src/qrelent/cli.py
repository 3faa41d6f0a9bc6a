"""Command-line front end: ``qrelent {entropy,closest,table,verify}``.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 theorem
hypothesis violated.  ``--json`` prints a machine-readable run report in
place of the text table.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .closest import (
    CERTIFICATE_TOL,
    HypothesisError,
    SolveError,
    certify,
    closest_maxent,
    closest_separable,
    closest_two_qubit,
)
from .fgen import make_builtin, parse_spec
from .qre import qre_modular, qre_spectral
from .qstate import StateError, bell_state, load_state, schmidt_state
from .quadrature import QuadratureError
from .sepopt import OptimizerConfig, ensemble_from_result, minimize
from .suites import run_suite

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_HYPOTHESIS = 3

ORACLE_SLACK = 1e-6


class InputError(Exception):
    pass


@dataclass
class RunReport:
    """Everything one invocation computed; serialises to JSON."""

    command: list
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    certificates: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)
    wall_time: float = 0.0
    error: str = ""

    @property
    def ok(self) -> bool:
        return all(self.flags.values())

    def to_json(self):
        return {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "certificates": self.certificates,
            "flags": self.flags,
            "ok": self.ok,
            "wall_time": self.wall_time,
            "error": self.error,
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            command=data["command"],
            inputs=data["inputs"],
            outputs=data["outputs"],
            certificates=data["certificates"],
            flags=data["flags"],
            wall_time=data["wall_time"],
            error=data.get("error", ""),
        )


def _fmt(x, precision):
    if isinstance(x, (list, tuple, np.ndarray)):
        return "(" + ", ".join(_fmt(v, precision) for v in x) + ")"
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, (int, float, np.floating)):
        return f"{float(x):.{precision}g}"
    return str(x)


def _default_seed():
    raw = os.environ.get("QRE_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"QRE_SEED must be an integer, got {raw!r}") from None


def _function(spec):
    try:
        return parse_spec(spec)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _load(path):
    try:
        return load_state(path)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read state file {path}: {exc}") from None


# ---------------------------------------------------------------------------
# commands


def cmd_entropy(args, report):
    f = _function(args.f)
    rho, sigma = _load(args.rho), _load(args.sigma)
    if rho.dim != sigma.dim:
        raise InputError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    report.inputs.update(rho=args.rho, sigma=args.sigma, f=args.f)
    value = qre_spectral(rho, sigma, f)
    report.outputs["S_f"] = value
    if args.check_modular:
        try:
            modular = qre_modular(rho, sigma, f)
        except StateError as exc:
            report.outputs["modular"] = None
            report.outputs["modular_note"] = str(exc)
        else:
            report.outputs["modular"] = modular
            report.outputs["discrepancy"] = abs(modular - value)
            report.flags["spectral_matches_modular"] = bool(abs(modular - value) <= 1e-9)


def _closest_input(args, f):
    if args.bell is not None:
        if args.bell < 2:
            raise InputError("--bell needs D >= 2")
        return bell_state(args.bell), closest_maxent(args.bell, f, samples=0)
    if args.schmidt is not None:
        try:
            p = np.array([float(v) for v in args.schmidt.split(",")])
        except ValueError:
            raise InputError(f"bad --schmidt list {args.schmidt!r}") from None
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise InputError("--schmidt coefficients must be non-negative and sum to 1")
        p = p / p.sum()
        psi = schmidt_state(p)
        return psi, closest_separable(psi, f, samples=0)
    if not 0.0 <= args.p <= 1.0:
        raise InputError("--p must lie in [0, 1]")
    return schmidt_state([args.p, 1.0 - args.p]), closest_two_qubit(args.p, f, samples=0)


def cmd_closest(args, report):
    f = _function(args.f)
    seed = args.seed
    psi, result = _closest_input(args, f)
    report.inputs.update(f=args.f, bell=args.bell, schmidt=args.schmidt, p=args.p, seed=seed)
    report.outputs.update(
        theorem=result.theorem,
        entanglement=result.entanglement,
        p=[float(v) for v in result.p],
        q=[float(v) for v in result.q],
    )
    if args.certify:
        cert = certify(result, f, args.certify, seed)
        result.certificate = cert
        report.certificates.append(cert.to_json())
        report.flags["certificate"] = bool(cert.min_directional_derivative >= -CERTIFICATE_TOL)
        report.outputs["certificate_min"] = cert.min_directional_derivative
    if args.oracle:
        cfg = OptimizerConfig(restarts=args.restarts, max_iters=args.max_iters, seed=seed)
        oracle = minimize(psi, f, cfg, warm_start=ensemble_from_result(result))
        gap = oracle.value - result.entanglement
        report.outputs.update(oracle=oracle.value, oracle_gap=gap)
        report.flags["oracle_not_below_analytic"] = bool(gap >= -ORACLE_SLACK)
    report.outputs["sigma_star"] = result.to_json()["sigma_star"]


def table_rows(ds, alphas):
    """Entanglement columns for the maximally entangled state of each ``(d, alpha)``."""
    rows = []
    for d in ds:
        for a in alphas:
            pe = make_builtin("power_entropy", a)
            ts = make_builtin("tsallis", a)
            e_alpha = closest_maxent(d, pe, samples=0).entanglement
            e_tsallis = closest_maxent(d, ts, samples=0).entanglement
            e_renyi = math.log(1.0 - e_alpha) / (a - 1.0)
            marginal_renyi = math.log(d * d ** (-a)) / (1.0 - a)
            marginal_tsallis = (1.0 - d ** (1.0 - a)) / (a - 1.0)
            rows.append({
                "d": d,
                "alpha": a,
                "alpha_divergence_E": e_alpha,
                "renyi_E": e_renyi,
                "renyi_marginal": marginal_renyi,
                "renyi_reduces": abs(e_renyi - marginal_renyi) <= 1e-10,
                "tsallis_E": e_tsallis,
                "tsallis_marginal": marginal_tsallis,
                "tsallis_reduces": abs(e_tsallis - marginal_tsallis) <= 1e-10,
            })
    return rows


def cmd_table(args, report):
    for a in args.alpha:
        if not 0.0 < a < 1.0:
            raise InputError("--alpha values must lie in (0, 1)")
    for d in args.d:
        if d < 2:
            raise InputError("--d values must be at least 2")
    report.inputs.update(d=args.d, alpha=args.alpha)
    rows = table_rows(args.d, args.alpha)
    report.outputs["rows"] = rows
    report.flags["renyi_reduces_to_marginal"] = all(r["renyi_reduces"] for r in rows)


def cmd_verify(args, report):
    report.inputs.update(suite=args.suite, seed=args.seed)
    checks = run_suite(args.suite, args.seed)
    report.outputs["checks"] = [c.to_json() for c in checks]
    for c in checks:
        report.flags[f"{c.suite}: {c.name}"] = c.passed


# ---------------------------------------------------------------------------
# text output


def _print_text(args, report, out):
    p = args.precision
    o = report.outputs
    if args.command == "entropy":
        print(f"S_f = {_fmt(o['S_f'], p)}", file=out)
        if "modular" in o:
            if o["modular"] is None:
                print(f"modular: skipped ({o['modular_note']})", file=out)
            else:
                print(f"modular = {_fmt(o['modular'], p)}  discrepancy = {o['discrepancy']:.3e}", file=out)
    elif args.command == "closest":
        print(f"theorem = {o['theorem']}", file=out)
        print(f"E = {_fmt(o['entanglement'], p)}", file=out)
        print(f"p = {_fmt(o['p'], p)}", file=out)
        print(f"q = {_fmt(o['q'], p)}", file=out)
        if "certificate_min" in o:
            print(f"certificate min = {o['certificate_min']:.3e}", file=out)
        if "oracle" in o:
            print(f"oracle = {_fmt(o['oracle'], p)}  gap = {o['oracle_gap']:.3e}", file=out)
    elif args.command == "table":
        cols = ["d", "alpha", "alpha_divergence_E", "renyi_E", "renyi_marginal",
                "tsallis_E", "tsallis_marginal", "tsallis_reduces"]
        print("  ".join(f"{c:>18}" for c in cols), file=out)
        for r in o["rows"]:
            print("  ".join(f"{_fmt(r[c], p):>18}" for c in cols), file=out)
    elif args.command == "verify":
        for c in o["checks"]:
            mark = "PASS" if c["passed"] else "FAIL"
            print(f"{mark}  {c['suite']:<10} {c['name']:<45} margin {c['margin']:.3e}", file=out)
    for name, ok in report.flags.items():
        if not ok:
            print(f"FAILED: {name}", file=out)


# ---------------------------------------------------------------------------
# parser


def _alpha_list(text):
    return [float(v) for v in text.split(",")]


def _int_list(text):
    return [int(v) for v in text.split(",")]


def _precision(text):
    n = int(text)
    if not 1 <= n <= 15:
        raise argparse.ArgumentTypeError("precision must be between 1 and 15")
    return n


def build_parser():
    # argparse exits with status 2 on bad usage, which is also the input-error code
    parser = argparse.ArgumentParser(prog="qrelent", description="Quasi-relative entropies and entanglement of pure states.")
    parser.add_argument("--json", action="store_true", help="print the run report as JSON")
    parser.add_argument("--precision", type=_precision, default=6, help="significant digits (1-15)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="S_f(rho || sigma) from two state files")
    p.add_argument("--rho", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--f", required=True, help="function spec, e.g. log or power_entropy:0.5")
    p.add_argument("--check-modular", action="store_true")

    p = sub.add_parser("closest", help="closest separable state to a pure state")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--bell", type=int, metavar="D")
    group.add_argument("--schmidt", metavar="P1,P2,...")
    group.add_argument("--p", type=float, metavar="P")
    p.add_argument("--f", required=True)
    p.add_argument("--certify", type=int, default=0, metavar="N")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--max-iters", type=int, default=2000)

    p = sub.add_parser("table", help="alpha/Renyi/Tsallis entanglement of maximally entangled states")
    p.add_argument("--d", type=_int_list, default=[2, 3])
    p.add_argument("--alpha", type=_alpha_list, default=[0.3, 0.5, 0.7])

    p = sub.add_parser("verify", help="run seeded invariant suites")
    p.add_argument("--suite", choices=["functions", "divergence", "theorems", "all"], default="all")
    p.add_argument("--seed", type=int, default=None)
    return parser


COMMANDS = {
    "entropy": cmd_entropy,
    "closest": cmd_closest,
    "table": cmd_table,
    "verify": cmd_verify,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    report = RunReport(command=["qrelent"] + argv)
    start = time.perf_counter()
    code = EXIT_OK
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        COMMANDS[args.command](args, report)
        if not report.ok:
            code = EXIT_VERIFY
    except HypothesisError as exc:
        report.error = f"hypothesis violated ({exc.theorem}): {exc}"
        code = EXIT_HYPOTHESIS
    except (InputError, StateError, ValueError) as exc:
        report.error = f"input error: {exc}"
        code = EXIT_INPUT
    except (SolveError, QuadratureError) as exc:
        report.error = f"numerical failure: {exc}"
        code = EXIT_VERIFY
    report.wall_time = time.perf_counter() - start

    if args.json:
        print(json.dumps(report.to_json(), indent=2), file=out)
    elif report.error:
        print(report.error, file=sys.stderr)
    else:
        _print_text(args, report, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
