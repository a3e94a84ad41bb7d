"""Command-line front end.

Subcommands: ``encode``, ``density``, ``perf``, ``verify-circuits`` and
``oracle-check``.  Exit codes are 0 on success, 1 when a verification
fails and 2 for usage errors.

A ``--config FILE`` of ``key=value`` lines supplies defaults for the
subcommand's flags; keys are flag names without the leading dashes and
flags given on the command line win.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import circuits, codewords, error_analysis, oracle
from .lattice import SQRT_PI, LatticeParams, QumodeState, dump_state, load_state, recommended_grid

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

SQUEEZE_FLAGS = ("--squeezing-db", "--squeeze-factor")


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """``"re,im"`` (or a bare real part) to complex."""
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"non-finite coefficient {text!r}")
    return complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _add_squeezing(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--squeezing-db", type=float, help="squeezing in dB")
    g.add_argument("--squeeze-factor", type=float, help="width factor e^{-r}")
    p.add_argument("--xd", type=float, default=SQRT_PI, help="lattice spacing x_d (default sqrt(pi))")


def squeezing_r(args) -> float:
    if args.squeezing_db is not None:
        return codewords.r_from_db(args.squeezing_db)
    if not args.squeeze_factor > 0:
        raise UsageError("--squeeze-factor must be positive")
    return -math.log(args.squeeze_factor)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwgkp", description="Quantum-walk GKP codeword toolkit")
    parser.add_argument("--config", type=Path, help="key=value defaults for the subcommand")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode alpha|0> + beta|1> and write the state file")
    p.add_argument("--coin", choices=("hadamard", "dissipative"), required=True)
    p.add_argument("--steps", type=_positive_int, required=True)
    _add_squeezing(p)
    p.add_argument("--alpha", type=parse_complex, default=complex(1, 0))
    p.add_argument("--beta", type=parse_complex, default=complex(0, 0))
    p.add_argument("--mode", choices=("orthogonal", "gram"), default="orthogonal")
    p.add_argument("--output", "-o", type=Path, required=True)
    p.add_argument("--report", type=Path, help="report side-file (dissipative; default <output>.report.json)")

    p = sub.add_parser("density", help="quadrature density of a stored state as CSV")
    p.add_argument("--state", type=Path, required=True)
    p.add_argument("--quadrature", choices=codewords.QUADRATURES, default="x")
    p.add_argument("--min", dest="grid_min", type=float)
    p.add_argument("--max", dest="grid_max", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--coin-slice", choices=("R", "L"))
    p.add_argument("--with-wavefunction", action="store_true", help="add re/im columns")
    p.add_argument("--output", "-o", type=Path)

    p = sub.add_parser("perf", help="no-error probability sweep with delta = 1/sqrt(N pi)")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--no-gkp", action="store_true", help="skip the GKP reference column")
    p.add_argument("--output", "-o", type=Path)

    p = sub.add_parser("verify-circuits", help="residuals of the circuit identities")
    p.add_argument("--dim", type=int, default=circuits.DEFAULT_DIM)
    p.add_argument("--xi", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--margin", type=int, default=circuits.DEFAULT_MARGIN)
    p.add_argument("--json", type=Path, help="write a JSON report ('-' for stdout)")

    p = sub.add_parser("oracle-check", help="walk engine against closed-form amplitudes")
    p.add_argument("--max-steps", type=_positive_int, default=12)
    p.add_argument("--tol", type=float, default=1e-12)
    return parser


# -- config file ----------------------------------------------------------------


def read_config(path: Path) -> list[tuple[str, str]]:
    entries = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        entries.append((key.replace("_", "-"), value))
    return entries


def config_tokens(entries, cli_tokens) -> list[str]:
    """Flag tokens for config entries; squeezing entries yield to any squeezing flag on the command line."""
    cli_squeeze = any(t.split("=", 1)[0] in SQUEEZE_FLAGS for t in cli_tokens)
    out = []
    for key, value in entries:
        flag = "--" + key
        if flag in SQUEEZE_FLAGS and cli_squeeze:
            continue
        low = value.lower()
        if low in ("true", "yes", "on"):
            out.append(flag)
        elif low in ("false", "no", "off"):
            continue
        else:
            out.append(f"{flag}={value}")
    return out


def _expand_config(argv: list[str], parser: argparse.ArgumentParser) -> list[str]:
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config", type=Path)
    known, rest = pre.parse_known_args(argv)
    if known.config is None:
        return argv
    try:
        entries = read_config(known.config)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    commands = set(parser._subparsers._group_actions[0].choices)
    idx = next((i for i, t in enumerate(rest) if t in commands), None)
    if idx is None:
        return rest
    return rest[: idx + 1] + config_tokens(entries, rest[idx + 1 :]) + rest[idx + 1 :]


# -- subcommands ---------------------------------------------------------------


def _complex_doc(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def cmd_encode(args) -> int:
    alpha, beta = args.alpha, args.beta
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-12:
        raise UsageError("coefficients must satisfy |alpha|^2 + |beta|^2 = 1")
    params = LatticeParams.from_xd(squeezing_r(args), args.xd)
    meta = {
        "kind": "QW" if args.coin == "hadamard" else "dQW",
        "coin": args.coin,
        "steps": args.steps,
        "alpha": _complex_doc(alpha),
        "beta": _complex_doc(beta),
        "mode": args.mode,
    }
    if args.coin == "hadamard":
        state = codewords.encode_qw(alpha, beta, args.steps, params)
        dump_state(state, args.output, meta)
        return EXIT_OK
    state, report = codewords.encode_dqw(alpha, beta, args.steps, params, args.mode)
    dump_state(state, args.output, meta)
    doc = report.to_dict()
    doc["success_probability"] = report.norm**2
    report_path = args.report or args.output.with_name(args.output.name + ".report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def density_grid(state, grid_min, grid_max, samples, quadrature: str) -> np.ndarray:
    if grid_min is None and grid_max is None and samples is None:
        if quadrature == "x":
            return recommended_grid(state)
        return np.linspace(-4 * SQRT_PI, 4 * SQRT_PI, 2048)
    if None in (grid_min, grid_max, samples):
        raise UsageError("--min, --max and --samples go together")
    if samples < 1:
        raise UsageError("empty grid")
    if not grid_max > grid_min and samples > 1:
        raise UsageError("--max must exceed --min")
    return np.linspace(grid_min, grid_max, samples)


def cmd_density(args) -> int:
    state, meta = load_state(args.state)
    if args.coin_slice and isinstance(state, QumodeState):
        raise UsageError("--coin-slice needs a coin-resolved (walker) state")
    grid = density_grid(state, args.grid_min, args.grid_max, args.samples, args.quadrature)
    dens = codewords.density(state, args.quadrature, grid, args.coin_slice)
    wf = None
    if args.with_wavefunction:
        if not (isinstance(state, QumodeState) or args.coin_slice):
            raise UsageError("--with-wavefunction needs a qumode state or --coin-slice")
        wf = codewords.wavefunction(state, args.quadrature, grid, args.coin_slice)
    header = {"kind": meta.get("kind", "unknown"), "N": meta.get("steps", "")}
    header.update({"r": repr(state.params.r), "xi_d": repr(state.params.xi_d)})
    header["coin_slice"] = args.coin_slice or "traced"
    _write(args.output, lambda fh: codewords.write_density_csv(fh, args.quadrature, grid, dens, wf, header))
    return EXIT_OK


def cmd_perf(args) -> int:
    if args.n_min < 1 or args.n_max < args.n_min:
        raise UsageError(f"invalid step range {args.n_min}..{args.n_max}")
    points = error_analysis.sweep(range(args.n_min, args.n_max + 1), compare_gkp=not args.no_gkp)
    _write(args.output, lambda fh: error_analysis.write_perf_csv(fh, points))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.dim < 2:
        raise UsageError("--dim must be at least 2")
    results = circuits.run_suite(args.dim, args.xi, args.seed, args.margin)
    ok = all(r.passed for r in results)
    report = {
        "dim": args.dim,
        "xi": args.xi,
        "seed": args.seed,
        "passed": ok,
        "checks": [r.to_dict() for r in results],
    }
    if args.json is not None and str(args.json) == "-":
        json.dump(report, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        width = max(len(r.name) for r in results)
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(f"{r.name:<{width}}  {r.residual:.3e}  < {r.threshold:.0e}  {status}")
        print("all passed" if ok else "FAILED")
        if args.json is not None:
            with open(args.json, "w", encoding="utf-8") as fh:
                json.dump(report, fh, indent=2)
                fh.write("\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_oracle(args) -> int:
    rows = oracle.compare_engine(args.max_steps)
    worst = 0.0
    for coin in ("hadamard", "dissipative"):
        for start in ("R", "L"):
            dev = max(r.max_dev for r in rows if r.coin == coin and r.start == start)
            worst = max(worst, dev)
            print(f"{coin:<12} start={start}  N<={args.max_steps}  max_dev={dev:.3e}")
    ok = worst < args.tol
    print(f"{'PASS' if ok else 'FAIL'} (tol {args.tol:.0e})")
    return EXIT_OK if ok else EXIT_FAIL


def _write(path, writer) -> None:
    if path is None:
        writer(sys.stdout)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer(fh)


COMMANDS = {
    "encode": cmd_encode,
    "density": cmd_density,
    "perf": cmd_perf,
    "verify-circuits": cmd_verify,
    "oracle-check": cmd_oracle,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _expand_config(argv, parser)
    except UsageError as exc:
        print(f"qwgkp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError, KeyError) as exc:
        print(f"qwgkp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
