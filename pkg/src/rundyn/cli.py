"""Command-line interface: ``rundyn {solve,curve,verify,trajectory}``."""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import attractor as att
from .config import ExperimentConfig, config_from_dict, load_config, parse_candidates
from .errors import CapacityError, ConfigError, RundynError
from .experiments import (
    convergence_curve,
    format_lambda,
    solve_report,
    trajectory_distances,
    verification_suite,
)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_CAPACITY = 3
EXIT_IO = 4


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _cyclic_n(cfg: ExperimentConfig) -> int | None:
    return cfg.network.n_qubits if cfg.network is not None else None


def _seed(args, cfg: ExperimentConfig) -> int | None:
    return args.seed if args.seed is not None else cfg.seed


def _candidates(args, cfg: ExperimentConfig):
    return args.candidates if args.candidates is not None else cfg.candidates


def _load(args) -> ExperimentConfig:
    if args.config is not None:
        cfg = load_config(args.config)
    elif args.qubits is not None:
        cfg = config_from_dict({"network": {"n_qubits": args.qubits}})
    else:
        raise ConfigError("give --config PATH or --qubits N")
    if args.max_n is not None:
        if args.max_n < 1:
            raise ConfigError("--max-n must be >= 1")
        cfg.iterations = args.max_n
    return cfg


def _write_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def cmd_solve(args) -> int:
    cfg = _load(args)
    seed = _seed(args, cfg) or 0
    rep = solve_report(cfg.channel, _candidates(args, cfg), seed=seed, n_qubits_cyclic=_cyclic_n(cfg))
    basis = rep.basis
    if args.json:
        doc = {
            "dimension": cfg.channel.dim,
            "total_attractor_dimension": basis.total_dimension,
            "blocks": [
                {
                    "eigenvalue": [b.eigenvalue.real, b.eigenvalue.imag],
                    "dimension": b.dim,
                    "residual": rep.residuals[b.eigenvalue],
                }
                for b in basis.blocks
            ],
            "orthonormality_error": rep.orthonormality,
            "cstar_relations": [
                {"name": c.name, "passed": c.passed, "max_error": c.max_error} for c in rep.cstar.checks
            ],
            "checks": [
                {"name": c.name, "passed": c.passed, "value": c.value, "tolerance": c.tolerance}
                for c in rep.checks
            ],
            "passed": rep.passed,
        }
        _write_text(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        lines = [f"system: {cfg.name}, d={cfg.channel.dim}, {len(cfg.channel.terms)} unitaries"]
        for b in basis.blocks:
            lines.append(f"λ={format_lambda(b.eigenvalue)}: dim {b.dim} (residual {rep.residuals[b.eigenvalue]:.2e})")
        lines.append(f"total attractor dimension: {basis.total_dimension}")
        lines.extend(c.line() for c in rep.checks)
        lines.extend(f"C*-relation {line}" for line in str(rep.cstar).splitlines())
        lines.append("OK" if rep.passed else "FAILED")
        _write_text("\n".join(lines) + "\n", args.out)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def curve_csv(cfg: ExperimentConfig, candidates=None, trace_norm: bool = False):
    """CSV text and per-state results for the configured convergence curves."""
    basis = att.solve_attractors(cfg.channel, candidates)
    buf = io.StringIO()
    header = ["state", "n", "D", "entropy"] + (["trace_distance"] if trace_norm else [])
    buf.write(",".join(header) + "\n")
    results = []
    for st in cfg.initial_states:
        res = convergence_curve(cfg.channel, basis, st.rho, cfg.iterations, st.label, trace_norm)
        results.append(res)
        for n in range(cfg.iterations + 1):
            row = [st.label, str(n), _fmt(res.distances[n]), _fmt(res.entropies[n])]
            if trace_norm:
                row.append(_fmt(res.trace_distances[n]))
            buf.write(",".join(row) + "\n")
    return buf.getvalue(), results


def cmd_curve(args) -> int:
    cfg = _load(args)
    text, results = curve_csv(cfg, _candidates(args, cfg), args.trace_norm)
    out = args.out or cfg.output
    _write_text(text, out)
    log = sys.stderr if out is None else sys.stdout
    for r in results:
        print(
            f"{r.label}: {r.classification} (non-stationary weight {r.nonstationary_weight:.3e}); "
            f"D(0)={r.distances[0]:.6e} D({len(r.distances) - 1})={r.distances[-1]:.6e}; "
            f"monotone={'yes' if r.is_monotone() else 'no'}",
            file=log,
        )
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load(args)
    seed = _seed(args, cfg) or 0
    checks = verification_suite(cfg.channel, _candidates(args, cfg), seed=seed, n_qubits_cyclic=_cyclic_n(cfg))
    lines = [c.line() for c in checks]
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed")
    _write_text("\n".join(lines) + "\n", args.out)
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def cmd_trajectory(args) -> int:
    cfg = _load(args)
    seed = _seed(args, cfg)
    if seed is None:
        raise ConfigError("trajectory mode needs a seed (config 'seed' or --seed)")
    samples = args.samples if args.samples is not None else cfg.samples
    buf = io.StringIO()
    buf.write("state,n,D\n")
    summary = []
    for st in cfg.initial_states:
        dist = trajectory_distances(cfg.channel, st.rho, cfg.iterations, samples, seed)
        for n, v in enumerate(dist):
            buf.write(f"{st.label},{n},{_fmt(v)}\n")
        summary.append(f"{st.label}: max D {dist.max():.3e} over {samples} samples (5/sqrt(samples) = {5 / np.sqrt(samples):.3e})")
    out = args.out or cfg.output
    _write_text(buf.getvalue(), out)
    log = sys.stderr if out is None else sys.stdout
    for line in summary:
        print(line, file=log)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rundyn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--qubits", type=int, help="uniform cyclic CNOT network with N qubits (no config)")
    common.add_argument("--candidates", type=parse_candidates, help="eigenvalue candidates, e.g. '1,-1' or '0.5+0.866i'")
    common.add_argument("--out", help="output path (default: config 'output' or stdout)")
    common.add_argument("--seed", type=int, help="64-bit RNG seed")
    common.add_argument("--max-n", type=int, help="override the configured iteration count")

    p = sub.add_parser("solve", parents=[common], help="attractor report")
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("curve", parents=[common], help="convergence curves as CSV")
    p.add_argument("--trace-norm", action="store_true", help="add a trace-distance column")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("verify", parents=[common], help="invariant battery")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trajectory", parents=[common], help="Monte Carlo trajectory averages vs exact map")
    p.add_argument("--samples", type=int, help="number of sampled trajectories")
    p.set_defaults(func=cmd_trajectory)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ConfigError, RundynError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
