"""Command-line interface.

Subcommands:
  c1           exact sliding-window constant of a potential
  solve        propagate a scenario and export the trace as CSV
  verify       run a suite config, emit a JSON report (exit 0/1/2)
  sweep        randomized corroboration sweep over potential families
  simon-stolz  transfer-matrix integral curve as CSV
  prufer       amplitude/phase decomposition as CSV

Exit codes: 0 all pass (expected failures honored), 1 unexpected failure,
2 configuration error.  SCHRO1D_THREADS caps scenario parallelism.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .errors import ConfigError, Schro1dError
from .harness import (
    default_suite_path,
    load_suite_config,
    parse_potential,
    parse_scenario,
    random_sweep,
    run_suite,
    scenario_trace,
)
from .potential import c1_sup
from .spectral import prufer_decompose, simon_stolz_curve


def _write_text(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _cmd_c1(args):
    doc = load_suite_config(args.config)
    pot = parse_potential(doc.get("potential", doc), "potential")
    profile = c1_sup(pot)
    payload = {
        "c1": profile.supremum,
        "argmax": profile.argmax,
        "described_interval": list(pot.support),
    }
    _write_text(json.dumps(payload, sort_keys=True, indent=2), args.out)
    return 0


def _load_scenario(args):
    doc = load_suite_config(args.config)
    scn = parse_scenario(doc, "scenario")
    if args.max_step is not None:
        scn.max_step = args.max_step
    return scn


def _cmd_solve(args):
    scn = _load_scenario(args)
    trace = scenario_trace(scn)
    if args.out:
        trace.to_csv(args.out)
    else:
        trace.to_csv(sys.stdout)
    return 0


def _summarize(report):
    lines = []
    for entry in report.entries:
        status = "ok" if entry["ok"] else "FAIL"
        lines.append(f"[{status}] {entry['id']} ({entry['expected']})")
        for out in entry["outcomes"]:
            mark = "pass" if out["pass"] else "FAIL"
            lines.append(
                f"    {mark:4s} {out['name']}: worst_ratio={out['worst_ratio']:.6f} "
                f"witness_x={out['witness_x']:.4f}"
            )
        for sk in entry["skipped"]:
            lines.append(f"    skip {sk['name']}: {sk['reason']}")
    return "\n".join(lines)


def _finish_report(report, args):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    print(_summarize(report))
    print(f"suite {'PASSED' if report.all_ok else 'FAILED'}")
    return 0 if report.all_ok else 1


def _cmd_verify(args):
    config = args.config or default_suite_path()
    report = run_suite(config, c2_floor=args.c2_floor)
    return _finish_report(report, args)


def _cmd_sweep(args):
    families = tuple(args.families.split(",")) if args.families else None
    kwargs = {
        "n_scenarios": args.n,
        "seed": args.seed,
        "lemma_samples": args.lemma_samples,
    }
    if families:
        kwargs["families"] = families
    if args.max_step is not None:
        kwargs["max_step"] = args.max_step
    report = random_sweep(**kwargs)
    return _finish_report(report, args)


def _cmd_simon_stolz(args):
    doc = load_suite_config(args.config)
    pot = parse_potential(doc.get("potential", doc), "potential")
    energy = doc.get("energy", 1.0) if args.energy is None else args.energy
    x_max = float(doc.get("x_max", 10.0)) if args.x_max is None else args.x_max
    step = args.max_step if args.max_step is not None else float(doc.get("step", 1e-3))
    curve = simon_stolz_curve(pot, energy, x_max, step)
    if args.out:
        curve.to_csv(args.out)
    else:
        curve.to_csv(sys.stdout)
    return 0


def _cmd_prufer(args):
    scn = _load_scenario(args)
    trace = scenario_trace(scn)
    k = args.k
    if k is None:
        if scn.energy.re <= 0 or scn.energy.im != 0:
            raise ConfigError("need E = k^2 > 0 real, or pass --k", "energy")
        k = math.sqrt(scn.energy.re)
    ptrace = prufer_decompose(trace, k)
    if args.out:
        ptrace.to_csv(args.out)
    else:
        ptrace.to_csv(sys.stdout)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="schro1d", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"schro1d {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required,
                       help="path to the JSON configuration")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--max-step", type=float, default=None, dest="max_step")

    p = sub.add_parser("c1", help="exact C1 constant of a potential")
    common(p)
    p.set_defaults(func=_cmd_c1)

    p = sub.add_parser("solve", help="propagate a scenario, export trace CSV")
    common(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="run a suite config and report")
    common(p, config_required=False)
    p.add_argument("--c2-floor", type=float, default=None, dest="c2_floor",
                   help="opt-in lower bound for C2 (degenerate-case escape hatch)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sweep", help="randomized corroboration sweep")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--families", help="comma-separated family names")
    p.add_argument("--lemma-samples", type=int, default=1000, dest="lemma_samples")
    p.add_argument("--out", help="report JSON output file")
    p.add_argument("--max-step", type=float, default=None, dest="max_step")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("simon-stolz", help="transfer-matrix integral curve CSV")
    common(p)
    p.add_argument("--energy", type=float, default=None)
    p.add_argument("--x-max", type=float, default=None, dest="x_max")
    p.set_defaults(func=_cmd_simon_stolz)

    p = sub.add_parser("prufer", help="amplitude/phase decomposition CSV")
    common(p)
    p.add_argument("--k", type=float, default=None)
    p.set_defaults(func=_cmd_prufer)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except Schro1dError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
