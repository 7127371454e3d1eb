"""Command line entry point.

Subcommands:

* ``simulate`` runs a toolpath from JSON inputs and writes cwe.csv,
  slices.csv, and perf.csv under --out.
* ``validate`` runs the analytical-oracle suite and prints per-case
  angular deltas as CSV; exits nonzero if any case misses its threshold.
* ``bench`` times the synthetic clearing path and writes perf.csv.

Exit codes: 0 success, 1 validation/usage error, 2 geometry error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import GeometryError, ValidationError
from .io import AngleOutput, SimulationConfig, emit_svg_topview, load_stock, load_tool, load_toolpath
from .pipeline import run_bench, run_oracle_validation, run_simulation, write_outputs
from .sweep import SweepMode


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="slicecut", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run a toolpath and write CWE CSV files")
    sim.add_argument("--tool", required=True, help="tool definition JSON")
    sim.add_argument("--stock", required=True, help="stock definition JSON")
    sim.add_argument("--toolpath", required=True, help="toolpath JSON")
    sim.add_argument("--dz", type=float, default=1.0, help="axial slice thickness, mm")
    sim.add_argument("--chord-tol", type=float, default=1e-3, help="arc linearization tolerance, mm")
    sim.add_argument("--mode", choices=[m.value for m in SweepMode], default="exact")
    sim.add_argument("--spacing", type=float, default=None,
                     help="sample spacing for sampled_union mode, mm (default radius/4)")
    sim.add_argument("--out", default="out", help="output directory")
    sim.add_argument("--svg-every", type=int, default=0, metavar="N",
                     help="emit a top-view SVG every N segments")
    sim.add_argument("--snapshot-every", type=int, default=0, metavar="N",
                     help="dump a workpiece snapshot every N segments")
    sim.add_argument("--angles", choices=[a.value for a in AngleOutput], default="raw",
                     help="angle reference written to slices.csv")
    sim.add_argument("--parallel", action="store_true", help="update slices in parallel")
    sim.add_argument("--no-timing", action="store_true",
                     help="zero all wall-clock fields for byte-reproducible output")

    val = sub.add_parser("validate", help="compare the engine against the analytical oracle")
    val.add_argument("--chord-tol", type=float, default=1e-4)

    bench = sub.add_parser("bench", help="run the synthetic clearing benchmark")
    bench.add_argument("--segments", type=int, default=10000)
    bench.add_argument("--dz", type=float, default=1.0)
    bench.add_argument("--out", default="out")
    bench.add_argument("--parallel", action="store_true")
    return parser


def _cmd_simulate(args) -> int:
    tool = load_tool(args.tool)
    stock = load_stock(args.stock)
    toolpath = load_toolpath(args.toolpath)
    if toolpath.tool_id != tool.id:
        raise ValidationError(
            f"toolpath references tool {toolpath.tool_id!r} but tool file defines {tool.id!r}",
            path="toolpath.tool_id",
        )
    config = SimulationConfig(
        dz=args.dz,
        chord_tol=args.chord_tol,
        mode=SweepMode(args.mode),
        spacing=args.spacing,
        out_dir=Path(args.out),
        snapshot_interval=args.snapshot_every,
        angle_output=AngleOutput(args.angles),
        svg_every=args.svg_every,
        parallel_slices=args.parallel,
        timing=not args.no_timing,
    )
    config.out_dir.mkdir(parents=True, exist_ok=True)

    def on_segment(rec, pre_slices):
        if config.svg_every > 0 and rec.cl_index % config.svg_every == 0 and rec.slices:
            z_first = rec.slices[0].z_mid
            region = next(r for z, r in pre_slices if z == z_first)
            svg = emit_svg_topview(rec, region)
            (config.out_dir / f"cwe_{rec.cl_index:06d}.svg").write_text(svg, encoding="utf-8")

    result = run_simulation(config, tool, stock, toolpath, on_segment=on_segment)
    write_outputs(result, config)
    if config.snapshot_interval > 0:
        result.final_stack.write_snapshot(config.out_dir / "ipw_final.txt")
    print(
        f"{toolpath.operation}: processed {result.perf.n_cls_processed}/"
        f"{result.perf.n_cls_scheduled} CLs in {result.perf.total_time_s:.3f} s"
    )
    return 0


def _cmd_validate(args) -> int:
    outcomes = run_oracle_validation(chord_tol=args.chord_tol)
    print("case,kind,threshold_deg,max_delta_deg,engine_bounds,oracle_bounds,status")
    worst = 0.0
    failed = False
    for o in outcomes:
        status = "pass" if o.passed else "FAIL"
        failed |= not o.passed
        worst = max(worst, o.max_delta_deg)
        eng = ";".join(f"{b:.4f}" for b in o.engine_bounds)
        ora = ";".join(f"{b:.4f}" for b in o.oracle_bounds)
        print(
            f"{o.case.name},{o.case.kind},{o.case.threshold_deg},"
            f"{o.max_delta_deg:.6f},{eng},{ora},{status}"
        )
    print(f"# worst delta: {worst:.6f} deg over {len(outcomes)} cases")
    return 1 if failed else 0


def _cmd_bench(args) -> int:
    perf, median_ms = run_bench(args.segments, args.dz, args.out, parallel=args.parallel)
    print(
        f"bench: {perf.n_cls_processed}/{perf.n_cls_scheduled} CLs processed, "
        f"total {perf.total_time_s:.1f} s, avg {perf.avg_time_per_processed_cl_ms:.2f} ms, "
        f"median {median_ms:.2f} ms per processed segment"
    )
    if median_ms > 300.0:
        print("warning: median exceeds the 300 ms/segment target (performance regression)")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_bench(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except GeometryError as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
