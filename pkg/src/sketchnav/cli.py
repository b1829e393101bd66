"""Command line interface.

Subcommands: `serve` (session service over TCP + WebSocket), `replay` (headless
run of a stored path), `eval` (fidelity report for a stored path), `scenario`
(emit a built-in course) and `stats` (paired signed-rank comparison).

Exit codes: 0 success, 2 bad arguments, 3 I/O error, 4 protocol error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

from . import report as rpt
from .errors import (
    DatabaseFormatError,
    MapFormatError,
    NothingToSendError,
    PathNotFoundError,
    ProtocolError,
    SketchNavError,
)
from .evaluator import (
    evaluate_path,
    load_scenario,
    make_stage,
    pct_within_gt,
    save_scenario,
    scenario_grid,
)
from .geometry import Pose2D
from .planner import assign_orientations
from .pure_pursuit import ControllerParams
from .simulator import RobotState, load_map, run_follow
from .stats import PairedSample, wilcoxon_signed_rank
from .store import PathStore

EXIT_OK = 0
EXIT_BAD_ARGS = 2
EXIT_IO = 3
EXIT_PROTOCOL = 4


def _controller_params(args) -> ControllerParams:
    params = ControllerParams()
    if args.lookahead is not None:
        params = replace(params, lookahead=args.lookahead)
    if args.speed is not None:
        params = replace(params, cruise_speed=args.speed)
    return params


def _add_controller_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dt", type=float, default=0.05, help="simulation step [s]")
    parser.add_argument("--lookahead", type=float, default=None, help="pursuit lookahead [m]")
    parser.add_argument("--speed", type=float, default=None, help="cruise speed [m/s]")


def _load_grid(args, scenario):
    if args.map is not None:
        return load_map(args.map)
    if scenario is not None:
        return scenario_grid(scenario)
    return None


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"no such file: {p}")
    return p


def cmd_scenario(args) -> int:
    scn = make_stage(args.stage)
    save_scenario(scn, args.out)
    print(f"wrote stage {scn.name} scenario to {args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    _require_file(args.db)
    scn = load_scenario(_require_file(args.scenario))
    store = PathStore(args.db)
    points = store.fetch_for_send(args.path_id)
    grid = _load_grid(args, scn)

    result, gt_mask, drawn_mask = evaluate_path(points, scn, grid)
    out = Path(args.out)
    csv_file = out.with_suffix(".csv")
    json_file = out.with_suffix(".json")
    png_file = out.with_suffix(".png")
    rpt.write_metrics_csv(result, csv_file)
    rpt.write_metrics_json(result, json_file, scenario=scn)
    rpt.classification_figure(gt_mask, drawn_mask, png_file, drawn_points=points, scenario=scn)
    for name, value in result.rows():
        print(f"{name}: {'undefined' if value is None else f'{value:.4f}'}")
    print(f"wrote {csv_file}, {json_file}, {png_file}")
    return EXIT_OK


def cmd_replay(args) -> int:
    _require_file(args.db)
    scn = load_scenario(_require_file(args.scenario)) if args.scenario else None
    store = PathStore(args.db)
    points = store.fetch_for_send(args.path_id)
    grid = _load_grid(args, scn)

    path = assign_orientations(points)
    if scn is not None:
        start_pose = scn.start_pose
    else:
        first = path.poses[0]
        start_pose = Pose2D(first.position, first.theta)
    params = _controller_params(args)
    trajectory = run_follow(
        path, RobotState(start_pose, 0.0), params=params, grid=grid, dt=args.dt
    )

    out = Path(args.out)
    csv_file = out.with_suffix(".csv")
    png_file = out.with_suffix(".png")
    trajectory.write_csv(csv_file)
    rpt.trajectory_figure(png_file, trajectory=trajectory, path=path, scenario=scn, grid=grid)
    print(f"outcome: {trajectory.outcome.value} after {trajectory.samples[-1].t:.2f} s")
    if scn is not None and grid is not None:
        result, gt_mask, _drawn = evaluate_path(points, scn, grid)
        pct = result.pct_within_gt
        print(f"drawn path within GT: {'undefined' if pct is None else f'{pct:.4f}'}")
        traj_pct = pct_within_gt(trajectory.positions, gt_mask)
        print(f"trajectory within GT: {traj_pct:.4f}")
    print(f"wrote {csv_file}, {png_file}")
    return EXIT_OK


def cmd_stats(args) -> int:
    input_file = _require_file(args.input)
    participants: list[str] = []
    a_values: list[float] = []
    b_values: list[float] = []
    with open(input_file, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        if "condition_a" not in fields or "condition_b" not in fields:
            raise DatabaseFormatError(
                "paired CSV needs 'participant,condition_a,condition_b' columns"
            )
        for row in reader:
            participants.append(row.get("participant", str(len(participants))))
            a_values.append(float(row["condition_a"]))
            b_values.append(float(row["condition_b"]))

    result = wilcoxon_signed_rank(PairedSample.of(a_values, b_values), alternative=args.alternative)
    print(
        f"W={result.w_statistic:g}  p={result.p_value:.6g}  r={result.effect_size_r:.3f}  "
        f"n={result.n_effective}  ({result.method}, {result.alternative})"
    )
    if args.out:
        out = Path(args.out)
        rpt.write_stat_csv(result, out.with_suffix(".csv"))
        rpt.write_stat_json(result, out.with_suffix(".json"))
        rpt.paired_comparison_figure(a_values, b_values, out.with_suffix(".png"))
        print(f"wrote {out.with_suffix('.csv')}, {out.with_suffix('.json')}, {out.with_suffix('.png')}")
    return EXIT_OK


def cmd_serve(args) -> int:
    # imported lazily so headless subcommands never touch asyncio/websockets
    from .server import serve_forever

    scn = load_scenario(_require_file(args.scenario)) if args.scenario else None
    grid = _load_grid(args, scn)
    params = _controller_params(args)
    serve_forever(
        db_file=args.db,
        host=args.host,
        port=args.port,
        ws_port=args.ws_port,
        grid=grid,
        scenario=scn,
        params=params,
        dt=args.dt,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sketchnav", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the drawing session service")
    p_serve.add_argument("--db", required=True, help="path database file")
    p_serve.add_argument("--map", default=None, help="map metadata file")
    p_serve.add_argument("--scenario", default=None, help="scenario file for GT overlay/metrics")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765, help="TCP newline-JSON port")
    p_serve.add_argument("--ws-port", type=int, default=None, help="WebSocket port (default: port+1)")
    _add_controller_flags(p_serve)
    p_serve.set_defaults(func=cmd_serve)

    p_replay = sub.add_parser("replay", help="follow a stored path headlessly")
    p_replay.add_argument("--db", required=True)
    p_replay.add_argument("--path-id", default=None, help="stored path id (default: latest)")
    p_replay.add_argument("--scenario", default=None)
    p_replay.add_argument("--map", default=None)
    p_replay.add_argument("--out", required=True, help="output prefix (.csv and .png)")
    _add_controller_flags(p_replay)
    p_replay.set_defaults(func=cmd_replay)

    p_eval = sub.add_parser("eval", help="score a stored path against a scenario GT")
    p_eval.add_argument("--db", required=True)
    p_eval.add_argument("--path-id", default=None)
    p_eval.add_argument("--scenario", required=True)
    p_eval.add_argument("--map", default=None)
    p_eval.add_argument("--out", required=True, help="output prefix (.csv, .json and .png)")
    p_eval.set_defaults(func=cmd_eval)

    p_scn = sub.add_parser("scenario", help="emit a built-in staged course")
    p_scn.add_argument("--stage", required=True, choices=["A", "B", "practice"])
    p_scn.add_argument("--out", required=True)
    p_scn.set_defaults(func=cmd_scenario)

    p_stats = sub.add_parser("stats", help="paired Wilcoxon signed-rank comparison")
    p_stats.add_argument("--input", required=True, help="CSV: participant,condition_a,condition_b")
    p_stats.add_argument(
        "--alternative", default="two-sided", choices=["two-sided", "greater", "less"]
    )
    p_stats.add_argument("--out", default=None, help="output prefix (.csv, .json and .png)")
    p_stats.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PathNotFoundError, NothingToSendError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except ProtocolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except (OSError, MapFormatError, DatabaseFormatError, SketchNavError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KeyboardInterrupt:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
