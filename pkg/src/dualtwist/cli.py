"""Command-line interface.

Exit codes: 0 the run reached Done (or the command succeeded), 2 the run
ended short of Done (Aborted, stalled, infeasible), 3 bad inputs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .collision import ArmSkeleton, collision_check, min_arm_distance
from .errors import ConfigError, DualTwistError, InfeasibleError, TraceFormatError
from .kinematics import JointConfig, joint_positions
from .scenario import load_chain, load_scenario
from .service import (
    EXIT_INPUT_ERROR,
    EXIT_NOT_DONE,
    SessionConfig,
    run_headless,
    twist_problem_from_scenario,
)

USAGE_ERROR = EXIT_INPUT_ERROR


def _session_config(args, mode: str) -> SessionConfig:
    return SessionConfig(
        scenario_path=Path(args.scenario),
        left_arm=Path(args.left_arm) if args.left_arm else None,
        right_arm=Path(args.right_arm) if args.right_arm else None,
        trace=Path(args.trace) if getattr(args, "trace", None) else None,
        metrics_out=Path(args.metrics_out) if getattr(args, "metrics_out", None) else None,
        record=Path(args.record) if getattr(args, "record", None) else None,
        listen=getattr(args, "listen", "127.0.0.1:8765"),
        tick_rate=getattr(args, "tick_rate", None),
        max_ticks=getattr(args, "max_ticks", None),
        mode=mode,
    )


def _cmd_run(args) -> int:
    result = run_headless(_session_config(args, "headless"))
    print(result.summary)
    if args.metrics_out:
        print(f"metrics written to {args.metrics_out}")
    return result.exit_code


def _cmd_serve(args) -> int:
    from .server import serve_interactive

    return serve_interactive(_session_config(args, "interactive"))


def _cmd_optimize(args) -> int:
    scenario = load_scenario(
        args.scenario,
        Path(args.left_arm) if args.left_arm else None,
        Path(args.right_arm) if args.right_arm else None,
    )
    if args.lambda_m is not None:
        scenario.optimization.lambda_m = args.lambda_m
    if args.singularity_floor is not None:
        scenario.optimization.singularity_floor = args.singularity_floor
    if args.seed_count is not None:
        scenario.optimization.seed_count = args.seed_count
    problem = twist_problem_from_scenario(scenario)
    from .config_opt import optimize_twist_configs

    try:
        result = optimize_twist_configs(problem)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        for violation in exc.violations:
            print(f"  - {violation}", file=sys.stderr)
        return EXIT_NOT_DONE
    print("converged: true")
    print(f"f_a: {result.f_a!r}")
    print(f"f_m: {result.f_m!r}")
    print(f"combined: {result.combined!r}")
    print(f"sigma_left: {result.sigma_left!r}")
    print(f"sigma_right: {result.sigma_right!r}")
    print(f"d_min: {result.d_min!r}")
    print(f"iterations: {result.iterations}")
    print("left_config: [" + ", ".join(repr(float(a)) for a in result.left_config.angles) + "]")
    print("right_config: [" + ", ".join(repr(float(a)) for a in result.right_config.angles) + "]")
    return 0


def _parse_config(text: str, name: str) -> JointConfig:
    try:
        values = [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"{name} must be a comma- or space-separated list of angles")
    return JointConfig(np.array(values))


def _cmd_check_collision(args) -> int:
    left_chain = load_chain(args.left_arm)
    right_chain = load_chain(args.right_arm)
    left_q = _parse_config(args.left_config, "--left-config")
    right_q = _parse_config(args.right_config, "--right-config")
    report = min_arm_distance(
        ArmSkeleton(joint_positions(left_chain, left_q)),
        ArmSkeleton(joint_positions(right_chain, right_q)),
        skip_adjacent_to_grasp=args.skip_grasp_segments,
    )
    print(f"d_min: {report.d_min!r}")
    print(f"closest_pair: [left segment {report.closest_pair[0]}, right segment {report.closest_pair[1]}]")
    print("witness_left: [" + ", ".join(repr(float(v)) for v in report.witness_left) + "]")
    print("witness_right: [" + ", ".join(repr(float(v)) for v in report.witness_right) + "]")
    if args.d_thr is not None:
        verdict = collision_check(report, args.d_thr)
        print(f"verdict: {'SAFE' if verdict.safe else 'UNSAFE'} (d_thr {args.d_thr!r})")
        return 0 if verdict.safe else EXIT_NOT_DONE
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualtwist",
        description="Dual-arm coordinated object-twisting simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, trace=True):
        p.add_argument("--scenario", required=True, help="scenario YAML file")
        p.add_argument("--left-arm", help="override the scenario's left chain file")
        p.add_argument("--right-arm", help="override the scenario's right chain file")
        if trace:
            p.add_argument("--trace", help="override the scenario's teleop trace")
            p.add_argument("--metrics-out", help="write the per-tick metrics CSV here")
            p.add_argument("--max-ticks", type=int, help="tick budget override")

    p_run = sub.add_parser("run", help="run a scenario headlessly against a trace")
    add_common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_replay = sub.add_parser("replay", help="alias of run (replay a recorded trace)")
    add_common(p_replay)
    p_replay.set_defaults(func=_cmd_run)

    p_serve = sub.add_parser("serve", help="host an interactive teleoperation session")
    add_common(p_serve, trace=False)
    p_serve.add_argument("--listen", default="127.0.0.1:8765", help="host:port to bind")
    p_serve.add_argument("--record", help="write the operator's commands to this trace file")
    p_serve.add_argument("--tick-rate", type=float, help="interactive tick rate override (Hz)")
    p_serve.set_defaults(func=_cmd_serve)

    p_opt = sub.add_parser("optimize", help="optimize the scenario's twist configurations")
    p_opt.add_argument("--scenario", required=True)
    p_opt.add_argument("--left-arm")
    p_opt.add_argument("--right-arm")
    p_opt.add_argument("--lambda-m", type=float, dest="lambda_m")
    p_opt.add_argument("--singularity-floor", type=float)
    p_opt.add_argument("--seed-count", type=int)
    p_opt.set_defaults(func=_cmd_optimize)

    p_cc = sub.add_parser("check-collision", help="minimum distance between two arm configs")
    p_cc.add_argument("--left-arm", required=True)
    p_cc.add_argument("--right-arm", required=True)
    p_cc.add_argument("--left-config", required=True, help="7 joint angles, radians")
    p_cc.add_argument("--right-config", required=True, help="7 joint angles, radians")
    p_cc.add_argument("--skip-grasp-segments", action="store_true")
    p_cc.add_argument("--d-thr", type=float, help="also print a SAFE/UNSAFE verdict")
    p_cc.set_defaults(func=_cmd_check_collision)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, TraceFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except DualTwistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_DONE


if __name__ == "__main__":
    sys.exit(main())
