#!/usr/bin/env python3
"""Regenerate the protocol fixture frames the console tests validate.

Run after changing the snapshot encoder so the frontend suite keeps checking
frames produced by the real service: python3 tools/gen_protocol_fixtures.py
"""

import json
from pathlib import Path

from dualtwist.scenario import default_scenario_path, load_scenario
from dualtwist.service import group_trace_by_tick, snapshot_from_engine
from dualtwist.task_engine import Phase, TaskEngine
from dualtwist.teleop import read_trace
from dualtwist.wire import encode_error, encode_snapshot

OUT = Path(__file__).resolve().parents[1] / "frontend/test/fixtures"


def main():
    scenario = load_scenario(default_scenario_path())
    engine = TaskEngine(scenario)
    grouped = group_trace_by_tick(read_trace(scenario.teleop.trace))
    frames = {}
    while engine.phase is not Phase.DONE and engine.tick < 2000:
        engine.step(tuple(grouped.get(engine.tick + 1, ())))
        if engine.tick == 1:
            frames["initial"] = encode_snapshot(snapshot_from_engine(engine))
        if engine.phase is Phase.ALIGN_LEFT and "align" not in frames:
            frames["align"] = encode_snapshot(snapshot_from_engine(engine))
        if engine.phase is Phase.TWIST and "twist" not in frames:
            frames["twist"] = encode_snapshot(snapshot_from_engine(engine))
    frames["done"] = encode_snapshot(snapshot_from_engine(engine))

    aborted = load_scenario(default_scenario_path())
    aborted.task.collision_threshold = 2.0
    engine = TaskEngine(aborted)
    engine.step(())
    frames["aborted"] = encode_snapshot(snapshot_from_engine(engine))
    frames["error"] = encode_error("command.pos must be [x, y, z]")

    OUT.mkdir(parents=True, exist_ok=True)
    path = OUT / "server_frames.json"
    path.write_text(json.dumps({k: json.loads(v) for k, v in frames.items()}, indent=1) + "\n")
    print(f"wrote {len(frames)} frames to {path}")


if __name__ == "__main__":
    main()
