import type { Snapshot, Vec3 } from "../src/protocol.js";

function line(x: number, y0: number): Vec3[] {
  const pts: Vec3[] = [];
  for (let i = 0; i < 8; i++) pts.push([x, y0, i * 0.1]);
  return pts;
}

/** A plausible mid-alignment snapshot; values deliberately distinct. */
export function makeSnapshot(overrides: Partial<Snapshot> = {}): Snapshot {
  return {
    type: "snapshot",
    v: 1,
    tick: 137,
    phase: "AlignLeft",
    arms: {
      left: { angles: [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7], points: line(0.0, 0.3), gripper: 0 },
      right: { angles: [-0.1, 0.2, -0.3, 0.4, -0.5, 0.6, -0.7], points: line(0.0, -0.3), gripper: 1 },
    },
    object: {
      p1: [0.25, -0.05, 0.42],
      p2: [0.25, -0.019, 0.325],
      axis: [0.0, 0.031, -0.095],
      end1_grasp: "right",
      end2_grasp: "free",
    },
    metrics: {
      delta_deg: 71.93,
      d_min: 0.1294,
      closest_pair: [5, 5],
      witness_left: [0.2, 0.05, 0.4],
      witness_right: [0.2, -0.06, 0.42],
      theta_t_deg: 12.5,
      m_left: 1.832,
      m_right: 1.417,
      f_m: 1.2517,
    },
    gates: { d_thr: 0.1, delta_tor_deg: 5.0, theta_total_deg: 90.0 },
    last_verdict: "ok",
    abort_reason: "",
    ...overrides,
  };
}
