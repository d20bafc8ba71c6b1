/** Pure mapping from a snapshot to the values the gauge panel shows. */

import type { Snapshot } from "./protocol.js";

export interface GaugeModel {
  tick: number;
  phase: string;
  deltaDeg: number;
  deltaOk: boolean; // delta <= delta_tor
  dMin: number;
  dMinOk: boolean; // d_min >= d_thr
  thetaT: number;
  thetaGoal: number;
  mLeft: number;
  mRight: number;
  fM: number | null;
  verdict: string;
  abortReason: string;
}

export function gaugesFrom(snapshot: Snapshot): GaugeModel {
  const m = snapshot.metrics;
  const g = snapshot.gates;
  return {
    tick: snapshot.tick,
    phase: snapshot.phase,
    deltaDeg: m.delta_deg,
    deltaOk: m.delta_deg <= g.delta_tor_deg,
    dMin: m.d_min,
    dMinOk: m.d_min >= g.d_thr,
    thetaT: m.theta_t_deg,
    thetaGoal: g.theta_total_deg,
    mLeft: m.m_left,
    mRight: m.m_right,
    fM: m.f_m,
    verdict: snapshot.last_verdict,
    abortReason: snapshot.abort_reason,
  };
}
