/**
 * Wire protocol types and validation, mirroring docs/protocol.md (version 1).
 * Every frame is one JSON object with `type` and `v`.
 */

export const PROTOCOL_VERSION = 1;

export type Vec3 = [number, number, number];
export type Quat = [number, number, number, number]; // w, x, y, z

export type Phase =
  | "Initial"
  | "GraspRight"
  | "Transport"
  | "AlignLeft"
  | "Twist"
  | "Done"
  | "Aborted";

export interface ArmSnapshot {
  angles: number[];
  points: Vec3[];
  gripper: number;
}

export interface Snapshot {
  type: "snapshot";
  v: 1;
  tick: number;
  phase: Phase;
  arms: { left: ArmSnapshot; right: ArmSnapshot };
  object: {
    p1: Vec3;
    p2: Vec3;
    axis: Vec3;
    end1_grasp: "free" | "left" | "right";
    end2_grasp: "free" | "left" | "right";
  };
  metrics: {
    delta_deg: number;
    d_min: number;
    closest_pair: [number, number];
    witness_left: Vec3;
    witness_right: Vec3;
    theta_t_deg: number;
    m_left: number;
    m_right: number;
    f_m: number | null;
  };
  gates: { d_thr: number; delta_tor_deg: number; theta_total_deg: number };
  last_verdict: string;
  abort_reason: string;
}

export interface CommandMessage {
  type: "command";
  v: 1;
  pos: Vec3;
  quat: Quat;
  gripper: number;
  clutch: boolean;
}

export interface ControlMessage {
  type: "control";
  v: 1;
  action: "reset" | "record";
}

export interface ErrorMessage {
  type: "error";
  v: 1;
  message: string;
}

export type ServerMessage = Snapshot | ErrorMessage;
export type ClientMessage = CommandMessage | ControlMessage;

const PHASES: Phase[] = [
  "Initial",
  "GraspRight",
  "Transport",
  "AlignLeft",
  "Twist",
  "Done",
  "Aborted",
];
const GRASPS = ["free", "left", "right"];

function isNum(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isVec3(v: unknown): v is Vec3 {
  return Array.isArray(v) && v.length === 3 && v.every(isNum);
}

function isVec3List(v: unknown): v is Vec3[] {
  return Array.isArray(v) && v.length >= 2 && v.every(isVec3);
}

function isArm(a: any): a is ArmSnapshot {
  return (
    a &&
    Array.isArray(a.angles) &&
    a.angles.every(isNum) &&
    isVec3List(a.points) &&
    isNum(a.gripper)
  );
}

/** Parse and validate one server frame; null when the text is not a valid frame. */
export function parseServerMessage(text: string): ServerMessage | null {
  let msg: any;
  try {
    msg = JSON.parse(text);
  } catch {
    return null;
  }
  if (!msg || typeof msg !== "object" || msg.v !== PROTOCOL_VERSION) return null;
  if (msg.type === "error") {
    return typeof msg.message === "string" ? (msg as ErrorMessage) : null;
  }
  if (msg.type !== "snapshot") return null;
  const m = msg.metrics;
  const g = msg.gates;
  const o = msg.object;
  const ok =
    Number.isInteger(msg.tick) &&
    PHASES.includes(msg.phase) &&
    msg.arms &&
    isArm(msg.arms.left) &&
    isArm(msg.arms.right) &&
    o &&
    isVec3(o.p1) &&
    isVec3(o.p2) &&
    isVec3(o.axis) &&
    GRASPS.includes(o.end1_grasp) &&
    GRASPS.includes(o.end2_grasp) &&
    m &&
    isNum(m.delta_deg) &&
    isNum(m.d_min) &&
    Array.isArray(m.closest_pair) &&
    m.closest_pair.length === 2 &&
    isVec3(m.witness_left) &&
    isVec3(m.witness_right) &&
    isNum(m.theta_t_deg) &&
    isNum(m.m_left) &&
    isNum(m.m_right) &&
    (m.f_m === null || isNum(m.f_m)) &&
    g &&
    isNum(g.d_thr) &&
    isNum(g.delta_tor_deg) &&
    isNum(g.theta_total_deg) &&
    typeof msg.last_verdict === "string" &&
    typeof msg.abort_reason === "string";
  return ok ? (msg as Snapshot) : null;
}

/** Validate an outgoing client frame against the protocol contract. */
export function validateClientMessage(msg: ClientMessage): string | null {
  if (msg.v !== PROTOCOL_VERSION) return "wrong protocol version";
  if (msg.type === "control") {
    return msg.action === "reset" || msg.action === "record" ? null : "unknown control action";
  }
  if (msg.type !== "command") return "unknown message type";
  if (!isVec3(msg.pos)) return "pos must be [x, y, z]";
  if (!Array.isArray(msg.quat) || msg.quat.length !== 4 || !msg.quat.every(isNum))
    return "quat must be [w, x, y, z]";
  const n = Math.hypot(...msg.quat);
  if (Math.abs(n - 1) > 1e-6) return "quat must be unit norm";
  if (!isNum(msg.gripper) || msg.gripper < 0 || msg.gripper > 1)
    return "gripper must be in [0, 1]";
  if (typeof msg.clutch !== "boolean") return "clutch must be a boolean";
  return null;
}

export function encodeClientMessage(msg: ClientMessage): string {
  const problem = validateClientMessage(msg);
  if (problem) throw new Error(`invalid outgoing frame: ${problem}`);
  return JSON.stringify(msg);
}
