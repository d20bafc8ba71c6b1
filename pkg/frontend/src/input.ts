/**
 * Keyboard jogging: key events move a client-side master cursor; one command
 * per flush carries the accumulated motion (the caller flushes at the
 * snapshot rate, which is the client-side rate limit).
 *
 * While the clutch is disengaged, motion keys are ignored entirely, so
 * nothing is emitted and the cursor stays where it was.
 */

import { IDENTITY_QUAT, add, quatFromAxisAngle, quatMul, quatNormalize, scale } from "./math.js";
import type { CommandMessage, Quat, Vec3 } from "./protocol.js";
import { PROTOCOL_VERSION } from "./protocol.js";

export interface JogSteps {
  linear: number; // meters per keypress
  angularDeg: number; // degrees per keypress
}

export const DEFAULT_STEPS: JogSteps = { linear: 0.005, angularDeg: 1.0 };

const TRANSLATION_KEYS: Record<string, Vec3> = {
  w: [1, 0, 0],
  s: [-1, 0, 0],
  a: [0, 1, 0],
  d: [0, -1, 0],
  r: [0, 0, 1],
  f: [0, 0, -1],
};

const ROTATION_KEYS: Record<string, Vec3> = {
  u: [1, 0, 0],
  o: [-1, 0, 0],
  i: [0, 1, 0],
  k: [0, -1, 0],
  j: [0, 0, 1],
  l: [0, 0, -1],
};

export const CLUTCH_KEY = "c";
export const GRIPPER_KEY = "g";

export class InputMapper {
  pos: Vec3 = [0, 0, 0];
  quat: Quat = [...IDENTITY_QUAT] as Quat;
  gripper = 0;
  clutch = false;
  steps: JogSteps;
  private dirty = false;

  constructor(steps: JogSteps = DEFAULT_STEPS) {
    this.steps = steps;
  }

  /** Handle one key press; returns true when the key meant something. */
  key(key: string): boolean {
    const k = key.toLowerCase();
    if (k === CLUTCH_KEY) {
      this.clutch = !this.clutch;
      this.dirty = true;
      return true;
    }
    if (k === GRIPPER_KEY) {
      this.gripper = this.gripper >= 0.5 ? 0 : 1;
      this.dirty = true;
      return true;
    }
    if (!this.clutch) return false;
    if (k in TRANSLATION_KEYS) {
      this.pos = add(this.pos, scale(TRANSLATION_KEYS[k], this.steps.linear));
      this.dirty = true;
      return true;
    }
    if (k in ROTATION_KEYS) {
      const dq = quatFromAxisAngle(ROTATION_KEYS[k], (this.steps.angularDeg * Math.PI) / 180);
      this.quat = quatNormalize(quatMul(dq, this.quat));
      this.dirty = true;
      return true;
    }
    return false;
  }

  /** Pointer drag in a view plane; axes are unit world directions for screen x/y. */
  drag(axisX: Vec3, axisY: Vec3, dxMeters: number, dyMeters: number): boolean {
    if (!this.clutch) return false;
    this.pos = add(this.pos, add(scale(axisX, dxMeters), scale(axisY, dyMeters)));
    this.dirty = true;
    return true;
  }

  /** One command per flush when anything changed; null otherwise. */
  flush(): CommandMessage | null {
    if (!this.dirty) return null;
    this.dirty = false;
    return {
      type: "command",
      v: PROTOCOL_VERSION,
      pos: [...this.pos] as Vec3,
      quat: [...this.quat] as Quat,
      gripper: this.gripper,
      clutch: this.clutch,
    };
  }
}
