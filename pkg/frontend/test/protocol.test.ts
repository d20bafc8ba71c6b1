import { describe, expect, it } from "vitest";

import {
  encodeClientMessage,
  parseServerMessage,
  validateClientMessage,
  type CommandMessage,
} from "../src/protocol.js";
import { makeSnapshot } from "./fixtures.js";

describe("parseServerMessage", () => {
  it("accepts a well-formed snapshot", () => {
    const snap = makeSnapshot();
    const parsed = parseServerMessage(JSON.stringify(snap));
    expect(parsed).not.toBeNull();
    expect(parsed!.type).toBe("snapshot");
  });

  it("accepts an error frame", () => {
    const parsed = parseServerMessage('{"type":"error","v":1,"message":"boom"}');
    expect(parsed).toEqual({ type: "error", v: 1, message: "boom" });
  });

  it("accepts a null f_m (singular manipulability)", () => {
    const snap = makeSnapshot();
    snap.metrics.f_m = null;
    expect(parseServerMessage(JSON.stringify(snap))).not.toBeNull();
  });

  it.each([
    ["not json", "{nope"],
    ["wrong version", JSON.stringify({ ...makeSnapshot(), v: 2 })],
    ["unknown type", JSON.stringify({ ...makeSnapshot(), type: "mystery" })],
    ["unknown phase", JSON.stringify({ ...makeSnapshot(), phase: "Limbo" })],
    ["missing gates", JSON.stringify({ ...makeSnapshot(), gates: undefined })],
    [
      "short point list",
      JSON.stringify(
        makeSnapshot({
          arms: {
            left: { angles: [0], points: [[0, 0, 0]], gripper: 0 },
            right: makeSnapshot().arms.right,
          },
        })
      ),
    ],
  ])("rejects %s", (_label, text) => {
    expect(parseServerMessage(text)).toBeNull();
  });
});

describe("validateClientMessage", () => {
  const good: CommandMessage = {
    type: "command",
    v: 1,
    pos: [0.1, 0.2, 0.3],
    quat: [1, 0, 0, 0],
    gripper: 0.5,
    clutch: true,
  };

  it("accepts a valid command", () => {
    expect(validateClientMessage(good)).toBeNull();
  });

  it("accepts control reset", () => {
    expect(validateClientMessage({ type: "control", v: 1, action: "reset" })).toBeNull();
  });

  it("rejects a non-unit quaternion", () => {
    expect(validateClientMessage({ ...good, quat: [2, 0, 0, 0] })).toMatch(/unit/);
  });

  it("rejects gripper out of range", () => {
    expect(validateClientMessage({ ...good, gripper: 1.5 })).toMatch(/gripper/);
  });

  it("encode refuses invalid frames", () => {
    expect(() => encodeClientMessage({ ...good, gripper: -1 })).toThrow();
  });

  it("encode round-trips through JSON", () => {
    const text = encodeClientMessage(good);
    expect(JSON.parse(text)).toEqual(good);
  });
});
