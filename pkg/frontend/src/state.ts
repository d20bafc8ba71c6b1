/** Connection + view state; rendered values always come from the latest snapshot. */

import type { Snapshot } from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed";
export type InputMode = "keyboard" | "pointer";

export interface ViewState {
  snapshot: Snapshot | null;
  status: ConnectionStatus;
  mode: InputMode;
  lastError: string;
}

export function initialViewState(): ViewState {
  return { snapshot: null, status: "connecting", mode: "keyboard", lastError: "" };
}
