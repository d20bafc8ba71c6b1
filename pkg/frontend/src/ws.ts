/**
 * Socket client for the service protocol. The socket constructor is
 * injectable so tests can drive the console from a stub snapshot server.
 */

import type { ClientMessage, ServerMessage } from "./protocol.js";
import { encodeClientMessage, parseServerMessage } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  readyState: number;
}

export interface ConsoleLink {
  send(msg: ClientMessage): void;
  close(): void;
}

export interface LinkHandlers {
  onMessage(msg: ServerMessage): void;
  onStatus(status: "connecting" | "open" | "closed"): void;
  onBadFrame?(text: string): void;
}

const OPEN = 1;

export function connectConsole(
  url: string,
  handlers: LinkHandlers,
  socketFactory: (url: string) => SocketLike = (u) => new WebSocket(u) as unknown as SocketLike
): ConsoleLink {
  const ws = socketFactory(url);
  handlers.onStatus("connecting");
  ws.onopen = () => handlers.onStatus("open");
  ws.onclose = () => handlers.onStatus("closed");
  ws.onerror = () => handlers.onStatus("closed");
  ws.onmessage = (ev) => {
    const msg = parseServerMessage(String(ev.data));
    if (msg === null) {
      handlers.onBadFrame?.(String(ev.data));
      return;
    }
    handlers.onMessage(msg);
  };
  return {
    send(msg: ClientMessage) {
      if (ws.readyState === OPEN) ws.send(encodeClientMessage(msg));
    },
    close() {
      ws.close();
    },
  };
}
