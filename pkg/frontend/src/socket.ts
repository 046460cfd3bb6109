import { decodeServer, encodeClient, type ClientMsg } from "./schema.js";
import type { ViewState } from "./state.js";

// Structural view of a WebSocket, so tests can inject the `ws` package
// under node where no global WebSocket exists.
export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: string, listener: (ev: any) => void): void;
}

export type SocketCtor = new (url: string) => SocketLike;

/**
 * One connection to the bridge. Socket callbacks do nothing but feed the
 * ViewState; rendering happens elsewhere on the animation frame.
 */
export class BridgeSocket {
  private ws: SocketLike | null = null;

  constructor(
    readonly url: string,
    private view: ViewState,
    private Ctor: SocketCtor = (globalThis as any).WebSocket,
  ) {}

  connect(): void {
    if (this.view.status !== "closed") return;
    this.view.status = "connecting";
    const ws = new this.Ctor(this.url);
    this.ws = ws;
    ws.addEventListener("open", () => {
      if (ws === this.ws) this.view.status = "open";
    });
    ws.addEventListener("close", () => {
      if (ws === this.ws) this.view.status = "closed";
    });
    ws.addEventListener("error", () => {
      // the close event follows and flips the status
    });
    ws.addEventListener("message", (ev: { data: unknown }) => {
      const msg = decodeServer(String(ev.data));
      if (msg !== null) this.view.ingest(msg);
    });
  }

  /** Validate, serialize and send; false (and no send) unless open. */
  send(msg: ClientMsg): boolean {
    if (this.ws === null || this.view.status !== "open") return false;
    this.ws.send(encodeClient(msg));
    this.view.noteSent(msg.type);
    return true;
  }

  close(): void {
    const ws = this.ws;
    this.ws = null;
    this.view.status = "closed";
    ws?.close();
  }
}
