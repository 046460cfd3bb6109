import type { ServerMsg, StateMsg, Vec3 } from "./schema.js";

export type ConnectionStatus = "connecting" | "open" | "closed";
export type AxisSet = "xy" | "xz";

export const CHART_WINDOW_S = 10;
export const TRACE_WINDOW_S = 5;

export interface Sample {
  t: number;
  v: number;
}

/** Time-windowed series; keeps the trailing `windowS` seconds of samples. */
export class SeriesBuffer {
  private data: Sample[] = [];

  constructor(readonly windowS: number) {}

  push(t: number, v: number): void {
    this.data.push({ t, v });
    const cutoff = t - this.windowS;
    while (this.data.length > 0 && this.data[0].t < cutoff) this.data.shift();
  }

  samples(): readonly Sample[] {
    return this.data;
  }

  last(): Sample | undefined {
    return this.data[this.data.length - 1];
  }

  clear(): void {
    this.data.length = 0;
  }
}

export interface TracePoint {
  t: number;
  p: Vec3;
}

export interface DragVector {
  active: boolean;
  dx: number; // screen px, +right
  dy: number; // screen px, +down
  spin: number; // rotation handle angle [rad]
}

interface PendingCmd {
  kind: string;
  sentAt: number;
}

/**
 * Everything the page renders, in one place. Socket callbacks and the drag
 * controller write into it; the animation-frame loop only reads. Mode lamps
 * are never stored here separately: they are read off `lastState`, so the
 * panel can only ever show what the server last said.
 */
export class ViewState {
  status: ConnectionStatus = "closed";
  lastState: StateMsg | null = null;
  lastError: string | null = null;

  drag: DragVector = { active: false, dx: 0, dy: 0, spin: 0 };
  axisSet: AxisSet = "xy";

  /** Latest measured button round trip, ms; shown in the debug overlay. */
  buttonRtMs: number | null = null;

  readonly fHuman: SeriesBuffer[];
  readonly fExt: SeriesBuffer[];
  readonly eeVel: SeriesBuffer[];
  readonly trace: TracePoint[] = [];

  statesReceived = 0;

  private pending: PendingCmd[] = [];
  private now: () => number;

  constructor(now: () => number = () => performance.now()) {
    this.now = now;
    const mk = () => new SeriesBuffer(CHART_WINDOW_S);
    this.fHuman = [mk(), mk(), mk()];
    this.fExt = [mk(), mk(), mk()];
    this.eeVel = [mk(), mk(), mk()];
  }

  /** Record an outgoing command so its ack can be matched up (FIFO: the
   * server answers every message, in order, with one ack or one error). */
  noteSent(kind: string): void {
    this.pending.push({ kind, sentAt: this.now() });
  }

  ingest(msg: ServerMsg): void {
    switch (msg.type) {
      case "state":
        this.ingestState(msg);
        break;
      case "ack": {
        const cmd = this.pending.shift();
        if (cmd && cmd.kind === "button") {
          this.buttonRtMs = this.now() - cmd.sentAt;
        }
        break;
      }
      case "error":
        this.pending.shift();
        this.lastError = msg.msg;
        break;
    }
  }

  private ingestState(msg: StateMsg): void {
    const prev = this.lastState;
    if (prev && msg.t < prev.t) this.clearSeries(); // reset or scenario load

    // charts plot exactly what arrived; velocity is the raw first
    // difference of received positions, with no filtering on top
    for (let i = 0; i < 3; i++) {
      this.fHuman[i].push(msg.t, msg.f_human[i]);
      this.fExt[i].push(msg.t, msg.f_ext[i]);
    }
    if (prev && msg.t > prev.t) {
      const dt = msg.t - prev.t;
      for (let i = 0; i < 3; i++) {
        this.eeVel[i].push(msg.t, (msg.ee.p[i] - prev.ee.p[i]) / dt);
      }
    }

    this.trace.push({ t: msg.t, p: [...msg.ee.p] });
    const cutoff = msg.t - TRACE_WINDOW_S;
    while (this.trace.length > 0 && this.trace[0].t < cutoff) this.trace.shift();

    this.lastState = msg;
    this.statesReceived += 1;
  }

  private clearSeries(): void {
    for (const buf of [...this.fHuman, ...this.fExt, ...this.eeVel]) buf.clear();
    this.trace.length = 0;
    this.lastState = null;
  }
}
