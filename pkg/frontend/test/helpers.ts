import type { StateMsg } from "../src/schema.js";

/** A plausible state frame; override what the test cares about. */
export function fakeState(over: Partial<StateMsg> = {}): StateMsg {
  return {
    v: 1,
    type: "state",
    t: 0.02,
    q: [0, 0, 0, 0, 0.5, 1.1, -0.6, 1.57, 0],
    ee: { p: [0.9, 0, 1.28], quat: [1, 0, 0, 0] },
    f_human: [0, 0, 0, 0, 0, 0],
    f_ext: [0, 0, 0, 0, 0, 0],
    mode: { a: true, m: false, g: false, p: false },
    robot: "kairos-like",
    safety_stop: false,
    ...over,
  };
}
