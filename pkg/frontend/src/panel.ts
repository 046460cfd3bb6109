import type { ButtonId, StateMsg } from "./schema.js";
import type { ConnectionStatus } from "./state.js";

export const BUTTON_ORDER: ButtonId[] = ["A", "M", "G", "P"];

export const BUTTON_LABELS: Record<ButtonId, string> = {
  A: "admittance",
  M: "translation",
  G: "gripper",
  P: "locomotion",
};

export interface Lamps {
  a: boolean;
  m: boolean;
  g: boolean;
  p: boolean;
}

/** Lamp state comes from the last received state message and nowhere else;
 * a press never toggles a lamp locally. Null until the first state. */
export function lampsFrom(state: StateMsg | null): Lamps | null {
  return state ? { ...state.mode } : null;
}

export function pressAllowed(status: ConnectionStatus): boolean {
  return status === "open";
}
