import { z } from "zod";

// Wire protocol, version 1. Every outgoing message passes through these
// schemas before touching the socket; every inbound message is rejected
// (not thrown) when it does not parse.

export const WIRE_VERSION = 1;

const vec3 = z.tuple([z.number(), z.number(), z.number()]);
const quat = z.tuple([z.number(), z.number(), z.number(), z.number()]);
const vec6 = z.tuple([
  z.number(), z.number(), z.number(),
  z.number(), z.number(), z.number(),
]);

export const ButtonId = z.enum(["A", "M", "G", "P"]);
export type ButtonId = z.infer<typeof ButtonId>;

export const WrenchMessage = z.object({
  v: z.literal(WIRE_VERSION),
  type: z.literal("wrench"),
  f: vec3,
  tau: vec3,
});

export const ButtonMessage = z.object({
  v: z.literal(WIRE_VERSION),
  type: z.literal("button"),
  id: ButtonId,
});

export const ResetMessage = z.object({ v: z.literal(WIRE_VERSION), type: z.literal("reset") });
export const PauseMessage = z.object({ v: z.literal(WIRE_VERSION), type: z.literal("pause") });
export const ResumeMessage = z.object({ v: z.literal(WIRE_VERSION), type: z.literal("resume") });

export const LoadMessage = z.object({
  v: z.literal(WIRE_VERSION),
  type: z.literal("load"),
  name: z.string().min(1),
});

export const ClientMessage = z.discriminatedUnion("type", [
  WrenchMessage,
  ButtonMessage,
  ResetMessage,
  LoadMessage,
  PauseMessage,
  ResumeMessage,
]);
export type ClientMsg = z.infer<typeof ClientMessage>;

export const StateMessage = z.object({
  v: z.literal(WIRE_VERSION),
  type: z.literal("state"),
  t: z.number(),
  q: z.array(z.number()).min(1),
  ee: z.object({ p: vec3, quat: quat }),
  f_human: vec6,
  f_ext: vec6,
  mode: z.object({
    a: z.boolean(), // admittance active
    m: z.boolean(), // translation-only motion mode
    g: z.boolean(), // gripper closed
    p: z.boolean(), // locomotion priority
  }),
  robot: z.string(),
  safety_stop: z.boolean(),
});
export type StateMsg = z.infer<typeof StateMessage>;

export const AckMessage = z.object({
  v: z.literal(WIRE_VERSION),
  type: z.literal("ack"),
  tick: z.number().int().nonnegative(),
});

export const ErrorMessage = z.object({
  v: z.literal(WIRE_VERSION),
  type: z.literal("error"),
  msg: z.string(),
});

export const ServerMessage = z.discriminatedUnion("type", [
  StateMessage,
  AckMessage,
  ErrorMessage,
]);
export type ServerMsg = z.infer<typeof ServerMessage>;

export type Vec3 = [number, number, number];

export function wrench(f: Vec3, tau: Vec3): ClientMsg {
  return { v: WIRE_VERSION, type: "wrench", f, tau };
}

export function button(id: ButtonId): ClientMsg {
  return { v: WIRE_VERSION, type: "button", id };
}

/** Serialize an outgoing message, validating it against the wire schema. */
export function encodeClient(msg: ClientMsg): string {
  return JSON.stringify(ClientMessage.parse(msg));
}

/** Parse one inbound frame; returns null on anything malformed. */
export function decodeServer(raw: string): ServerMsg | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  const res = ServerMessage.safeParse(data);
  return res.success ? res.data : null;
}
