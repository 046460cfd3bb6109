import { button, type ButtonId } from "./schema.js";
import { ViewState } from "./state.js";
import { BridgeSocket } from "./socket.js";
import { DragController, NEWTONS_PER_PX } from "./drag.js";
import { BUTTON_LABELS, BUTTON_ORDER, lampsFrom, pressAllowed } from "./panel.js";
import { HANDLE_R, SceneRenderer, handleCenter } from "./render.js";
import { StripChart } from "./charts.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function main(): void {
  const params = new URLSearchParams(location.search);
  const url = params.get("server") ?? `ws://${location.host}/ws`;

  const view = new ViewState();
  const socket = new BridgeSocket(url, view);
  const drag = new DragController(view, (m) => socket.send(m));

  const topCanvas = el<HTMLCanvasElement>("top");
  const sideCanvas = el<HTMLCanvasElement>("side");
  const scene = new SceneRenderer(topCanvas, sideCanvas);

  const charts = [
    new StripChart(el("chart-fh"), "human wrench f [N]", "", [
      { label: "x", color: "#7bd88f", buf: view.fHuman[0] },
      { label: "y", color: "#5fa8d3", buf: view.fHuman[1] },
      { label: "z", color: "#d3985f", buf: view.fHuman[2] },
    ]),
    new StripChart(el("chart-fe"), "contact force f_ext [N]", "", [
      { label: "x", color: "#7bd88f", buf: view.fExt[0] },
      { label: "y", color: "#5fa8d3", buf: view.fExt[1] },
      { label: "z", color: "#d3985f", buf: view.fExt[2] },
    ]),
    new StripChart(el("chart-vel"), "ee velocity [m/s]", "", [
      { label: "x", color: "#7bd88f", buf: view.eeVel[0] },
      { label: "y", color: "#5fa8d3", buf: view.eeVel[1] },
      { label: "z", color: "#d3985f", buf: view.eeVel[2] },
    ]),
  ];

  // four-button board
  const panel = el("panel");
  const pads = new Map<ButtonId, HTMLButtonElement>();
  for (const id of BUTTON_ORDER) {
    const pad = document.createElement("button");
    pad.className = "pad";
    pad.innerHTML = `<span class="lamp"></span>${id} <small>${BUTTON_LABELS[id]}</small>`;
    pad.addEventListener("click", () => {
      if (pressAllowed(view.status)) socket.send(button(id));
    });
    panel.appendChild(pad);
    pads.set(id, pad);
  }

  el("reset").addEventListener("click", () => {
    if (pressAllowed(view.status)) socket.send({ v: 1, type: "reset" });
  });
  el("pause").addEventListener("click", () => {
    if (pressAllowed(view.status)) socket.send({ v: 1, type: "pause" });
  });
  el("resume").addEventListener("click", () => {
    if (pressAllowed(view.status)) socket.send({ v: 1, type: "resume" });
  });
  const reconnect = el<HTMLButtonElement>("reconnect");
  reconnect.addEventListener("click", () => socket.connect());

  el("scale").textContent = `drag scale: 1 px = ${NEWTONS_PER_PX} N, hold shift for z, ring for spin`;

  // pointer handling on the top-down view; one pointer at a time
  let pointerId: number | null = null;
  let spinning = false;
  let originX = 0;
  let originY = 0;

  const canvasPos = (ev: PointerEvent): [number, number] => {
    const r = topCanvas.getBoundingClientRect();
    return [
      ((ev.clientX - r.left) / r.width) * topCanvas.width,
      ((ev.clientY - r.top) / r.height) * topCanvas.height,
    ];
  };

  topCanvas.addEventListener("pointerdown", (ev) => {
    if (pointerId !== null || ev.button !== 0) return;
    if (!pressAllowed(view.status)) return;
    pointerId = ev.pointerId;
    topCanvas.setPointerCapture(pointerId);
    const [x, y] = canvasPos(ev);
    const [hx, hy] = handleCenter({ w: topCanvas.width, h: topCanvas.height, pxPerM: 1 });
    spinning = Math.hypot(x - hx, y - hy) <= HANDLE_R + 6;
    originX = x;
    originY = y;
    drag.start();
  });

  topCanvas.addEventListener("pointermove", (ev) => {
    if (ev.pointerId !== pointerId) return;
    const [x, y] = canvasPos(ev);
    if (spinning) {
      const [hx, hy] = handleCenter({ w: topCanvas.width, h: topCanvas.height, pxPerM: 1 });
      drag.twist(-Math.atan2(y - hy, x - hx) - Math.PI / 2);
    } else {
      drag.move(x - originX, y - originY, ev.shiftKey);
    }
  });

  const endDrag = (ev: PointerEvent) => {
    if (ev.pointerId !== pointerId) return;
    pointerId = null;
    spinning = false;
    drag.release();
  };
  topCanvas.addEventListener("pointerup", endDrag);
  topCanvas.addEventListener("pointercancel", endDrag);

  const statusSpan = el("status");
  const robotSpan = el("robot");
  const timeSpan = el("sim-t");
  const rtSpan = el("rt");
  const errSpan = el("err");

  function frame(): void {
    scene.draw(view);
    for (const c of charts) c.draw();

    statusSpan.textContent = view.status;
    statusSpan.className = `status-${view.status}`;
    robotSpan.textContent = view.lastState?.robot ?? "-";
    timeSpan.textContent = view.lastState ? view.lastState.t.toFixed(2) + " s" : "-";
    rtSpan.textContent = view.buttonRtMs === null ? "-" : `${view.buttonRtMs.toFixed(1)} ms`;
    errSpan.textContent = view.lastError ?? "";

    const lamps = lampsFrom(view.lastState);
    const enabled = pressAllowed(view.status);
    for (const id of BUTTON_ORDER) {
      const pad = pads.get(id)!;
      pad.disabled = !enabled;
      const key = id.toLowerCase() as keyof NonNullable<typeof lamps>;
      pad.querySelector(".lamp")!.className = lamps && lamps[key] ? "lamp on" : "lamp";
    }
    reconnect.style.display = view.status === "closed" ? "inline-block" : "none";

    requestAnimationFrame(frame);
  }

  socket.connect();
  requestAnimationFrame(frame);
}

window.addEventListener("load", main);
