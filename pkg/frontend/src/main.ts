// Browser entry: chart canvas + mouse/keyboard input + streamed audio.
//
// Keys: L toggle lens, [ / ] or wheel lens radius, - / = threshold,
//       P lens playback, C color highlight toggle.

import { StreamPlayer } from "./audio.js";
import { paintChart, ViewState } from "./chart.js";
import { SessionClient } from "./client.js";
import { Dataset, parseDataset } from "./protocol.js";
import { VibrationRegistry } from "./vibration.js";

const canvas = document.getElementById("chart") as HTMLCanvasElement;
const status = document.getElementById("status") as HTMLElement;
const ctx = canvas.getContext("2d")!;

const view: ViewState = {
  width: canvas.width,
  height: canvas.height,
  lens: null,
  highlightColor: true,
};
const vibration = new VibrationRegistry();
let dataset: Dataset = { version: 1, lines: [] };
let player: StreamPlayer | null = null;

const url = `ws://${location.host}/session`;
const client = new SessionClient({ url });

client.on("hello", (hello) => {
  status.textContent = `connected: ${hello.dataset.lines} lines @ ${hello.sample_rate} Hz`;
});
client.on("pluck", (pluck) => {
  vibration.trigger(pluck.line_id, pluck.decay, performance.now() / 1000);
});
client.on("audio", (frame) => player?.onFrame(frame));
client.on("busy", () => {
  status.textContent = "engine busy: another session is connected";
});
client.on("close", () => {
  status.textContent = "disconnected, retrying...";
});

async function boot(): Promise<void> {
  const resp = await fetch("/dataset");
  dataset = parseDataset(await resp.text());
  client.connect();
  requestAnimationFrame(frame);
}

function frame(): void {
  const now = performance.now() / 1000;
  client.flushCursor();
  view.lens = client.lens.enabled ? client.lens : null;
  paintChart(ctx, dataset, view, vibration, now);
  vibration.prune(now);
  if (player && player.underruns > 0) {
    status.textContent = `audio underruns: ${player.underruns}`;
  }
  requestAnimationFrame(frame);
}

function chartCoords(ev: MouseEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  const x = (ev.clientX - rect.left) / rect.width;
  const y = 1 - (ev.clientY - rect.top) / rect.height;
  return [Math.min(1, Math.max(0, x)), Math.min(1, Math.max(0, y))];
}

canvas.addEventListener("mousemove", (ev) => {
  const [x, y] = chartCoords(ev);
  client.cursorMove(x, y);
  if (client.lens.enabled) client.moveLens(x, y);
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  client.adjustRadius(ev.deltaY < 0 ? 1.1 : 1 / 1.1);
});

window.addEventListener("keydown", (ev) => {
  switch (ev.key) {
    case "l":
    case "L":
      client.toggleLens();
      break;
    case "-":
      client.adjustThreshold(-0.05);
      break;
    case "=":
    case "+":
      client.adjustThreshold(+0.05);
      break;
    case "[":
      client.adjustRadius(1 / 1.1);
      break;
    case "]":
      client.adjustRadius(1.1);
      break;
    case "p":
    case "P":
      client.triggerPlayback();
      break;
    case "c":
    case "C":
      view.highlightColor = !view.highlightColor;
      break;
  }
});

// browsers require a gesture before audio output may start
canvas.addEventListener(
  "click",
  async () => {
    if (!player && client.hello) {
      player = new StreamPlayer(client.hello.sample_rate, client.hello.block_frames);
      await player.start();
      status.textContent = "audio running";
    }
  },
  { once: false },
);

boot().catch((e) => {
  status.textContent = `failed to start: ${e}`;
});
