// DOM bootstrap: wires the pure renderers to the page and maps button
// presses onto session requests. One state-changing request per press.

import { SessionApi } from "./api.js";
import { renderApp, type Action, type AppScreen } from "./render.js";
import { ClientSession } from "./session.js";
import type { Choice, CreateOptions } from "./types.js";

const DEFAULT_BASE = "http://127.0.0.1:8000";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function choiceFor(actionId: string): Choice | null {
  switch (actionId) {
    case "accept":
      return { action: "accept" };
    case "reject":
      return { action: "reject" };
    case "reject-cw":
      return { action: "reject", direction: "cw" };
    case "reject-ccw":
      return { action: "reject", direction: "ccw" };
    case "choose-B":
      return { letter: "B" };
    case "choose-B'":
      return { letter: "B'" };
    default:
      return null;
  }
}

function paint(screen: AppScreen, onAction: (action: Action) => void): void {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = screen.banner ?? "";
  banner.style.display = screen.banner ? "block" : "none";

  const strip = el<HTMLDivElement>("strip");
  const actions = el<HTMLDivElement>("actions");
  const reveal = el<HTMLDivElement>("reveal");
  actions.replaceChildren();

  if (screen.trial && screen.trial.kind === "trial") {
    const plate = screen.trial.plateSide ? `plate on your ${screen.trial.plateSide}` : "plate in front of you";
    el<HTMLDivElement>("plate").textContent = `trial ${screen.trial.trialIndex} - ${plate}`;
    for (const slot of screen.trial.slots) {
      const cell = el<HTMLDivElement>(`slot-${slot.position}`);
      cell.textContent = slot.glyph;
      cell.classList.toggle("suggested", slot.suggested);
    }
    strip.style.display = "grid";
    el<HTMLDivElement>("bob-letter").textContent = screen.trial.awaitingBobLetter
      ? "waiting for Bob's letter..."
      : screen.trial.bobLetter
        ? `Bob will measure ${screen.trial.bobLetter}`
        : "";
    for (const action of screen.trial.actions) {
      const button = document.createElement("button");
      button.textContent = action.label;
      button.dataset.action = action.id;
      button.addEventListener("click", () => onAction(action));
      actions.appendChild(button);
    }
  } else if (screen.trial && screen.trial.kind === "error") {
    banner.textContent = screen.trial.message;
    banner.style.display = "block";
  } else {
    el<HTMLDivElement>("plate").textContent = screen.waitingFor
      ? `waiting for ${screen.waitingFor}...`
      : screen.phase;
  }

  if (screen.reveal) {
    reveal.replaceChildren();
    for (const line of [screen.reveal.aliceLine, screen.reveal.bobLine, screen.reveal.productLine]) {
      const p = document.createElement("p");
      p.textContent = line;
      reveal.appendChild(p);
    }
    const next = document.createElement("button");
    next.textContent = "next strip";
    next.addEventListener("click", () => onAction({ id: "advance", label: "next strip" }));
    reveal.appendChild(next);
    reveal.style.display = "block";
  } else {
    reveal.style.display = "none";
  }

  const dash = screen.dashboard;
  const rows = dash.correlators
    .map((row) => `<tr><td>&lt;${row.label}&gt;</td><td>${row.value}</td><td>±${row.stderr}</td><td>${row.n}</td></tr>`)
    .join("");
  el<HTMLDivElement>("dashboard").innerHTML = `
    <table><thead><tr><th>pair</th><th>estimate</th><th>stderr</th><th>n</th></tr></thead>
    <tbody>${rows}</tbody></table>
    <p class="s-line">S = <strong>${dash.sValue}</strong> ± ${dash.sStderr}
      <span class="marker">classical bound ${dash.classicalBound}</span>
      <span class="marker">story ceiling ${dash.storyCeiling}</span></p>
    <p>p-hat left ${dash.pHatLeft} / right ${dash.pHatRight};
       accept rate left ${dash.acceptRateLeft} / right ${dash.acceptRateRight};
       handedness: ${dash.verdict} (${dash.nTrials} trials)</p>`;
}

async function boot(): Promise<void> {
  const base = new URLSearchParams(window.location.search).get("server") ?? DEFAULT_BASE;
  const session = new ClientSession(new SessionApi(base));
  const repaint = () => paint(renderApp(session.snapshot()), onAction);

  async function onAction(action: Action): Promise<void> {
    if (action.id === "advance") {
      await session.advance();
    } else {
      const choice = choiceFor(action.id);
      if (choice) {
        await session.submit(choice);
      }
    }
    repaint();
  }

  el<HTMLButtonElement>("start").addEventListener("click", async () => {
    const mode = el<HTMLSelectElement>("mode").value as CreateOptions["mode"];
    const experiment = el<HTMLSelectElement>("experiment-mode").value as "standard" | "nonlocal";
    const seedText = el<HTMLInputElement>("seed").value.trim();
    const options: CreateOptions = { mode, experiment_mode: experiment };
    if (seedText !== "") {
      options.seed = Number(seedText);
    }
    await session.start(options, mode === "human_both" ? "alice" : undefined);
    repaint();
  });

  el<HTMLButtonElement>("finish").addEventListener("click", async () => {
    await session.close();
    repaint();
  });

  repaint();
}

document.addEventListener("DOMContentLoaded", () => {
  void boot();
});
