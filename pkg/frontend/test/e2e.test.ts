// End-to-end: scripted browser clients against a real session service.
//
// Spawns the Python service (needs the moebius-bell package importable;
// override the interpreter with the PYTHON environment variable), drives
// whole sessions through the same ClientSession/renderDashboard code the
// page uses, and checks what the dashboard shows.

import { type ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SessionApi } from "../src/api.js";
import { ClientSession } from "../src/session.js";
import { renderDashboard } from "../src/render.js";
import { alwaysAccept, coinFlip, playTrials } from "../src/players.js";

const PYTHON = process.env.PYTHON ?? "python3";
const PORT = 8731 + (process.pid % 211);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitForHealth(api: SessionApi, attempts = 100): Promise<void> {
  for (let i = 0; i < attempts; i++) {
    try {
      const doc = await api.health();
      if (doc.status === "ok") {
        return;
      }
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 150));
    }
  }
  throw new Error(`service at ${BASE} never became healthy`);
}

beforeAll(async () => {
  server = spawn(PYTHON, ["-m", "moebius_bell.cli", "serve", "--port", String(PORT)], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  server.stderr?.on("data", () => {});
  await waitForHealth(new SessionApi(BASE));
});

afterAll(() => {
  server?.kill("SIGINT");
});

describe("scripted clients against the live service", () => {
  it("an always-accepting player sees the dashboard S pinned at 4", async () => {
    const session = new ClientSession(new SessionApi(BASE));
    await session.start({ mode: "human_alice", seed: 1 });
    await playTrials(session, alwaysAccept, 500);

    const state = session.snapshot();
    const dashboard = renderDashboard(state.stats);
    expect(dashboard.nTrials).toBe(500);
    // zero-variance case: within 5 sigma means exactly 4 here
    expect(dashboard.sNumeric).toBe(4.0);
    expect(state.stats?.bell.s_stderr).toBe(0.0);
    expect(state.stats?.accept_rates.left).toBe(1.0);
    expect(state.stats?.accept_rates.right).toBe(1.0);
    expect(dashboard.acceptRateLeft).toBe("1.000");
    expect(dashboard.acceptRateRight).toBe("1.000");

    const closed = await session.close();
    expect(closed.final?.trial_log.length).toBe(500);
  });

  it("a coin-flipping player trends to the classical bound", async () => {
    const aliceSession = new ClientSession(new SessionApi(BASE));
    await aliceSession.start({ mode: "human_alice", seed: 2 });
    await playTrials(aliceSession, coinFlip(1234), 500);

    const stats = aliceSession.snapshot().stats;
    const dashboard = renderDashboard(stats);
    expect(dashboard.nTrials).toBe(500);
    const s = stats?.bell.s_value;
    const stderr = stats?.bell.s_stderr;
    if (typeof s !== "number" || typeof stderr !== "number") {
      throw new Error("dashboard statistics undefined after 500 trials");
    }
    expect(Math.abs(s - 2.0)).toBeLessThanOrEqual(5 * stderr);
    await aliceSession.close();
  }, 180_000);

  it("a nonlocal session exposes the communicated letter and takes directions", async () => {
    const session = new ClientSession(new SessionApi(BASE));
    await session.start({ mode: "human_alice", experiment_mode: "nonlocal", seed: 3 });
    const trial = session.snapshot().trial;
    expect(trial?.bob_letter === "B" || trial?.bob_letter === "B'").toBe(true);

    const revealed = await session.submit({ action: "reject", direction: "cw" });
    expect(revealed?.phase).toBe("revealed");
    expect([1, -1]).toContain(revealed?.reveal?.alice_direction);
    await session.close();
  });
});
