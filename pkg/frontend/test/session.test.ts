import { describe, expect, it, vi } from "vitest";

import { ApiError, SessionApi } from "../src/api.js";
import { ClientSession } from "../src/session.js";
import type { RevealView, StatsDoc, TrialView } from "../src/types.js";

function trialView(index: number): TrialView {
  return {
    trial_index: index,
    role: "alice",
    plate_side: "left",
    front: { letter: "A", sign: 1 },
    left: { letter: "B", sign: 1 },
    right: { letter: "B'", sign: 1 },
    suggested_letter: "A",
  };
}

function revealView(index: number): RevealView {
  return {
    trial_index: index,
    alice_letter: "A",
    alice_value: 1,
    alice_accepted: true,
    alice_direction: null,
    bob_letter: "B",
    bob_value: 1,
    product: 1,
    pair: "ab",
    stats: { n_trials: index + 1 } as StatsDoc,
  };
}

function fakeApi(overrides: Partial<Record<keyof SessionApi, unknown>> = {}): SessionApi {
  const api = {
    baseUrl: "fake://",
    health: vi.fn(),
    createSession: vi.fn(async () => ({
      session_id: "sid",
      mode: "human_alice",
      experiment_mode: "standard",
      seed: 1,
      trial: trialView(0),
    })),
    getTrial: vi.fn(async () => trialView(0)),
    submitChoice: vi.fn(async () => revealView(0)),
    advance: vi.fn(async () => trialView(1)),
    getStats: vi.fn(async () => ({ n_trials: 0 }) as StatsDoc),
    closeSession: vi.fn(async () => ({ session_id: "sid", final: { n_trials: 1 } as StatsDoc, trial_log: [] })),
    ...overrides,
  };
  return api as unknown as SessionApi;
}

describe("ClientSession", () => {
  it("walks the choose/reveal/advance cycle", async () => {
    const api = fakeApi();
    const session = new ClientSession(api);
    await session.start({ mode: "human_alice" });
    expect(session.phase).toBe("awaiting_choice");

    const revealed = await session.submit({ action: "accept" });
    expect(revealed?.phase).toBe("revealed");
    expect(revealed?.stats?.n_trials).toBe(1);

    const advanced = await session.advance();
    expect(advanced?.phase).toBe("awaiting_choice");
    expect(advanced?.trial?.trial_index).toBe(1);
  });

  it("sends at most one state-changing request per press", async () => {
    let release: (value: RevealView) => void = () => {};
    const gate = new Promise<RevealView>((resolve) => {
      release = resolve;
    });
    const api = fakeApi({ submitChoice: vi.fn(() => gate) });
    const session = new ClientSession(api);
    await session.start({ mode: "human_alice" });

    const first = session.submit({ action: "accept" });
    const second = await session.submit({ action: "accept" }); // double click
    expect(second).toBeNull();
    release(revealView(0));
    await first;
    expect((api.submitChoice as ReturnType<typeof vi.fn>).mock.calls.length).toBe(1);
  });

  it("refuses to submit outside the choosing phase", async () => {
    const session = new ClientSession(fakeApi());
    expect(await session.submit({ action: "accept" })).toBeNull(); // idle
    await session.start({ mode: "human_alice" });
    await session.submit({ action: "accept" });
    expect(await session.submit({ action: "accept" })).toBeNull(); // revealed
  });

  it("discards a stale advance response by trial index", async () => {
    const api = fakeApi({ advance: vi.fn(async () => trialView(0)) }); // not newer
    const session = new ClientSession(api);
    await session.start({ mode: "human_alice" });
    await session.submit({ action: "accept" });
    const state = await session.advance();
    expect(state?.phase).toBe("revealed"); // stale view ignored, phase unchanged
  });

  it("resyncs through get_trial on a conflict", async () => {
    const api = fakeApi({
      submitChoice: vi.fn(async () => {
        throw new ApiError(409, "wrong_phase", "phase is revealed");
      }),
      getTrial: vi.fn(async () => trialView(2)),
    });
    const session = new ClientSession(api);
    await session.start({ mode: "human_alice" });
    const state = await session.submit({ action: "accept" });
    expect(api.getTrial).toHaveBeenCalled();
    expect(state?.phase).toBe("awaiting_choice");
    expect(state?.trial?.trial_index).toBe(2);
    expect(state?.error).toContain("wrong_phase");
  });

  it("falls back to stats when the conflict persists", async () => {
    const api = fakeApi({
      submitChoice: vi.fn(async () => {
        throw new ApiError(409, "wrong_phase", "phase is revealed");
      }),
      getTrial: vi.fn(async () => {
        throw new ApiError(409, "wrong_phase", "phase is revealed");
      }),
      getStats: vi.fn(async () => ({ n_trials: 5 }) as StatsDoc),
    });
    const session = new ClientSession(api);
    await session.start({ mode: "human_alice" });
    const state = await session.submit({ action: "accept" });
    expect(state?.phase).toBe("revealed");
    expect(state?.stats?.n_trials).toBe(5);
  });

  it("treats an unknown session as closed", async () => {
    const api = fakeApi({
      submitChoice: vi.fn(async () => {
        throw new ApiError(404, "unknown_session", "no session");
      }),
    });
    const session = new ClientSession(api);
    await session.start({ mode: "human_alice" });
    const state = await session.submit({ action: "accept" });
    expect(state?.phase).toBe("closed");
  });

  it("keeps waiting in a shared session until both choices are in", async () => {
    const api = fakeApi({
      createSession: vi.fn(async () => ({
        session_id: "sid",
        mode: "human_both",
        experiment_mode: "standard",
        seed: 1,
        trial: trialView(0),
        tokens: { alice: "ta", bob: "tb" },
      })),
      submitChoice: vi.fn(async () => ({ phase: "awaiting_choice", waiting_for: "bob" }) as const),
    });
    const session = new ClientSession(api);
    await session.start({ mode: "human_both" }, "alice");
    const state = await session.submit({ action: "accept" });
    expect(state?.phase).toBe("awaiting_choice");
    expect(state?.waitingFor).toBe("bob");
    const call = (api.submitChoice as ReturnType<typeof vi.fn>).mock.calls[0];
    expect(call[2]).toBe("ta"); // the participant token travels with the choice
  });

  it("closing surfaces the final statistics", async () => {
    const session = new ClientSession(fakeApi());
    await session.start({ mode: "human_alice" });
    const state = await session.close();
    expect(state.phase).toBe("closed");
    expect(state.stats?.n_trials).toBe(1);
  });
});
