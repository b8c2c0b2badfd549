// Scripted players: used by the end-to-end tests and the demo autoplay.

import type { ClientSession } from "./session.js";
import type { Choice, TrialView } from "./types.js";

export type Player = (view: TrialView) => Choice;

/** Small deterministic PRNG so scripted runs are reproducible. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export const alwaysAccept: Player = () => ({ action: "accept" });

export function coinFlip(seed: number): Player {
  const random = mulberry32(seed);
  return () => (random() < 0.5 ? { action: "accept" } : { action: "reject" });
}

export function acceptOnlyOnSide(side: "left" | "right"): Player {
  return (view) => (view.plate_side === side ? { action: "accept" } : { action: "reject" });
}

export function bobAlternating(): Player {
  let turn = 0;
  return () => ({ letter: turn++ % 2 === 0 ? "B" : "B'" });
}

/** Drive a session for a number of trials: choose, reveal, advance. */
export async function playTrials(session: ClientSession, player: Player, trials: number): Promise<void> {
  for (let i = 0; i < trials; i++) {
    const state = session.snapshot();
    if (state.phase !== "awaiting_choice" || state.trial === null) {
      throw new Error(`cannot play in phase ${state.phase}`);
    }
    const submitted = await session.submit(player(state.trial));
    if (submitted === null || submitted.phase !== "revealed") {
      throw new Error(`submission did not reveal (trial ${i})`);
    }
    if (i + 1 < trials) {
      const advanced = await session.advance();
      if (advanced === null || advanced.phase !== "awaiting_choice") {
        throw new Error(`could not advance after trial ${i}`);
      }
    }
  }
}
